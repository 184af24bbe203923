#pragma once

// Umbrella header: the whole qtsim toolkit.

#include "qtsim/qcore/gate.hpp"
#include "qtsim/qcore/circuit.hpp"
#include "qtsim/qcore/statevector.hpp"
#include "qtsim/qcore/density.hpp"
#include "qtsim/qcore/sampling.hpp"
#include "qtsim/qcore/json_io.hpp"
#include "qtsim/tunnel/model.hpp"
#include "qtsim/tunnel/oracle.hpp"
#include "qtsim/tunnel/builders.hpp"
#include "qtsim/tunnel/timeline.hpp"
#include "qtsim/hadamard/hadamard.hpp"
#include "qtsim/transpile/chip.hpp"
#include "qtsim/transpile/transpile.hpp"
#include "qtsim/mitigate/mitigate.hpp"
#include "qtsim/multiprog/multiprog.hpp"
