#pragma once

// Umbrella header for the nonlocal Navier-Stokes-Korteweg toolkit.

#include "nsk/config.hpp"
#include "nsk/diagnostics.hpp"
#include "nsk/field_io.hpp"
#include "nsk/grid.hpp"
#include "nsk/kernel.hpp"
#include "nsk/operators.hpp"
#include "nsk/orlicz.hpp"
#include "nsk/pressure.hpp"
#include "nsk/reference.hpp"
#include "nsk/runner.hpp"
#include "nsk/solver.hpp"
