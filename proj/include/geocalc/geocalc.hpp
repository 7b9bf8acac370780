#pragma once

// Everything except the command-line front end.

#include "numeric_core.hpp"
#include "oracle.hpp"
#include "trace.hpp"
#include "cascade.hpp"
#include "root_search.hpp"
#include "exponent_solver.hpp"
#include "euler.hpp"
#include "euler_log.hpp"
#include "mech_sim.hpp"
#include "diagram.hpp"
