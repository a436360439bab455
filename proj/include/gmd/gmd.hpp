#pragma once

// Umbrella header for the numerical library (JSON I/O lives in gmd/io.hpp).

#include "gmd/bounds.hpp"
#include "gmd/closed_form.hpp"
#include "gmd/core_model.hpp"
#include "gmd/errors.hpp"
#include "gmd/general_ec.hpp"
#include "gmd/monte_carlo.hpp"
#include "gmd/quadrature.hpp"
#include "gmd/special_functions.hpp"
