#pragma once

// Umbrella header for the fadekit library.

#include "fadekit/core.hpp"
#include "fadekit/params.hpp"
#include "fadekit/special_functions.hpp"
#include "fadekit/mixture.hpp"
#include "fadekit/quadrature.hpp"
#include "fadekit/reference.hpp"
#include "fadekit/sampling.hpp"
#include "fadekit/metrics.hpp"
#include "fadekit/fitting.hpp"
