#pragma once

// Umbrella header.

#include "autocorrelation.hpp"
#include "comb.hpp"
#include "core.hpp"
#include "detect.hpp"
#include "gap.hpp"
#include "io.hpp"
#include "jet.hpp"
#include "lattice.hpp"
#include "pointset.hpp"
#include "poisson.hpp"
#include "test_function.hpp"
