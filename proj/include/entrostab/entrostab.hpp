#pragma once

// Constrained entropy minimization for block-diagonal quantum states:
// exact minimizers over block-convex sets, stability-constant
// estimation, Monte-Carlo verification of the quadratic stability
// inequality, and sharpness-exponent measurement.

#include "entrostab/block.hpp"
#include "entrostab/constraint.hpp"
#include "entrostab/core_math.hpp"
#include "entrostab/errors.hpp"
#include "entrostab/fixtures.hpp"
#include "entrostab/minimizer.hpp"
#include "entrostab/rng.hpp"
#include "entrostab/selftest.hpp"
#include "entrostab/serialization.hpp"
#include "entrostab/stability.hpp"
#include "entrostab/tolerances.hpp"
#include "entrostab/version.hpp"
