#pragma once

#include "patp/error.hpp"
#include "patp/basis.hpp"
#include "patp/rng.hpp"
#include "patp/quadrature.hpp"
#include "patp/distributions.hpp"
#include "patp/moments.hpp"
#include "patp/efficiency.hpp"
#include "patp/estimators.hpp"
#include "patp/baselines.hpp"
#include "patp/parallel.hpp"
#include "patp/calibration.hpp"
#include "patp/harness.hpp"
