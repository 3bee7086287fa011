#pragma once

// Umbrella header: total-variation-constrained autoregression toolkit.

#include "tvar/bootstrap.hpp"
#include "tvar/core.hpp"
#include "tvar/diagnostics.hpp"
#include "tvar/io.hpp"
#include "tvar/numeric.hpp"
#include "tvar/parallel.hpp"
#include "tvar/preprocess.hpp"
#include "tvar/projection.hpp"
#include "tvar/rng.hpp"
#include "tvar/simulate.hpp"
#include "tvar/solver.hpp"
#include "tvar/special.hpp"
#include "tvar/tuning.hpp"
#include "tvar/version.hpp"
