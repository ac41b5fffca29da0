#pragma once

// Umbrella header.

#include "fission/bench.hpp"
#include "fission/datagen.hpp"
#include "fission/density.hpp"
#include "fission/error.hpp"
#include "fission/evaluation.hpp"
#include "fission/fission_core.hpp"
#include "fission/metric_space.hpp"
#include "fission/neighbor_index.hpp"
#include "fission/plot.hpp"
#include "fission/report.hpp"
#include "fission/sweep.hpp"
