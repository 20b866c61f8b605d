#pragma once

#include "spillover/config.hpp"
#include "spillover/designs.hpp"
#include "spillover/error.hpp"
#include "spillover/graph.hpp"
#include "spillover/graph_io.hpp"
#include "spillover/graph_models.hpp"
#include "spillover/ingest.hpp"
#include "spillover/null_samplers.hpp"
#include "spillover/outcomes.hpp"
#include "spillover/pvalue.hpp"
#include "spillover/random.hpp"
#include "spillover/results.hpp"
#include "spillover/simulation.hpp"
#include "spillover/single_test.hpp"
#include "spillover/statistics.hpp"
