#pragma once

#include "tropbn/error.hpp"
#include "tropbn/rational.hpp"
#include "tropbn/metric_graph.hpp"
#include "tropbn/graph_io.hpp"
#include "tropbn/graph_ops.hpp"
#include "tropbn/lattice.hpp"
#include "tropbn/divisor.hpp"
#include "tropbn/chipfire.hpp"
#include "tropbn/classify.hpp"
#include "tropbn/cycle_reduce.hpp"
#include "tropbn/brill_noether.hpp"
#include "tropbn/report.hpp"
