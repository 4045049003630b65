#pragma once

#include "vcsel/csv.hpp"
#include "vcsel/errors.hpp"
#include "vcsel/estimator.hpp"
#include "vcsel/executor.hpp"
#include "vcsel/generators.hpp"
#include "vcsel/histogram.hpp"
#include "vcsel/parser.hpp"
#include "vcsel/query.hpp"
#include "vcsel/relation.hpp"
#include "vcsel/sampler.hpp"
#include "vcsel/vc_bounds.hpp"
#include "vcsel/workload.hpp"
