#pragma once

#include "ialm/error.hpp"
#include "ialm/inner_solvers.hpp"
#include "ialm/linalg.hpp"
#include "ialm/outer_loop.hpp"
#include "ialm/qp_model.hpp"
#include "ialm/random.hpp"
#include "ialm/spectral.hpp"
#include "ialm/tolerances.hpp"
#include "ialm/experiments/csv.hpp"
#include "ialm/experiments/libsvm.hpp"
#include "ialm/experiments/problems.hpp"
#include "ialm/experiments/reproduce.hpp"
