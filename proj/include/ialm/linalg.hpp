#pragma once

#include "ialm/linalg/cholesky.hpp"
#include "ialm/linalg/eigen.hpp"
#include "ialm/linalg/matrix.hpp"
#include "ialm/linalg/norms.hpp"
#include "ialm/linalg/permutation.hpp"
#include "ialm/linalg/vector.hpp"
