#pragma once

#include <vector>

#include "ilb/net/linalg.hpp"

namespace ilb {

// Square assignment maximizing the total weight, O(n^3) Kuhn-Munkres with potentials.
// result[row] = assigned column.
std::vector<int> max_weight_assignment(const DenseMatrix& weights);

}  // namespace ilb
