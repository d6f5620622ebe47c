#pragma once

#include <vector>

#include "msdiar/types.hpp"

namespace msdiar {

// Maximum-weight one-to-one assignment (Hungarian method, O(n^3)).
// Returns, for each row of `weights`, the matched column or -1 when the
// matrix has more rows than columns and the row is left over.
std::vector<int> max_weight_assignment(const Matrix& weights);

}  // namespace msdiar
