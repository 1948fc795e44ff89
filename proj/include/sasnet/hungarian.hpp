#pragma once

#include <vector>

namespace sasnet {

/// Maximum-weight bipartite assignment (Kuhn-Munkres, O(n^3)). Rows and
/// columns may differ; unassigned rows get -1. Entries <= `forbidden`
/// are treated as unusable; a row is left unassigned rather than matched
/// through a forbidden entry (taking value 0 instead).
std::vector<int> hungarian_max(const std::vector<std::vector<double>>& score,
                               double forbidden = -1e290);

}  // namespace sasnet
