#pragma once

#include <cstddef>

namespace cbo {

// Deterministic pairwise (recursive-halving) sum. Fixed association order,
// independent of threading; exact for 2^j equal summands.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace cbo
