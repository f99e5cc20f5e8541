#pragma once

// Pointwise statistics of normalized states.

#include "catmap/state.hpp"

namespace catmap {

/// h(f) = -sum_x (|f(x)|^2 / N) log(|f(x)|^2 / N), natural log, 0 log 0 = 0.
/// Throws std::invalid_argument unless the weighted norm is 1 within 1e-9.
double shannon_entropy(const StateVector& psi);

}  // namespace catmap
