#include "catmap/state.hpp"

#include <stdexcept>

namespace catmap {

StateVector delta_state(Int N, Int x) {
  if (N < 1) throw std::invalid_argument("delta_state needs N >= 1");
  StateVector psi = StateVector::Zero(N);
  psi(reduce(x, N)) = 1.0;
  return psi;
}

void fix_global_phase(StateVector& psi, double threshold) {
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double m = std::abs(psi(i));
    if (m > threshold) {
      psi *= std::conj(psi(i)) / m;
      psi(i) = m;  // exactly real
      return;
    }
  }
}

}  // namespace catmap
