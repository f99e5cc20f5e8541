#include "catmap/measures.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace catmap {

double shannon_entropy(const StateVector& psi) {
  const double N = static_cast<double>(psi.size());
  const double norm2 = psi.squaredNorm() / N;
  if (std::abs(norm2 - 1.0) > 1e-9)
    throw std::invalid_argument("shannon_entropy: state is not normalized (norm^2 = " +
                                std::to_string(norm2) + ")");
  double h = 0.0;
  for (Eigen::Index x = 0; x < psi.size(); ++x) {
    const double w = std::norm(psi(x)) / N;
    if (w > 0.0) h -= w * std::log(w);
  }
  return h;
}

}  // namespace catmap
