#include "airbeam/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace airbeam {

ChannelSet::ChannelSet(ComplexMatrix H) : H_(std::move(H)) {
  if (H_.rows() <= 0 || H_.cols() <= 0) throw std::invalid_argument("ChannelSet: empty matrix");
  if (!H_.allFinite()) throw std::invalid_argument("ChannelSet: non-finite channel entry");
  for (Eigen::Index k = 0; k < H_.cols(); ++k) {
    if (H_.col(k).squaredNorm() == 0.0) {
      throw std::invalid_argument("ChannelSet: channel of device " + std::to_string(k + 1) +
                                  " is zero; the instance is infeasible");
    }
  }
}

ComplexVector ChannelSet::effective_gains(const ComplexVector& m) const {
  if (m.size() != H_.rows()) throw std::invalid_argument("effective_gains: dimension mismatch");
  // (m^H h_k)_k = (H^T conj(m)) = conj(H^H m)
  return (H_.adjoint() * m).conjugate();
}

double ChannelSet::min_gain_modulus(const ComplexVector& m) const {
  return effective_gains(m).cwiseAbs().minCoeff();
}

double ChannelSet::max_column_norm() const { return H_.colwise().norm().maxCoeff(); }

ChannelSet ChannelSet::scaled(double factor) const { return ChannelSet(H_ * factor); }

ComplexVector scale_to_feasible(const ChannelSet& H, const ComplexVector& m) {
  const double g = H.min_gain_modulus(m);
  if (!(g > 1e-300) || !std::isfinite(g)) {
    throw std::domain_error("scale_to_feasible: effective channel gain is zero");
  }
  return m / g;
}

bool is_feasible(const ChannelSet& H, const ComplexVector& m, double tol) {
  return H.min_gain_modulus(m) >= 1.0 - tol;
}

}  // namespace airbeam
