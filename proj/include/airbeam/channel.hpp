#pragma once

#include <cstddef>

#include "airbeam/numerics.hpp"

namespace airbeam {

/// N x K channel matrix; column k is the channel vector of device k.
///
/// Construction rejects non-finite entries and all-zero columns: a zero
/// channel makes |m^H h_k| >= 1 unsatisfiable.
class ChannelSet {
 public:
  explicit ChannelSet(ComplexMatrix H);

  Eigen::Index antennas() const { return H_.rows(); }
  Eigen::Index devices() const { return H_.cols(); }
  const ComplexMatrix& matrix() const { return H_; }
  auto column(Eigen::Index k) const { return H_.col(k); }

  /// Effective gains m^H h_k for every device.
  ComplexVector effective_gains(const ComplexVector& m) const;

  /// min_k |m^H h_k|.
  double min_gain_modulus(const ComplexVector& m) const;

  /// Largest column norm; solvers divide by it to work at unit scale.
  double max_column_norm() const;

  ChannelSet scaled(double factor) const;

 private:
  ComplexMatrix H_;
};

/// m divided by min_k |m^H h_k| so the tightest constraint holds with equality.
/// Throws std::domain_error if some effective gain is (numerically) zero.
ComplexVector scale_to_feasible(const ChannelSet& H, const ComplexVector& m);

/// Every |m^H h_k| >= 1 - tol.
bool is_feasible(const ChannelSet& H, const ComplexVector& m, double tol = 1e-9);

}  // namespace airbeam
