#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace airbeam {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

namespace numerics {

/// Real embedding z = [Re m; Im m; Re x; Im x].
RealVector embed_complex(const ComplexVector& m, const ComplexVector& x);

/// Inverse of embed_complex for an embedding with `n` beamformer and `k`
/// auxiliary entries.
std::pair<ComplexVector, ComplexVector> extract_complex(const RealVector& z, Eigen::Index n,
                                                        Eigen::Index k);

/// Convex QP: minimize z'Qz + c'z subject to Az = b and Gz <= g.
///
/// Q must be symmetric positive semidefinite. Any of the constraint blocks may
/// have zero rows.
struct ConvexQP {
  RealMatrix Q;
  RealVector c;
  RealMatrix A;
  RealVector b;
  RealMatrix G;
  RealVector g;

  /// Empty problem of dimension n (Q = 0, no constraints).
  static ConvexQP with_dimension(Eigen::Index n);

  Eigen::Index dimension() const { return Q.rows(); }
  double objective(const RealVector& z) const;

  /// Throws std::invalid_argument on inconsistent shapes or a non-symmetric Q.
  void validate() const;
};

enum class QpStatus { Optimal, Infeasible, NumericalFailure };

const char* to_string(QpStatus status);

struct QpTolerances {
  double equality = 1e-8;
  double inequality = 1e-8;
  double objective = 1e-9;
  int max_iterations = 2000;

  QpTolerances loosened(double factor) const;
};

struct QpSolution {
  QpStatus status = QpStatus::NumericalFailure;
  RealVector z;
  double objective = 0.0;
  double equality_residual = 0.0;    // ||Az - b||_inf
  double inequality_residual = 0.0;  // max(Gz - g, 0)
  int iterations = 0;

  bool optimal() const { return status == QpStatus::Optimal; }
};

/// Exact dual active-set solve (Goldfarb-Idnani) after eliminating the
/// equality system through its null space. A singular reduced Hessian falls
/// back to proximal-point iterations.
QpSolution solve_convex_qp(const ConvexQP& problem, const QpTolerances& tol = {});

class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(Eigen::Index rank, Eigen::Index rows);

  Eigen::Index rank() const { return rank_; }
  Eigen::Index rows() const { return rows_; }

 private:
  Eigen::Index rank_;
  Eigen::Index rows_;
};

/// z = A'(AA')^{-1} b, the minimum-norm solution of Az = b.
/// Throws RankDeficientError when A does not have full row rank.
RealVector least_norm_equality(const RealMatrix& A, const RealVector& b);

/// Complex counterpart used for m = A^H (A A^H)^{-1} b.
ComplexVector least_norm_equality(const ComplexMatrix& A, const ComplexVector& b);

}  // namespace numerics
}  // namespace airbeam
