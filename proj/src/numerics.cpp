#include "airbeam/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace airbeam::numerics {

RealVector embed_complex(const ComplexVector& m, const ComplexVector& x) {
  const Eigen::Index n = m.size();
  const Eigen::Index k = x.size();
  RealVector z(2 * n + 2 * k);
  z.segment(0, n) = m.real();
  z.segment(n, n) = m.imag();
  z.segment(2 * n, k) = x.real();
  z.segment(2 * n + k, k) = x.imag();
  return z;
}

std::pair<ComplexVector, ComplexVector> extract_complex(const RealVector& z, Eigen::Index n,
                                                        Eigen::Index k) {
  if (z.size() != 2 * n + 2 * k) {
    throw std::invalid_argument("extract_complex: embedding has wrong length");
  }
  ComplexVector m(n);
  ComplexVector x(k);
  for (Eigen::Index i = 0; i < n; ++i) m[i] = Complex(z[i], z[n + i]);
  for (Eigen::Index i = 0; i < k; ++i) x[i] = Complex(z[2 * n + i], z[2 * n + k + i]);
  return {m, x};
}

ConvexQP ConvexQP::with_dimension(Eigen::Index n) {
  ConvexQP p;
  p.Q = RealMatrix::Zero(n, n);
  p.c = RealVector::Zero(n);
  p.A = RealMatrix::Zero(0, n);
  p.b = RealVector::Zero(0);
  p.G = RealMatrix::Zero(0, n);
  p.g = RealVector::Zero(0);
  return p;
}

double ConvexQP::objective(const RealVector& z) const { return z.dot(Q * z) + c.dot(z); }

void ConvexQP::validate() const {
  const Eigen::Index n = Q.rows();
  if (n <= 0 || Q.cols() != n) throw std::invalid_argument("ConvexQP: Q must be square, n > 0");
  if (c.size() != n) throw std::invalid_argument("ConvexQP: c has wrong length");
  if (A.cols() != n || b.size() != A.rows()) throw std::invalid_argument("ConvexQP: bad (A, b)");
  if (G.cols() != n || g.size() != G.rows()) throw std::invalid_argument("ConvexQP: bad (G, g)");
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("ConvexQP: Q is not symmetric");
  }
  if (!Q.allFinite() || !c.allFinite() || !A.allFinite() || !b.allFinite() || !G.allFinite() ||
      !g.allFinite()) {
    throw std::invalid_argument("ConvexQP: non-finite data");
  }
}

const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::Optimal:
      return "optimal";
    case QpStatus::Infeasible:
      return "infeasible";
    case QpStatus::NumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

QpTolerances QpTolerances::loosened(double factor) const {
  QpTolerances t = *this;
  t.equality *= factor;
  t.inequality *= factor;
  t.objective *= factor;
  return t;
}

RankDeficientError::RankDeficientError(Eigen::Index rank, Eigen::Index rows)
    : std::runtime_error("least_norm_equality: A has rank " + std::to_string(rank) + " < " +
                         std::to_string(rows) + " rows"),
      rank_(rank),
      rows_(rows) {}

RealVector least_norm_equality(const RealMatrix& A, const RealVector& b) {
  if (b.size() != A.rows()) throw std::invalid_argument("least_norm_equality: size mismatch");
  Eigen::ColPivHouseholderQR<RealMatrix> qr(A.transpose());
  qr.setThreshold(1e-12);
  if (qr.rank() < A.rows()) throw RankDeficientError(qr.rank(), A.rows());
  const RealMatrix gram = A * A.transpose();
  return A.transpose() * gram.llt().solve(b);
}

ComplexVector least_norm_equality(const ComplexMatrix& A, const ComplexVector& b) {
  if (b.size() != A.rows()) throw std::invalid_argument("least_norm_equality: size mismatch");
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(A.adjoint());
  qr.setThreshold(1e-12);
  if (qr.rank() < A.rows()) throw RankDeficientError(qr.rank(), A.rows());
  const ComplexMatrix gram = A * A.adjoint();
  return A.adjoint() * gram.llt().solve(b);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class DualStatus { Optimal, Infeasible, Failure };

// Dual active-set method for
//   min 0.5 y'Hy + h'y   s.t.  C'y + c0 >= 0   (columns of C are unit normals)
// with H positive definite. Follows the Goldfarb-Idnani update scheme: the
// factor J = L^{-T} is kept orthogonalized against the active normals by
// Givens rotations and R is the triangular factor of the active set.
class DualActiveSet {
 public:
  DualActiveSet(const RealMatrix& H, const RealVector& h, const RealMatrix& C,
                const RealVector& c0)
      : H_(H), h_(h), C_(C), c0_(c0), n_(H.rows()), m_(C.cols()) {}

  DualStatus solve(double violation_tol, int max_iterations) {
    Eigen::LLT<RealMatrix> chol(H_);
    if (chol.info() != Eigen::Success) return DualStatus::Failure;
    const RealMatrix L = chol.matrixL();
    J_ = L.transpose().triangularView<Eigen::Upper>().solve(RealMatrix::Identity(n_, n_));
    y_ = -chol.solve(h_);
    R_ = RealMatrix::Zero(n_, n_);
    u_ = RealVector::Zero(n_ + 1);
    active_.assign(static_cast<std::size_t>(n_ + 1), -1);
    is_active_.assign(static_cast<std::size_t>(m_), false);
    iq_ = 0;
    r_norm_ = 1.0;
    const double j_scale = J_.squaredNorm() / static_cast<double>(n_);

    RealVector d(n_), z(n_), r(n_);
    RealVector s(m_);
    for (;;) {
      if (++iterations_ > max_iterations) return DualStatus::Failure;
      s = C_.transpose() * y_ + c0_;
      Eigen::Index ip = -1;
      double worst = -violation_tol;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (!is_active_[static_cast<std::size_t>(i)] && s[i] < worst) {
          worst = s[i];
          ip = i;
        }
      }
      if (ip < 0) return DualStatus::Optimal;

      const RealVector np = C_.col(ip);
      u_[iq_] = 0.0;
      active_[static_cast<std::size_t>(iq_)] = static_cast<int>(ip);
      double s_ip = s[ip];

      for (int inner = 0;; ++inner) {
        if (inner > 4 * (m_ + n_) + 16 || ++iterations_ > max_iterations) {
          return DualStatus::Failure;
        }
        d.noalias() = J_.transpose() * np;
        z.noalias() = J_.rightCols(n_ - iq_) * d.tail(n_ - iq_);
        if (iq_ > 0) {
          r.head(iq_) =
              R_.topLeftCorner(iq_, iq_).triangularView<Eigen::Upper>().solve(d.head(iq_));
        }

        double t1 = kInf;
        Eigen::Index drop = -1;
        for (Eigen::Index k = 0; k < iq_; ++k) {
          if (r[k] > 0.0 && u_[k] / r[k] < t1) {
            t1 = u_[k] / r[k];
            drop = active_[static_cast<std::size_t>(k)];
          }
        }
        const double ztn = z.dot(np);
        const double t2 = ztn > 1e-14 * j_scale ? -s_ip / ztn : kInf;
        const double t = std::min(t1, t2);
        if (!std::isfinite(t)) return DualStatus::Infeasible;

        if (!std::isfinite(t2)) {
          // Dual-only step: the new normal is (numerically) spanned by the
          // active set, so release the blocking constraint and retry.
          u_.head(iq_) -= t * r.head(iq_);
          u_[iq_] += t;
          remove(drop);
          continue;
        }

        y_ += t * z;
        u_.head(iq_) -= t * r.head(iq_);
        u_[iq_] += t;
        if (t == t2) {
          if (!add(d)) return DualStatus::Failure;
          is_active_[static_cast<std::size_t>(ip)] = true;
          break;
        }
        remove(drop);
        s_ip = C_.col(ip).dot(y_) + c0_[ip];
      }
    }
  }

  const RealVector& solution() const { return y_; }
  int iterations() const { return iterations_; }

 private:
  bool add(RealVector& d) {
    for (Eigen::Index j = n_ - 1; j >= iq_ + 1; --j) {
      double cc = d[j - 1];
      double ss = d[j];
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      d[j] = 0.0;
      ss /= h;
      cc /= h;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d[j - 1] = -h;
      } else {
        d[j - 1] = h;
      }
      const double xny = ss / (1.0 + cc);
      for (Eigen::Index k = 0; k < n_; ++k) {
        const double a = J_(k, j - 1);
        const double b = J_(k, j);
        J_(k, j - 1) = a * cc + b * ss;
        J_(k, j) = xny * (a + J_(k, j - 1)) - b;
      }
    }
    ++iq_;
    R_.col(iq_ - 1).head(iq_) = d.head(iq_);
    if (std::abs(d[iq_ - 1]) <= 1e-14 * r_norm_) return false;
    r_norm_ = std::max(r_norm_, std::abs(d[iq_ - 1]));
    return true;
  }

  void remove(Eigen::Index constraint) {
    Eigen::Index qq = -1;
    for (Eigen::Index i = 0; i < iq_; ++i) {
      if (active_[static_cast<std::size_t>(i)] == constraint) {
        qq = i;
        break;
      }
    }
    if (qq < 0) return;
    is_active_[static_cast<std::size_t>(constraint)] = false;
    for (Eigen::Index i = qq; i < iq_ - 1; ++i) {
      active_[static_cast<std::size_t>(i)] = active_[static_cast<std::size_t>(i + 1)];
      u_[i] = u_[i + 1];
      R_.col(i) = R_.col(i + 1);
    }
    active_[static_cast<std::size_t>(iq_ - 1)] = active_[static_cast<std::size_t>(iq_)];
    u_[iq_ - 1] = u_[iq_];
    active_[static_cast<std::size_t>(iq_)] = -1;
    u_[iq_] = 0.0;
    R_.col(iq_ - 1).head(iq_).setZero();
    --iq_;
    if (iq_ == 0) return;
    for (Eigen::Index j = qq; j < iq_; ++j) {
      double cc = R_(j, j);
      double ss = R_(j + 1, j);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      cc /= h;
      ss /= h;
      R_(j + 1, j) = 0.0;
      if (cc < 0.0) {
        R_(j, j) = -h;
        cc = -cc;
        ss = -ss;
      } else {
        R_(j, j) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (Eigen::Index k = j + 1; k < iq_; ++k) {
        const double a = R_(j, k);
        const double b = R_(j + 1, k);
        R_(j, k) = a * cc + b * ss;
        R_(j + 1, k) = xny * (a + R_(j, k)) - b;
      }
      for (Eigen::Index k = 0; k < n_; ++k) {
        const double a = J_(k, j);
        const double b = J_(k, j + 1);
        J_(k, j) = a * cc + b * ss;
        J_(k, j + 1) = xny * (J_(k, j) + a) - b;
      }
    }
  }

  const RealMatrix& H_;
  const RealVector& h_;
  const RealMatrix& C_;
  const RealVector& c0_;
  Eigen::Index n_;
  Eigen::Index m_;

  RealMatrix J_;
  RealMatrix R_;
  RealVector y_;
  RealVector u_;
  std::vector<int> active_;
  std::vector<bool> is_active_;
  Eigen::Index iq_ = 0;
  double r_norm_ = 1.0;
  int iterations_ = 0;
};

QpSolution finish(const ConvexQP& p, RealVector z, int iterations, const QpTolerances& tol) {
  QpSolution sol;
  sol.iterations = iterations;
  sol.equality_residual = p.A.rows() > 0 ? (p.A * z - p.b).cwiseAbs().maxCoeff() : 0.0;
  sol.inequality_residual =
      p.G.rows() > 0 ? std::max(0.0, (p.G * z - p.g).maxCoeff()) : 0.0;
  sol.objective = p.objective(z);
  sol.z = std::move(z);

  double eq_scale = 1.0;
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) eq_scale = std::max(eq_scale, p.A.row(i).norm());
  double in_scale = 1.0;
  for (Eigen::Index i = 0; i < p.G.rows(); ++i) in_scale = std::max(in_scale, p.G.row(i).norm());
  const bool ok = std::isfinite(sol.objective) &&
                  sol.equality_residual <= tol.equality * eq_scale &&
                  sol.inequality_residual <= tol.inequality * in_scale;
  sol.status = ok ? QpStatus::Optimal : QpStatus::NumericalFailure;
  return sol;
}

}  // namespace

QpSolution solve_convex_qp(const ConvexQP& p, const QpTolerances& tol) {
  p.validate();
  const Eigen::Index n = p.dimension();

  // Affine parametrization z = z0 + Z y of {z : Az = b}.
  RealVector z0 = RealVector::Zero(n);
  RealMatrix Z = RealMatrix::Identity(n, n);
  if (p.A.rows() > 0) {
    Eigen::ColPivHouseholderQR<RealMatrix> qr(p.A.transpose());
    qr.setThreshold(1e-12);
    const Eigen::Index rank = qr.rank();
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(p.A);
    cod.setThreshold(1e-12);
    z0 = cod.solve(p.b);
    const double b_scale = std::max(1.0, p.b.cwiseAbs().maxCoeff());
    if ((p.A * z0 - p.b).cwiseAbs().maxCoeff() > tol.equality * b_scale) {
      QpSolution sol;
      sol.status = QpStatus::Infeasible;
      return sol;
    }
    const RealMatrix Qfull = qr.householderQ();
    Z = Qfull.rightCols(n - rank);
  }
  const Eigen::Index r = Z.cols();
  if (r == 0) return finish(p, z0, 0, tol);

  // Reduced problem in GI form: min 0.5 y'Hy + h'y, C'y + c0 >= 0.
  const RealMatrix H = 2.0 * Z.transpose() * p.Q * Z;
  const RealVector h = Z.transpose() * (2.0 * p.Q * z0 + p.c);

  std::vector<Eigen::Index> kept;
  RealMatrix C(r, p.G.rows());
  RealVector c0(p.G.rows());
  for (Eigen::Index i = 0; i < p.G.rows(); ++i) {
    const RealVector row = -(p.G.row(i) * Z).transpose();
    const double slack = p.g[i] - p.G.row(i).dot(z0);
    const double norm = row.norm();
    const double row_scale = std::max(1.0, p.G.row(i).norm());
    if (norm <= 1e-13 * row_scale) {
      // Constant on the affine subspace.
      if (slack < -tol.inequality * row_scale) {
        QpSolution sol;
        sol.status = QpStatus::Infeasible;
        return sol;
      }
      continue;
    }
    C.col(static_cast<Eigen::Index>(kept.size())) = row / norm;
    c0[static_cast<Eigen::Index>(kept.size())] = slack / norm;
    kept.push_back(i);
  }
  const auto mk = static_cast<Eigen::Index>(kept.size());
  const RealMatrix Ck = C.leftCols(mk);
  const RealVector c0k = c0.head(mk);

  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(H, Eigen::EigenvaluesOnly);
  const double lmax = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  const double lmin = eig.eigenvalues().minCoeff();
  const double viol = 0.1 * tol.inequality;

  if (lmax > 0.0 && lmin > 1e-10 * lmax) {
    DualActiveSet gi(H, h, Ck, c0k);
    const DualStatus st = gi.solve(viol, tol.max_iterations);
    if (st == DualStatus::Infeasible) {
      QpSolution sol;
      sol.status = QpStatus::Infeasible;
      sol.iterations = gi.iterations();
      return sol;
    }
    if (st == DualStatus::Failure) {
      QpSolution sol;
      sol.status = QpStatus::NumericalFailure;
      sol.iterations = gi.iterations();
      return sol;
    }
    return finish(p, z0 + Z * gi.solution(), gi.iterations(), tol);
  }

  // Singular reduced Hessian: proximal-point outer loop, each subproblem
  // strictly convex.
  const double rho = std::max(1e-3 * lmax, 1e-6);
  const RealMatrix Hp = H + rho * RealMatrix::Identity(r, r);
  RealVector y = RealVector::Zero(r);
  double previous = kInf;
  int total = 0;
  for (int outer = 0; outer < tol.max_iterations; ++outer) {
    const RealVector hp = h - rho * y;
    DualActiveSet gi(Hp, hp, Ck, c0k);
    const DualStatus st = gi.solve(viol, tol.max_iterations);
    total += gi.iterations();
    if (st != DualStatus::Optimal) {
      QpSolution sol;
      sol.status = st == DualStatus::Infeasible ? QpStatus::Infeasible : QpStatus::NumericalFailure;
      sol.iterations = total;
      return sol;
    }
    const RealVector next = gi.solution();
    const double step = (next - y).norm();
    y = next;
    const double f = 0.5 * y.dot(H * y) + h.dot(y);
    if (!std::isfinite(f) || y.norm() > 1e12) break;  // unbounded below
    if (step <= 1e-12 * (1.0 + y.norm()) &&
        std::abs(previous - f) <= tol.objective * (1.0 + std::abs(f))) {
      return finish(p, z0 + Z * y, total, tol);
    }
    previous = f;
  }
  QpSolution sol;
  sol.status = QpStatus::NumericalFailure;
  sol.iterations = total;
  return sol;
}

}  // namespace airbeam::numerics
