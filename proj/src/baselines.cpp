#include "airbeam/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <omp.h>

#include "airbeam/numerics.hpp"
#include "airbeam/random.hpp"

namespace airbeam::baselines {

ComplexVector matched_filter_beamformer(const ChannelSet& H) {
  const ComplexMatrix& h = H.matrix();
  ComplexVector m = ComplexVector::Zero(H.antennas());
  for (Eigen::Index k = 0; k < H.devices(); ++k) m += h.col(k) / h.col(k).squaredNorm();
  if (H.min_gain_modulus(m) < 1e-9) {
    Eigen::JacobiSVD<ComplexMatrix> svd(h, Eigen::ComputeThinU);
    m = svd.matrixU().col(0);
  }
  return scale_to_feasible(H, m);
}

// ---------------------------------------------------------------------------
// SDP barrier solver

namespace {

struct Term {
  Eigen::Index p;
  Eigen::Index q;
  Complex coef;
};

// Real basis of N x N Hermitian matrices: E_ii, E_ij + E_ji, j(E_ij - E_ji).
std::vector<std::vector<Term>> hermitian_basis(Eigen::Index n) {
  std::vector<std::vector<Term>> basis;
  basis.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i) basis.push_back({{i, i, 1.0}});
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      basis.push_back({{i, j, 1.0}, {j, i, 1.0}});
      basis.push_back({{i, j, Complex(0, 1)}, {j, i, Complex(0, -1)}});
    }
  }
  return basis;
}

class BarrierSdp {
 public:
  explicit BarrierSdp(const ComplexMatrix& h)
      : h_(h), n_(h.rows()), k_(h.cols()), basis_(hermitian_basis(n_)) {
    const auto nv = static_cast<Eigen::Index>(basis_.size());
    // c_k[a] = h_k^H B_a h_k
    constraint_.resize(k_, nv);
    for (Eigen::Index k = 0; k < k_; ++k) {
      for (Eigen::Index a = 0; a < nv; ++a) {
        Complex acc = 0.0;
        for (const Term& t : basis_[static_cast<std::size_t>(a)]) {
          acc += t.coef * std::conj(h_(t.p, k)) * h_(t.q, k);
        }
        constraint_(k, a) = acc.real();
      }
    }
    trace_.resize(nv);
    for (Eigen::Index a = 0; a < nv; ++a) {
      double acc = 0.0;
      for (const Term& t : basis_[static_cast<std::size_t>(a)]) {
        if (t.p == t.q) acc += t.coef.real();
      }
      trace_[a] = acc;
    }
  }

  ComplexMatrix to_matrix(const RealVector& v) const {
    ComplexMatrix M = ComplexMatrix::Zero(n_, n_);
    for (std::size_t a = 0; a < basis_.size(); ++a) {
      for (const Term& t : basis_[a]) M(t.p, t.q) += v[static_cast<Eigen::Index>(a)] * t.coef;
    }
    return M;
  }

  // Barrier value at v, or +inf outside the domain.
  double value(const RealVector& v, double t) const {
    const ComplexMatrix M = to_matrix(v);
    Eigen::LLT<ComplexMatrix> llt(M);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const RealVector s = constraint_ * v - RealVector::Ones(k_);
    if ((s.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double d = llt.matrixLLT()(i, i).real();
      if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
      logdet += 2.0 * std::log(d);
    }
    return t * trace_.dot(v) - s.array().log().sum() - logdet;
  }

  // Newton direction and decrement squared at v.
  RealVector newton_step(const RealVector& v, double t, double& decrement) const {
    const auto nv = static_cast<Eigen::Index>(basis_.size());
    const ComplexMatrix M = to_matrix(v);
    const ComplexMatrix W = M.llt().solve(ComplexMatrix::Identity(n_, n_));
    const RealVector s = constraint_ * v - RealVector::Ones(k_);
    const RealVector inv_s = s.cwiseInverse();

    RealVector grad = t * trace_ - constraint_.transpose() * inv_s;
    for (Eigen::Index a = 0; a < nv; ++a) {
      double acc = 0.0;
      for (const Term& tm : basis_[static_cast<std::size_t>(a)]) {
        acc += (tm.coef * W(tm.q, tm.p)).real();
      }
      grad[a] -= acc;
    }

    const RealMatrix scaled = inv_s.asDiagonal() * constraint_;
    RealMatrix hess = scaled.transpose() * scaled;
    for (Eigen::Index a = 0; a < nv; ++a) {
      for (Eigen::Index b = a; b < nv; ++b) {
        Complex acc = 0.0;
        for (const Term& x : basis_[static_cast<std::size_t>(a)]) {
          for (const Term& y : basis_[static_cast<std::size_t>(b)]) {
            // tr(W E_pq W E_rs) = W_sp W_qr
            acc += x.coef * y.coef * W(y.q, x.p) * W(x.q, y.p);
          }
        }
        hess(a, b) += acc.real();
        if (b != a) hess(b, a) = hess(a, b);
      }
    }
    Eigen::LDLT<RealMatrix> ldlt(hess);
    if (ldlt.info() != Eigen::Success) throw std::runtime_error("solve_sdp: singular Newton system");
    RealVector step = -ldlt.solve(grad);
    decrement = -grad.dot(step);
    return step;
  }

  RealVector initial_point() const {
    const double min_norm = h_.colwise().squaredNorm().minCoeff();
    RealVector v = RealVector::Zero(static_cast<Eigen::Index>(basis_.size()));
    v.head(n_).setConstant(2.0 / min_norm);
    return v;
  }

  Eigen::Index constraints() const { return k_; }
  Eigen::Index order() const { return n_; }
  double trace(const RealVector& v) const { return trace_.dot(v); }

 private:
  const ComplexMatrix& h_;
  Eigen::Index n_;
  Eigen::Index k_;
  std::vector<std::vector<Term>> basis_;
  RealMatrix constraint_;
  RealVector trace_;
};

}  // namespace

constexpr int kCenteringSteps = 50;

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
  const ComplexMatrix& h = problem.channels;
  if (h.rows() <= 0 || h.cols() <= 0) throw std::invalid_argument("solve_sdp: empty problem");
  BarrierSdp sdp(h);
  RealVector v = sdp.initial_point();
  const double barrier_degree = static_cast<double>(sdp.constraints() + sdp.order());
  double t = barrier_degree / std::max(sdp.trace(v), 1e-300);
  int steps = 0;
  for (;;) {
    // Centering. Near the center at large t the barrier value is dominated
    // by t tr(M) and its decrease drowns in rounding, so the decrement test is
    // complemented by a per-centering step cap.
    for (int inner = 0; inner < kCenteringSteps; ++inner) {
      if (++steps > options.max_newton_steps) {
        throw std::runtime_error("solve_sdp: Newton iteration limit reached");
      }
      double decrement = 0.0;
      const RealVector dv = sdp.newton_step(v, t, decrement);
      if (decrement * 0.5 <= 1e-9) break;
      const double f0 = sdp.value(v, t);
      double alpha = 1.0;
      while (alpha > 1e-14) {
        const double f1 = sdp.value(v + alpha * dv, t);
        if (f1 <= f0 - 0.25 * alpha * decrement) break;
        alpha *= 0.5;
      }
      if (alpha <= 1e-14) break;
      v += alpha * dv;
    }
    if (barrier_degree / t <= options.gap_tolerance * std::max(1.0, sdp.trace(v))) break;
    t *= 10.0;
  }
  SdpSolution sol;
  sol.M = sdp.to_matrix(v);
  sol.objective = sdp.trace(v);
  sol.newton_steps = steps;
  return sol;
}

SdrResult sdr_beamformer(const ChannelSet& H, const SdrOptions& options) {
  if (options.randomizations < 1) throw std::invalid_argument("sdr_beamformer: randomizations < 1");
  const double scale = 1.0 / H.max_column_norm();
  const ChannelSet unit = H.scaled(scale);

  const SdpSolution sdp = solve_sdp(SdpProblem{unit.matrix()}, options.sdp);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sdp.M);
  const RealVector lambda = eig.eigenvalues().cwiseMax(0.0);  // ascending
  const ComplexMatrix& V = eig.eigenvectors();
  const Eigen::Index n = lambda.size();

  SdrResult result;
  result.sdp_objective = sdp.objective * scale * scale;
  const double l1 = lambda[n - 1];
  const double l2 = n > 1 ? lambda[n - 2] : 0.0;
  result.rank_one = l1 > 0.0 && l2 / l1 <= options.rank_one_ratio;

  // Candidates whose weakest gain is negligible relative to their norm would
  // blow up when rescaled; they are skipped.
  auto usable = [&](const ComplexVector& v) {
    return unit.min_gain_modulus(v) > 1e-12 * v.norm();
  };
  ComplexVector best;
  double best_objective = std::numeric_limits<double>::infinity();
  if (usable(V.col(n - 1))) {
    best = scale_to_feasible(unit, V.col(n - 1));
    best_objective = best.squaredNorm();
  }
  if (!result.rank_one) {
    // Each draw r ~ CN(0, I) gives two candidates V Lambda^{1/2} r and
    // V Lambda^{1/2} (r / |r|) (unit-modulus entries). Draws are made serially
    // so the candidate set does not depend on the thread count.
    const ComplexMatrix factor = V * lambda.cwiseSqrt().asDiagonal();
    const int count = 2 * options.randomizations;
    ComplexMatrix draws(n, count);
    Rng rng(options.seed);
    for (int c = 0; c < count; c += 2) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex r = complex_gaussian(rng);
        draws(i, c) = r;
        draws(i, c + 1) = std::abs(r) > 0.0 ? r / std::abs(r) : Complex(1.0, 0.0);
      }
    }
    std::vector<double> objective(static_cast<std::size_t>(count),
                                  std::numeric_limits<double>::infinity());
    std::vector<ComplexVector> candidate(static_cast<std::size_t>(count));
    auto evaluate = [&](int c) {
      const ComplexVector xi = factor * draws.col(c);
      if (!usable(xi)) return;
      candidate[static_cast<std::size_t>(c)] = scale_to_feasible(unit, xi);
      objective[static_cast<std::size_t>(c)] = candidate[static_cast<std::size_t>(c)].squaredNorm();
    };
    if (options.threads <= 1) {
      for (int c = 0; c < count; ++c) evaluate(c);
    } else {
#pragma omp parallel for num_threads(options.threads) schedule(static)
      for (int c = 0; c < count; ++c) evaluate(c);
    }
    // Ties resolve to the lowest index.
    for (int c = 0; c < count; ++c) {
      if (objective[static_cast<std::size_t>(c)] < best_objective) {
        best_objective = objective[static_cast<std::size_t>(c)];
        best = candidate[static_cast<std::size_t>(c)];
      }
    }
  }
  // Nothing usable (degenerate relaxation): fall back to the matched filter.
  if (best.size() == 0) best = matched_filter_beamformer(unit);
  result.m = best * scale;
  result.objective = result.m.squaredNorm();
  return result;
}

// ---------------------------------------------------------------------------
// SCA

BeamformerResult sca_beamformer(const ChannelSet& H, const ComplexVector& initial,
                                const ScaOptions& options) {
  if (initial.size() != H.antennas() || initial.squaredNorm() == 0.0) {
    throw std::invalid_argument("sca_beamformer: initial point must be a nonzero N-vector");
  }
  const double scale = 1.0 / H.max_column_norm();
  const ChannelSet unit = H.scaled(scale);
  const ComplexMatrix& h = unit.matrix();
  const Eigen::Index n = unit.antennas();
  const Eigen::Index k = unit.devices();

  ComplexVector current = scale_to_feasible(unit, initial / scale);
  double current_objective = current.squaredNorm();
  BeamformerResult result;

  numerics::ConvexQP qp = numerics::ConvexQP::with_dimension(2 * n);
  qp.Q.setIdentity();
  qp.G.resize(k, 2 * n);
  qp.g.resize(k);

  for (int round = 1; round <= options.max_rounds; ++round) {
    result.rounds = round;
    // 2 Re{conj(a_t) h^H m} >= 1 + |a_t|^2 with a_t = h^H m_t; written as
    // -row . z <= -(1 + |a_t|^2) over z = [Re m; Im m].
    for (Eigen::Index i = 0; i < k; ++i) {
      const Complex at = h.col(i).dot(current);  // h^H m_t
      for (Eigen::Index j = 0; j < n; ++j) {
        const double hr = h(j, i).real();
        const double hi = h(j, i).imag();
        qp.G(i, j) = -2.0 * (at.real() * hr - at.imag() * hi);
        qp.G(i, n + j) = -2.0 * (at.real() * hi + at.imag() * hr);
      }
      qp.g[i] = -(1.0 + std::norm(at));
    }
    const numerics::QpSolution sol = numerics::solve_convex_qp(qp);
    if (!sol.optimal()) break;
    ComplexVector next(n);
    for (Eigen::Index j = 0; j < n; ++j) next[j] = Complex(sol.z[j], sol.z[n + j]);
    if (unit.min_gain_modulus(next) <= 1e-300) break;
    next = scale_to_feasible(unit, next);
    const double next_objective = next.squaredNorm();
    const double change = current_objective - next_objective;
    if (next_objective < current_objective) {
      current = next;
      current_objective = next_objective;
    }
    if (std::abs(change) <= options.tolerance * current_objective) break;
  }
  result.m = current * scale;
  result.objective = result.m.squaredNorm();
  return result;
}

BeamformerResult sca_beamformer(const ChannelSet& H, const ScaOptions& options) {
  return sca_beamformer(H, matched_filter_beamformer(H), options);
}

}  // namespace airbeam::baselines
