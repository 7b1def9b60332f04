#include "airbeam/bnb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include <omp.h>

#include "airbeam/baselines.hpp"

namespace airbeam::bnb {

using geometry::SectorBox;

numerics::ConvexQP relaxation_qp(const SectorBox& box, const ChannelSet& H) {
  const Eigen::Index n = H.antennas();
  const Eigen::Index k = H.devices();
  if (static_cast<Eigen::Index>(box.size()) != k) {
    throw std::invalid_argument("relaxation_qp: box has wrong number of sectors");
  }
  const Eigen::Index dim = 2 * n + 2 * k;
  const Eigen::Index xr = 2 * n;  // offset of Re x
  const Eigen::Index xi = 2 * n + k;
  const ComplexMatrix& h = H.matrix();

  numerics::ConvexQP qp = numerics::ConvexQP::with_dimension(dim);
  qp.Q.topLeftCorner(2 * n, 2 * n).setIdentity();

  // x_k - m^H h_k = 0, with m^H h_k = sum_j (mr hr + mi hi) + j (mr hi - mi hr).
  qp.A = RealMatrix::Zero(2 * k, dim);
  qp.b = RealVector::Zero(2 * k);
  for (Eigen::Index d = 0; d < k; ++d) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double hr = h(j, d).real();
      const double hi = h(j, d).imag();
      qp.A(d, j) = -hr;
      qp.A(d, n + j) = -hi;
      qp.A(k + d, j) = -hi;
      qp.A(k + d, n + j) = hr;
    }
    qp.A(d, xr + d) = 1.0;
    qp.A(k + d, xi + d) = 1.0;
  }

  std::vector<std::pair<Eigen::Index, geometry::HalfPlane>> cuts;
  for (std::size_t d = 0; d < box.size(); ++d) {
    for (const geometry::HalfPlane& hp : geometry::hull_constraints(box[d])) {
      cuts.emplace_back(static_cast<Eigen::Index>(d), hp);
    }
  }
  qp.G = RealMatrix::Zero(static_cast<Eigen::Index>(cuts.size()), dim);
  qp.g = RealVector::Zero(static_cast<Eigen::Index>(cuts.size()));
  for (std::size_t r = 0; r < cuts.size(); ++r) {
    const auto& [d, hp] = cuts[r];
    const auto row = static_cast<Eigen::Index>(r);
    qp.G(row, xr + d) = -hp.normal.real();
    qp.G(row, xi + d) = -hp.normal.imag();
    qp.g[row] = -hp.offset;
  }
  return qp;
}

NodeBound node_lower_bound(const SectorBox& box, const ChannelSet& H,
                           const numerics::QpTolerances& tol) {
  const numerics::QpSolution sol = numerics::solve_convex_qp(relaxation_qp(box, H), tol);
  NodeBound out;
  switch (sol.status) {
    case numerics::QpStatus::Infeasible:
      out.status = BoundStatus::Infeasible;
      return out;
    case numerics::QpStatus::NumericalFailure:
      out.status = BoundStatus::NumericalFailure;
      return out;
    case numerics::QpStatus::Optimal:
      break;
  }
  auto [m, x] = numerics::extract_complex(sol.z, H.antennas(), H.devices());
  out.status = BoundStatus::Bounded;
  out.lower = std::max(0.0, sol.objective);
  out.m = std::move(m);
  out.x = std::move(x);
  return out;
}

std::optional<Incumbent> node_upper_bound(const ComplexVector& m, const ComplexVector& x,
                                          const SectorBox& box, const ChannelSet& H) {
  if (x.size() != H.devices() || static_cast<Eigen::Index>(box.size()) != H.devices()) {
    throw std::invalid_argument("node_upper_bound: dimension mismatch");
  }
  double mu = 1.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) mu = std::min(mu, std::abs(x[k]));
  if (mu <= 1e-6) return std::nullopt;
  // Guard against the relaxation's equality residual: the scaling is applied
  // to the gains m^H h_k actually produced by m.
  mu = std::min(mu, H.min_gain_modulus(m));
  if (mu <= 1e-6) return std::nullopt;
  Incumbent inc;
  inc.m = m / mu;
  inc.upper = inc.m.squaredNorm();
  if (!is_feasible(H, inc.m, 1e-9)) {
    throw std::logic_error("node_upper_bound: scaled point is infeasible");
  }
  return inc;
}

std::size_t select_branch_device(const ComplexVector& x) {
  if (x.size() == 0) throw std::invalid_argument("select_branch_device: empty vector");
  std::size_t best = 0;
  double best_modulus = std::abs(x[0]);
  for (Eigen::Index k = 1; k < x.size(); ++k) {
    const double v = std::abs(x[k]);
    if (v < best_modulus) {
      best_modulus = v;
      best = static_cast<std::size_t>(k);
    }
  }
  return best;
}

std::uint64_t iteration_budget(double epsilon, std::size_t devices) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("iteration_budget: epsilon must be > 0");
  const double base = geometry::kTwoPi / std::acos(1.0 / std::sqrt(1.0 + epsilon));
  const double v = std::pow(base, static_cast<double>(devices));
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (!std::isfinite(v) || v >= 1.8e19) return kMax;
  // Snap values that are integers up to rounding (e.g. 8^K for eps = 1).
  const double nearest = std::round(v);
  const double count = std::abs(v - nearest) <= 1e-9 * std::max(1.0, v) ? nearest : std::ceil(v);
  return static_cast<std::uint64_t>(count) + 1;
}

const char* to_string(SolveStatus status) {
  return status == SolveStatus::Converged ? "converged" : "iteration-capped";
}

double SolveReport::relative_gap() const {
  if (global_lower <= 0.0) return std::numeric_limits<double>::infinity();
  return (global_upper - global_lower) / global_lower;
}

namespace {

struct Node {
  SectorBox box;
  double lower = 0.0;
  ComplexVector m;
  ComplexVector x;
  bool resolved = false;  // false: bound inherited after a numerical failure
  std::uint64_t sequence = 0;
};

struct LaterFirst {
  bool operator()(const Node& a, const Node& b) const {
    if (a.lower != b.lower) return a.lower > b.lower;
    return a.sequence > b.sequence;
  }
};

constexpr double kPruneFactor = 1.0 - 1e-12;

NodeBound bound_with_retry(const SectorBox& box, const ChannelSet& H,
                           const numerics::QpTolerances& tol) {
  NodeBound b = node_lower_bound(box, H, tol);
  if (b.status == BoundStatus::NumericalFailure) b = node_lower_bound(box, H, tol.loosened(10.0));
  return b;
}

}  // namespace

SolveReport solve_global(const ChannelSet& H, const SolveOptions& options) {
  if (!(options.epsilon > 0.0)) throw std::invalid_argument("solve_global: epsilon must be > 0");
  for (Eigen::Index k = 0; k < H.devices(); ++k) {
    if (H.column(k).squaredNorm() == 0.0) {
      throw std::invalid_argument("solve_global: zero channel, instance infeasible");
    }
  }
  const double scale = 1.0 / H.max_column_norm();
  const ChannelSet unit = H.scaled(scale);
  const auto devices = static_cast<std::size_t>(unit.devices());
  const std::uint64_t max_iterations =
      options.max_iterations > 0
          ? options.max_iterations
          : std::min<std::uint64_t>(iteration_budget(options.epsilon, devices), 1'000'000);

  SolveReport report;
  ComplexVector best_m = baselines::matched_filter_beamformer(unit);
  double upper = best_m.squaredNorm();

  std::priority_queue<Node, std::vector<Node>, LaterFirst> queue;
  std::uint64_t sequence = 0;
  {
    SectorBox root = SectorBox::root(devices);
    root.sectors[0] = geometry::Sector(0.0, options.reference_sector_width);
    NodeBound rb = bound_with_retry(root, unit, options.qp);
    Node node{std::move(root), 0.0, {}, {}, false, sequence++};
    if (rb.status == BoundStatus::Bounded) {
      node.lower = rb.lower;
      node.m = std::move(rb.m);
      node.x = std::move(rb.x);
      node.resolved = true;
    }
    queue.push(std::move(node));
    report.node_count = 1;
  }

  double lower = queue.top().lower;
  std::uint64_t t = 0;
  for (;;) {
    while (!queue.empty() && queue.top().lower >= upper * kPruneFactor) queue.pop();
    const double frontier = queue.empty() ? upper : queue.top().lower;
    lower = std::max(lower, std::min(frontier, upper));
    report.bound_trace.push_back({t, lower, upper});

    if (queue.empty() || (lower > 0.0 && (upper - lower) / lower <= options.epsilon)) {
      report.status = SolveStatus::Converged;
      break;
    }
    if (t >= max_iterations) {
      report.status = SolveStatus::IterationCapped;
      break;
    }

    Node parent = queue.top();
    queue.pop();
    const std::size_t k = parent.resolved ? select_branch_device(parent.x) : parent.box.widest();
    auto [left, right] = geometry::split_box(parent.box, k);
    SectorBox boxes[2] = {std::move(left), std::move(right)};
    NodeBound bounds[2];
    if (options.threads > 1) {
#pragma omp parallel for num_threads(2) schedule(static, 1)
      for (int c = 0; c < 2; ++c) bounds[c] = bound_with_retry(boxes[c], unit, options.qp);
    } else {
      for (int c = 0; c < 2; ++c) bounds[c] = bound_with_retry(boxes[c], unit, options.qp);
    }

    for (int c = 0; c < 2; ++c) {
      NodeBound& b = bounds[c];
      if (b.status == BoundStatus::Infeasible) continue;
      Node child{std::move(boxes[c]), parent.lower, {}, {}, false, sequence++};
      if (b.status == BoundStatus::Bounded) {
        // A child's feasible set is contained in its parent's.
        child.lower = std::max(b.lower, parent.lower);
        child.resolved = true;
        if (auto inc = node_upper_bound(b.m, b.x, child.box, unit); inc && inc->upper < upper) {
          upper = inc->upper;
          best_m = std::move(inc->m);
        }
        child.m = std::move(b.m);
        child.x = std::move(b.x);
      } else {
        ++report.numerical_failures;
      }
      if (child.lower < upper * kPruneFactor) queue.push(std::move(child));
    }
    report.node_count += 2;
    ++t;
  }

  if (options.polish) {
    baselines::ScaOptions sca;
    sca.tolerance = 1e-12;
    const baselines::BeamformerResult polished = baselines::sca_beamformer(unit, best_m, sca);
    if (polished.objective < upper && is_feasible(unit, polished.m, 1e-12)) {
      upper = polished.objective;
      best_m = polished.m;
    }
  }

  const double s2 = scale * scale;
  report.iterations = t;
  report.optimal_m = best_m * scale;
  report.objective = report.optimal_m.squaredNorm();
  report.global_upper = upper * s2;
  report.global_lower = std::min(lower, upper) * s2;
  for (BoundPoint& p : report.bound_trace) {
    p.lower *= s2;
    p.upper *= s2;
  }
  return report;
}

}  // namespace airbeam::bnb
