// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "airbeam/aircomp.hpp"
#include "airbeam/baselines.hpp"
#include "airbeam/bnb.hpp"
#include "airbeam/random.hpp"
#include "airbeam/sim.hpp"

using namespace airbeam;

namespace {

constexpr std::uint64_t kMasterSeed = 20240601;

int failures = 0;
auto last_report = std::chrono::steady_clock::now();

void report(int id, bool ok, const std::string& detail) {
  const auto now = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(now - last_report).count();
  last_report = now;
  std::printf("criterion %d: %s  %s [%.1f s]\n", id, ok ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

bool monotone(const bnb::SolveReport& r) {
  for (std::size_t t = 1; t < r.bound_trace.size(); ++t) {
    if (r.bound_trace[t].lower < r.bound_trace[t - 1].lower) return false;
    if (r.bound_trace[t].upper > r.bound_trace[t - 1].upper) return false;
  }
  return true;
}

struct Instance {
  int n, k;
  ChannelSet H;
};

std::vector<Instance> criterion1_instances() {
  std::vector<Instance> out;
  std::uint64_t index = 0;
  for (int n : {2, 4}) {
    for (int k : {2, 3, 4, 6}) {
      for (int r = 0; r < 25; ++r, ++index) {
        out.push_back({n, k, sim::unit_rician_channels(n, k, 3.0, derive_seed(kMasterSeed, {1, index}))});
      }
    }
  }
  return out;
}

// Criteria 1, 4 (traces) and 5 share the same 200 instances.
void certified_optimality(bool& traces_ok) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<Instance> instances = criterion1_instances();
  int converged = 0;
  double worst_gap = 0.0;
  double worst_sca = -std::numeric_limits<double>::infinity();
  double worst_sdr = worst_sca;
  double worst_sdp = worst_sca;
  bool feasible = true;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const ChannelSet& H = instances[i].H;
    const bnb::SolveReport r = bnb::solve_global(H);
    if (r.status == bnb::SolveStatus::Converged && r.relative_gap() <= 1e-5) ++converged;
    worst_gap = std::max(worst_gap, r.relative_gap());
    traces_ok = traces_ok && monotone(r);
    feasible = feasible && is_feasible(H, r.optimal_m, 1e-9);

    const baselines::BeamformerResult sca = baselines::sca_beamformer(H);
    baselines::SdrOptions so;
    so.seed = derive_seed(kMasterSeed, {5, i});
    const baselines::SdrResult sdr = baselines::sdr_beamformer(H, so);
    feasible = feasible && is_feasible(H, sca.m, 1e-9) && is_feasible(H, sdr.m, 1e-9);
    worst_sca = std::max(worst_sca, r.objective - sca.objective);
    worst_sdr = std::max(worst_sdr, r.objective - sdr.objective);
    worst_sdp = std::max(worst_sdp, sdr.sdp_objective - r.objective);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(1, converged == 200 && seconds < 600.0,
         fmt("%.0f/200 converged, max gap %.3g, %.1f s (incl. baselines)", converged, worst_gap,
             seconds));
  const double tol = 1e-7;
  report(5, feasible && worst_sca <= tol && worst_sdr <= tol && worst_sdp <= tol,
         fmt("max(BnB-SCA) %.3g, max(BnB-SDR) %.3g, max(SDP-BnB) %.3g, all feasible=%.0f", worst_sca,
             worst_sdr, worst_sdp, feasible ? 1 : 0));
}

void closed_forms() {
  int checked = 0;
  int passed = 0;
  double worst = 0.0;
  int certified = 0;
  auto check = [&](const ChannelSet& H, double expected) {
    const bnb::SolveReport r = bnb::solve_global(H);
    ++checked;
    certified += r.status == bnb::SolveStatus::Converged ? 1 : 0;
    const double rel = std::abs(r.objective - expected) / expected;
    worst = std::max(worst, rel);
    if (rel <= 1e-6) ++passed;
  };
  Rng rng(derive_seed(kMasterSeed, {2}));
  for (int i = 0; i < 10; ++i) {
    const int n = 1 + i % 6;
    const ChannelSet H = sim::unit_rician_channels(n, 1, 3.0, derive_seed(kMasterSeed, {2, 1, std::uint64_t(i)}));
    check(H, 1.0 / H.column(0).squaredNorm());
  }
  for (int i = 0; i < 10; ++i) {
    const int k = 2 + i % 6;
    const ChannelSet H = sim::unit_rician_channels(1, k, 3.0, derive_seed(kMasterSeed, {2, 2, std::uint64_t(i)}));
    double weakest = std::numeric_limits<double>::infinity();
    for (Eigen::Index d = 0; d < k; ++d) weakest = std::min(weakest, std::norm(H.matrix()(0, d)));
    check(H, 1.0 / weakest);
  }
  for (int i = 0; i < 10; ++i) {
    // Orthonormal columns from a QR factorization, then random gains. Every
    // relative phase is optimal here, so branch and bound must refine the
    // whole phase torus; K = 3 already takes ~2e5 iterations.
    const int k = 1 + i % 3;
    const int n = k + i % 2;
    ComplexMatrix G(n, n);
    for (auto& v : G.reshaped()) v = complex_gaussian(rng);
    const ComplexMatrix Q = Eigen::HouseholderQR<ComplexMatrix>(G).householderQ();
    ComplexMatrix h = Q.leftCols(k);
    double expected = 0.0;
    std::uniform_real_distribution<double> gain(0.3, 3.0);
    for (int d = 0; d < k; ++d) {
      h.col(d) *= gain(rng);
      expected += 1.0 / h.col(d).squaredNorm();
    }
    check(ChannelSet(h), expected);
  }
  // The criterion is objective agreement; the certificate count is informational
  // (orthogonal K = 3 can exhaust the 1e6 iteration cap).
  report(2, passed == checked,
         fmt("%.0f/%.0f closed forms (K=1, N=1, orthogonal K<=3) within 1e-6, worst rel %.3g, "
             "%.0f converged",
             passed, checked, worst, certified));
}

// Grid oracle for K = N = 2. The objective depends on the phases of x only
// through their difference, and the phase grid is closed under a one-step
// rotation, so fixing arg x_1 = 0 gives the same grid minimum.
double grid_oracle(const ChannelSet& H) {
  const ComplexMatrix& h = H.matrix();
  const Eigen::Matrix2cd gram = h.adjoint() * h;
  const Eigen::Matrix2cd gram_inv = gram.inverse();
  double best = std::numeric_limits<double>::infinity();
  const int phases = 1 << 10;
  std::vector<double> moduli;
  for (int i = 0; i <= 20; ++i) moduli.push_back(1.0 + 0.05 * i);
  for (double r1 : moduli) {
    for (double r2 : moduli) {
      for (int p = 0; p < phases; ++p) {
        const Complex x1 = r1;
        const Complex x2 = std::polar(r2, geometry::kTwoPi * p / phases);
        // Minimum-norm m with h_k^H m = conj(x_k): stationarity m = h lambda,
        // so lambda = (h^H h)^{-1} conj(x).
        const Eigen::Vector2cd rhs(std::conj(x1), std::conj(x2));
        const Eigen::Vector2cd lambda = gram_inv * rhs;
        const ComplexVector m = h * lambda;
        if (!is_feasible(H, m, 1e-9)) continue;
        best = std::min(best, m.squaredNorm());
      }
    }
  }
  return best;
}

void brute_force_oracle() {
  int ok = 0;
  double worst_above = -std::numeric_limits<double>::infinity();
  double worst_below = 0.0;
  for (std::uint64_t i = 0; i < 25; ++i) {
    const ChannelSet H = sim::unit_rician_channels(2, 2, 3.0, derive_seed(kMasterSeed, {3, i}));
    const double oracle = grid_oracle(H);
    const double value = bnb::solve_global(H).objective;
    worst_above = std::max(worst_above, value - oracle);
    worst_below = std::max(worst_below, (oracle - value) / oracle);
    if (value <= oracle + 1e-9 && value >= oracle * (1.0 - 0.02)) ++ok;
  }
  report(3, ok == 25,
         fmt("%.0f/25 within [oracle - 2%%, oracle + 1e-9]; max(BnB-oracle) %.3g, max shortfall %.3g",
             ok, worst_above, worst_below));
}

void bound_behavior(bool traces_ok) {
  std::vector<double> iterations;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ChannelSet H = sim::unit_rician_channels(4, 8, 3.0, derive_seed(kMasterSeed, {4, s}));
    const bnb::SolveReport r = bnb::solve_global(H);
    traces_ok = traces_ok && monotone(r) && r.status == bnb::SolveStatus::Converged;
    iterations.push_back(static_cast<double>(r.iterations));
  }
  std::sort(iterations.begin(), iterations.end());
  const double median = 0.5 * (iterations[9] + iterations[10]);
  report(4, traces_ok && median >= 50 && median <= 5000,
         fmt("traces monotone=%.0f, K=8 N=4 median iterations %.1f (min %.0f, max %.0f)",
             traces_ok ? 1 : 0, median, iterations.front(), iterations.back()));
}

void trends() {
  sim::ExperimentConfig n_sweep;
  n_sweep.axis = sim::SweepAxis::Antennas;
  n_sweep.values = {4, 6, 8, 10};
  n_sweep.scenario.devices = 10;
  n_sweep.realizations = 50;
  const sim::ExperimentResult a = sim::run_experiment(n_sweep);
  bool decreasing = true;
  int fails = 0;
  std::string detail = "N-sweep mean MSE:";
  for (sim::Solver s : n_sweep.solvers) {
    detail += std::string(" ") + sim::to_string(s);
    for (std::size_t i = 0; i < n_sweep.values.size(); ++i) {
      const sim::SummaryRow& row = a.row(n_sweep.values[i], s);
      fails += row.failures;
      detail += fmt(" %.4g", row.mean_mse);
      if (i > 0 && !(row.mean_mse < a.row(n_sweep.values[i - 1], s).mean_mse)) decreasing = false;
    }
    detail += ";";
  }

  sim::ExperimentConfig k_sweep;
  k_sweep.axis = sim::SweepAxis::Devices;
  k_sweep.values = {2, 4, 6, 8};
  k_sweep.scenario.antennas = 10;
  k_sweep.realizations = 50;
  k_sweep.solvers = {sim::Solver::BnB, sim::Solver::SCA};
  const sim::ExperimentResult b = sim::run_experiment(k_sweep);
  bool nondecreasing = true;
  double previous = -std::numeric_limits<double>::infinity();
  detail += " K-sweep mean(SCA-BnB):";
  for (int k : k_sweep.values) {
    const double gap = b.row(k, sim::Solver::SCA).mean_mse - b.row(k, sim::Solver::BnB).mean_mse;
    fails += b.row(k, sim::Solver::BnB).failures + b.row(k, sim::Solver::SCA).failures;
    detail += fmt(" %.3g", gap);
    if (gap < previous) nondecreasing = false;
    previous = gap;
  }
  report(6, decreasing && nondecreasing && fails == 0,
         detail + fmt(" (N-sweep decreasing=%.0f, K-sweep nondecreasing=%.0f, failures %.0f)",
                      decreasing ? 1 : 0, nondecreasing ? 1 : 0, fails));
}

void model_validation() {
  Rng rng(derive_seed(kMasterSeed, {7}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int ok = 0;
  double noiseless = 0.0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const int n = 2 + static_cast<int>(i % 4);
    const int k = 2 + static_cast<int>(i % 5);
    const ChannelSet H = sim::unit_rician_channels(n, k, 3.0, derive_seed(kMasterSeed, {7, i}));
    ComplexVector m(n);
    for (auto& v : m) v = complex_gaussian(rng);
    m = scale_to_feasible(H, m);
    const double power = 0.5 + 2.0 * unit(rng);
    const double noise = 0.05 + unit(rng);
    const aircomp::AirCompDesign d = aircomp::make_design(m, H, power, noise);
    const double analytic = aircomp::analytic_mse(m, H, power, noise);
    const double empirical = aircomp::empirical_mse(d, H, 100000, derive_seed(kMasterSeed, {7, 1, i}));
    const double rel = std::abs(empirical - analytic) / analytic;
    worst = std::max(worst, rel);
    if (rel <= 0.02) ++ok;

    const aircomp::AirCompDesign quiet = aircomp::make_design(m, H, power, 0.0);
    noiseless = std::max(noiseless, aircomp::empirical_mse(quiet, H, 100000, 3));
  }
  // With sigma^2 = 0 the distortion is zero algebraically; the per-trial sum
  // of aligned terms leaves only double-precision rounding (about 1e-32 for
  // unit-power symbols), far below any sigma^2 > 0 contribution.
  const bool zero = noiseless <= 1e-24;
  report(7, ok == 10 && zero,
         fmt("%.0f/10 designs within 2%% (worst %.3g); sigma2=0 empirical MSE %.3g", ok, worst,
             noiseless));
}

void budget() {
  bool monotone_eps = true;
  std::uint64_t previous = 0;
  for (double eps : {100.0, 10.0, 1.0, 0.3, 0.1, 0.01, 1e-3, 1e-4, 1e-5}) {
    const std::uint64_t b = bnb::iteration_budget(eps, 2);
    if (b < previous) monotone_eps = false;
    previous = b;
  }
  const std::uint64_t v = bnb::iteration_budget(1.0, 2);
  report(8, v == 65 && monotone_eps,
         fmt("iteration_budget(1, 2) = %.0f, nonincreasing in eps=%.0f", static_cast<double>(v),
             monotone_eps ? 1 : 0));
}

}  // namespace

int main() {
  bool traces_ok = true;
  certified_optimality(traces_ok);
  closed_forms();
  brute_force_oracle();
  bound_behavior(traces_ok);
  trends();
  model_validation();
  budget();
  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
