#include "airbeam/sim.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <omp.h>

#include "airbeam/aircomp.hpp"
#include "airbeam/baselines.hpp"
#include "airbeam/bnb.hpp"
#include "airbeam/random.hpp"

namespace airbeam::sim {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double NetworkScenario::reference_gain() const { return db_to_linear(reference_gain_db); }
double NetworkScenario::power_watts() const { return dbm_to_watts(power_dbm); }
double NetworkScenario::noise_watts() const { return dbm_to_watts(noise_dbm); }

void NetworkScenario::validate() const {
  if (antennas < 1 || devices < 1) throw std::invalid_argument("scenario: N and K must be >= 1");
  if (!(region_radius > 0.0) || !(path_loss_exponent > 0.0) || !(rician_factor >= 0.0) ||
      !(antenna_spacing > 0.0)) {
    throw std::invalid_argument("scenario: radius, exponent, spacing must be positive");
  }
}

double large_scale_gain(const NetworkScenario& s, double distance) {
  return s.reference_gain() * std::pow(distance, -s.path_loss_exponent);
}

ComplexVector steering_vector(int antennas, double spacing, double cos_angle) {
  ComplexVector a(antennas);
  for (int n = 0; n < antennas; ++n) {
    a[n] = std::polar(1.0, 2.0 * std::numbers::pi * spacing * n * cos_angle);
  }
  return a;
}

namespace {

ComplexVector rician_vector(Rng& rng, int antennas, double beta, double spacing,
                            double cos_angle) {
  const double los = std::sqrt(beta / (1.0 + beta));
  const double nlos = std::sqrt(1.0 / (1.0 + beta));
  ComplexVector h = los * steering_vector(antennas, spacing, cos_angle);
  for (int n = 0; n < antennas; ++n) h[n] += nlos * complex_gaussian(rng);
  return h;
}

}  // namespace

ChannelDraw draw_channels(const NetworkScenario& s, std::uint64_t seed) {
  s.validate();
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ComplexMatrix H(s.antennas, s.devices);
  std::vector<Point3> positions;
  std::vector<double> cosines;
  for (int k = 0; k < s.devices; ++k) {
    const double radius = s.region_radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const Point3 p{s.region_center[0] + radius * std::cos(phi),
                   s.region_center[1] + radius * std::sin(phi), s.region_center[2]};
    const double dx = p[0] - s.ap_position[0];
    const double dy = p[1] - s.ap_position[1];
    const double dz = p[2] - s.ap_position[2];
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double cos_angle = dx / d;
    H.col(k) = std::sqrt(large_scale_gain(s, d)) *
               rician_vector(rng, s.antennas, s.rician_factor, s.antenna_spacing, cos_angle);
    positions.push_back(p);
    cosines.push_back(cos_angle);
  }
  return ChannelDraw{ChannelSet(std::move(H)), std::move(positions), std::move(cosines)};
}

ChannelSet generate_channels(const NetworkScenario& s, std::uint64_t seed) {
  return draw_channels(s, seed).channels;
}

ChannelSet unit_rician_channels(int antennas, int devices, double rician_factor,
                                std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  ComplexMatrix H(antennas, devices);
  for (int k = 0; k < devices; ++k) {
    H.col(k) = rician_vector(rng, antennas, rician_factor, 0.5, std::cos(angle(rng)));
  }
  return ChannelSet(std::move(H));
}

const char* to_string(Solver s) {
  switch (s) {
    case Solver::BnB:
      return "bnb";
    case Solver::SDR:
      return "sdr";
    case Solver::SCA:
      return "sca";
    case Solver::MatchedFilter:
      return "mf";
  }
  return "unknown";
}

Solver parse_solver(const std::string& name) {
  if (name == "bnb") return Solver::BnB;
  if (name == "sdr") return Solver::SDR;
  if (name == "sca") return Solver::SCA;
  if (name == "mf") return Solver::MatchedFilter;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

void ExperimentConfig::validate() const {
  scenario.validate();
  if (realizations < 1) throw std::invalid_argument("experiment: realizations must be >= 1");
  if (values.empty()) throw std::invalid_argument("experiment: no axis values");
  for (int v : values) {
    if (v < 1) throw std::invalid_argument("experiment: axis values must be positive");
  }
  if (solvers.empty()) throw std::invalid_argument("experiment: no solvers");
  if (!(epsilon > 0.0)) throw std::invalid_argument("experiment: epsilon must be > 0");
}

const SummaryRow& ExperimentResult::row(int axis_value, Solver solver) const {
  for (const SummaryRow& r : rows) {
    if (r.axis_value == axis_value && r.solver == solver) return r;
  }
  throw std::out_of_range("ExperimentResult: no such row");
}

std::uint64_t realization_seed(std::uint64_t master, std::size_t point, int realization) {
  return derive_seed(master, {static_cast<std::uint64_t>(point),
                              static_cast<std::uint64_t>(realization)});
}

namespace {

RealizationRecord run_solver(Solver solver, const ChannelSet& H, const NetworkScenario& scenario,
                             const ExperimentConfig& cfg, std::uint64_t seed) {
  RealizationRecord rec;
  rec.solver = solver;
  const auto start = std::chrono::steady_clock::now();
  try {
    ComplexVector m;
    switch (solver) {
      case Solver::BnB: {
        bnb::SolveOptions opt;
        opt.epsilon = cfg.epsilon;
        opt.max_iterations = cfg.bnb_max_iterations;
        const bnb::SolveReport rep = bnb::solve_global(H, opt);
        if (rep.status != bnb::SolveStatus::Converged) {
          throw std::runtime_error("branch and bound hit the iteration cap");
        }
        m = rep.optimal_m;
        rec.iterations = static_cast<double>(rep.iterations);
        break;
      }
      case Solver::SDR: {
        baselines::SdrOptions opt;
        opt.randomizations = cfg.sdr_randomizations;
        opt.seed = derive_seed(seed, {0x5d7});
        m = baselines::sdr_beamformer(H, opt).m;
        break;
      }
      case Solver::SCA: {
        const baselines::BeamformerResult r = baselines::sca_beamformer(H);
        m = r.m;
        rec.iterations = r.rounds;
        break;
      }
      case Solver::MatchedFilter:
        m = baselines::matched_filter_beamformer(H);
        break;
    }
    if (!is_feasible(H, m, 1e-9)) throw std::runtime_error("solver returned an infeasible point");
    rec.objective = m.squaredNorm();
    rec.mse = aircomp::analytic_mse(m, H, scenario.power_watts(), scenario.noise_watts());
    rec.ok = std::isfinite(rec.mse);
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.walltime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t points = cfg.values.size();
  const std::size_t solvers = cfg.solvers.size();
  const auto items = static_cast<std::int64_t>(points * static_cast<std::size_t>(cfg.realizations));
  ExperimentResult result;
  result.records.resize(static_cast<std::size_t>(items) * solvers);

  auto work = [&](std::int64_t item) {
    const auto p = static_cast<std::size_t>(item / cfg.realizations);
    const int r = static_cast<int>(item % cfg.realizations);
    NetworkScenario scenario = cfg.scenario;
    if (cfg.axis == SweepAxis::Antennas) {
      scenario.antennas = cfg.values[p];
    } else {
      scenario.devices = cfg.values[p];
    }
    const std::uint64_t seed = realization_seed(cfg.seed, p, r);
    const ChannelSet H = generate_channels(scenario, seed);
    for (std::size_t s = 0; s < solvers; ++s) {
      RealizationRecord rec = run_solver(cfg.solvers[s], H, scenario, cfg, seed);
      rec.point = p;
      rec.realization = r;
      result.records[static_cast<std::size_t>(item) * solvers + s] = std::move(rec);
    }
  };
  if (cfg.threads <= 1) {
    for (std::int64_t i = 0; i < items; ++i) work(i);
  } else {
#pragma omp parallel for num_threads(cfg.threads) schedule(dynamic, 1)
    for (std::int64_t i = 0; i < items; ++i) work(i);
  }

  for (std::size_t p = 0; p < points; ++p) {
    for (std::size_t s = 0; s < solvers; ++s) {
      SummaryRow row;
      row.axis_value = cfg.values[p];
      row.solver = cfg.solvers[s];
      double sum = 0.0;
      double sum_sq = 0.0;
      double iters = 0.0;
      double wall = 0.0;
      int ok = 0;
      for (int r = 0; r < cfg.realizations; ++r) {
        const RealizationRecord& rec =
            result.records[(p * static_cast<std::size_t>(cfg.realizations) +
                            static_cast<std::size_t>(r)) * solvers + s];
        if (!rec.ok) {
          ++row.failures;
          continue;
        }
        ++ok;
        sum += rec.mse;
        sum_sq += rec.mse * rec.mse;
        iters += rec.iterations;
        wall += rec.walltime_ms;
      }
      if (ok > 0) {
        row.mean_mse = sum / ok;
        row.mean_iterations = iters / ok;
        row.mean_walltime_ms = wall / ok;
        if (ok > 1) {
          const double var = std::max(0.0, (sum_sq - ok * row.mean_mse * row.mean_mse) / (ok - 1));
          row.stderr_mse = std::sqrt(var / ok);
        }
      } else {
        row.mean_mse = std::nan("");
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

void write_csv(std::ostream& out, const ExperimentResult& result, bool include_timing) {
  out << "axis_value,solver,mean_mse,stderr_mse,mean_iterations,mean_walltime_ms,failures\n";
  char buf[256];
  for (const SummaryRow& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.12g,%.12g,%.12g,%.6g,%d\n", r.axis_value,
                  to_string(r.solver), r.mean_mse, r.stderr_mse, r.mean_iterations,
                  include_timing ? r.mean_walltime_ms : 0.0, r.failures);
    out << buf;
  }
}

}  // namespace airbeam::sim
