#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "airbeam/channel.hpp"

namespace airbeam::sim {

using Point3 = std::array<double, 3>;

/// Network geometry and link budget. Logarithmic fields are stored as given
/// and converted to linear units by the accessors below.
struct NetworkScenario {
  Point3 ap_position{0.0, 0.0, 20.0};
  Point3 region_center{120.0, 20.0, 0.0};
  double region_radius = 20.0;  // meters
  int antennas = 4;
  int devices = 8;
  double path_loss_exponent = 3.0;
  double reference_gain_db = -30.0;  // T0 at d0 = 1 m
  double rician_factor = 3.0;        // beta, linear
  double power_dbm = 30.0;
  double noise_dbm = -100.0;
  double antenna_spacing = 0.5;  // wavelengths

  double reference_gain() const;  // linear
  double power_watts() const;
  double noise_watts() const;
  void validate() const;
};

double dbm_to_watts(double dbm);
double db_to_linear(double db);

/// T0 (d / 1 m)^{-alpha}.
double large_scale_gain(const NetworkScenario& s, double distance);

/// ULA along the x axis: a_n = exp(j 2 pi spacing n cos_angle), n = 0..N-1.
ComplexVector steering_vector(int antennas, double spacing, double cos_angle);

struct ChannelDraw {
  ChannelSet channels;
  std::vector<Point3> positions;
  std::vector<double> cos_angles;  // direction cosine of each device w.r.t. the array axis
};

/// Devices area-uniform in the disc; h_k = sqrt(T0 d^-alpha) (sqrt(b/(1+b)) a(theta_k)
/// + sqrt(1/(1+b)) g_k) with g_k ~ CN(0, I).
ChannelDraw draw_channels(const NetworkScenario& s, std::uint64_t seed);
ChannelSet generate_channels(const NetworkScenario& s, std::uint64_t seed);

/// Unit-gain Rician instance (no path loss) with a uniformly random arrival
/// direction per device; used for solver validation at unit scale.
ChannelSet unit_rician_channels(int antennas, int devices, double rician_factor,
                                std::uint64_t seed);

enum class Solver { BnB, SDR, SCA, MatchedFilter };
enum class SweepAxis { Antennas, Devices };

const char* to_string(Solver s);
Solver parse_solver(const std::string& name);

struct ExperimentConfig {
  NetworkScenario scenario;  // the non-swept dimension is taken from here
  SweepAxis axis = SweepAxis::Antennas;
  std::vector<int> values;
  int realizations = 500;
  double epsilon = 1e-5;
  std::vector<Solver> solvers{Solver::BnB, Solver::SDR, Solver::SCA};
  std::uint64_t seed = 1;
  int sdr_randomizations = 1000;
  int threads = 0;  // 0 or 1: serial, realization order
  std::uint64_t bnb_max_iterations = 0;

  void validate() const;
};

struct RealizationRecord {
  std::size_t point = 0;
  int realization = 0;
  Solver solver = Solver::BnB;
  bool ok = false;
  double mse = 0.0;
  double objective = 0.0;
  double iterations = 0.0;
  double walltime_ms = 0.0;
  std::string error;
};

struct SummaryRow {
  int axis_value = 0;
  Solver solver = Solver::BnB;
  double mean_mse = 0.0;
  double stderr_mse = 0.0;
  double mean_iterations = 0.0;
  double mean_walltime_ms = 0.0;
  int failures = 0;
};

struct ExperimentResult {
  std::vector<SummaryRow> rows;
  std::vector<RealizationRecord> records;  // point-major, then realization, then solver

  const SummaryRow& row(int axis_value, Solver solver) const;
};

/// Seed of realization r at axis point p.
std::uint64_t realization_seed(std::uint64_t master, std::size_t point, int realization);

/// Runs every solver on every realization. Work items are independent and
/// aggregation is in index order, so results (apart from wall time) are the
/// same for any thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Comma-separated table:
/// axis_value,solver,mean_mse,stderr_mse,mean_iterations,mean_walltime_ms,failures
/// With include_timing = false the wall-time column is written as 0.
void write_csv(std::ostream& out, const ExperimentResult& result, bool include_timing = true);

}  // namespace airbeam::sim
