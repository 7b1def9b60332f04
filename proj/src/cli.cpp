#include "airbeam/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "airbeam/aircomp.hpp"
#include "airbeam/baselines.hpp"
#include "airbeam/bnb.hpp"
#include "airbeam/instance_io.hpp"
#include "airbeam/sim.hpp"

namespace airbeam::cli {
namespace {

int threads_from_env() {
  const char* v = std::getenv("AIRBEAM_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  try {
    return std::max(0, std::stoi(v));
  } catch (const std::exception&) {
    return 0;
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& out) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  out << "seed: " << s << '\n';
  return s;
}

struct SolveArgs {
  std::string instance;
  double eps = 1e-5;
  std::uint64_t max_iter = 0;
  std::string solver = "bnb";
  std::string trace;
  std::optional<std::uint64_t> seed;
  bool allow_capped = false;
  bool full_root = false;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  io::Instance inst;
  try {
    inst = io::read_instance_file(a.instance);
  } catch (const io::ParseError& e) {
    err << a.instance << ": " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kIoError;
  }
  std::optional<ChannelSet> channels;
  try {
    channels.emplace(inst.H);
  } catch (const std::exception& e) {
    err << a.instance << ": " << e.what() << '\n';
    return kInfeasible;
  }
  const ChannelSet& H = *channels;
  const double power = inst.power.value_or(1.0);
  const double noise = inst.noise_variance.value_or(1.0);

  ComplexVector m;
  std::optional<bnb::SolveReport> report;
  int rounds = 0;
  try {
    if (a.solver == "bnb") {
      bnb::SolveOptions opt;
      opt.epsilon = a.eps;
      opt.max_iterations = a.max_iter;
      opt.threads = threads_from_env();
      if (a.full_root) opt.reference_sector_width = geometry::kTwoPi;
      report = bnb::solve_global(H, opt);
      m = report->optimal_m;
    } else if (a.solver == "sdr") {
      baselines::SdrOptions opt;
      opt.seed = resolve_seed(a.seed, out);
      opt.threads = threads_from_env();
      const baselines::SdrResult r = baselines::sdr_beamformer(H, opt);
      m = r.m;
      out << "sdp_relaxation: " << std::setprecision(12) << r.sdp_objective << '\n';
      out << "rank_one: " << (r.rank_one ? "yes" : "no") << '\n';
    } else if (a.solver == "sca") {
      baselines::ScaOptions opt;
      if (a.max_iter > 0) opt.max_rounds = static_cast<int>(a.max_iter);
      const baselines::BeamformerResult r = baselines::sca_beamformer(H, opt);
      m = r.m;
      rounds = r.rounds;
    } else if (a.solver == "mf") {
      m = baselines::matched_filter_beamformer(H);
    } else {
      err << "unknown solver '" << a.solver << "'\n";
      return kUsage;
    }
  } catch (const std::exception& e) {
    err << "solver failed: " << e.what() << '\n';
    return kSolverError;
  }

  const aircomp::AirCompDesign design = aircomp::make_design(m, H, power, noise);
  const ComplexVector gains = H.effective_gains(m);
  out << std::setprecision(12);
  out << "solver: " << a.solver << '\n';
  out << "objective: " << m.squaredNorm() << '\n';
  out << "mse: " << aircomp::analytic_mse(m, H, power, noise) << '\n';
  out << "eta: " << design.eta << '\n';
  for (Eigen::Index k = 0; k < H.devices(); ++k) {
    out << "device " << (k + 1) << ": |m^H h| = " << std::abs(gains[k])
        << "  |w|^2 = " << std::norm(design.w[k]) << '\n';
  }
  if (report) {
    out << "status: " << bnb::to_string(report->status) << '\n';
    out << "iterations: " << report->iterations << '\n';
    out << "nodes: " << report->node_count << '\n';
    out << "lower_bound: " << report->global_lower << '\n';
    out << "upper_bound: " << report->global_upper << '\n';
    out << "gap: " << report->relative_gap() << '\n';
  } else {
    out << "iterations: " << rounds << '\n';
  }

  if (!a.trace.empty()) {
    if (!report) {
      err << "--trace is only available for --solver bnb\n";
      return kUsage;
    }
    std::ofstream t(a.trace);
    t << std::setprecision(17) << "t,L,U\n";
    for (const bnb::BoundPoint& p : report->bound_trace) {
      t << p.iteration << ',' << p.lower << ',' << p.upper << '\n';
    }
    if (!t) {
      err << "cannot write trace file '" << a.trace << "'\n";
      return kIoError;
    }
  }
  if (report && report->status == bnb::SolveStatus::IterationCapped && !a.allow_capped) {
    err << "iteration cap reached before the gap closed (use --allow-capped to accept)\n";
    return kIterationCapped;
  }
  return kOk;
}

struct BenchArgs {
  std::string sweep = "antennas";
  std::vector<int> values;
  int k = 10;
  int n = 10;
  int realizations = 50;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::vector<std::string> solvers{"bnb", "sdr", "sca"};
  double eps = 1e-5;
  int randomizations = 1000;
  bool no_timing = false;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  sim::ExperimentConfig cfg;
  try {
    cfg.axis = a.sweep == "antennas" ? sim::SweepAxis::Antennas : sim::SweepAxis::Devices;
    cfg.values = a.values;
    cfg.scenario.antennas = a.n;
    cfg.scenario.devices = a.k;
    cfg.realizations = a.realizations;
    cfg.epsilon = a.eps;
    cfg.sdr_randomizations = a.randomizations;
    cfg.threads = threads_from_env();
    cfg.solvers.clear();
    for (const std::string& s : a.solvers) cfg.solvers.push_back(sim::parse_solver(s));
    cfg.seed = resolve_seed(a.seed, out);
    cfg.validate();
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kUsage;
  }
  const sim::ExperimentResult result = sim::run_experiment(cfg);
  for (const sim::RealizationRecord& r : result.records) {
    if (!r.ok) {
      err << "point " << cfg.values[r.point] << " realization " << r.realization << " "
          << sim::to_string(r.solver) << ": " << r.error << '\n';
    }
  }
  if (a.out_path.empty()) {
    sim::write_csv(out, result, !a.no_timing);
    return kOk;
  }
  std::ofstream f(a.out_path);
  if (!f) {
    err << "cannot open '" << a.out_path << "' for writing\n";
    return kIoError;
  }
  sim::write_csv(f, result, !a.no_timing);
  f.close();
  if (!f) {
    err << "write failed for '" << a.out_path << "'\n";
    return kIoError;
  }
  return kOk;
}

struct GenerateArgs {
  int n = 4;
  int k = 8;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  bool unit = false;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  sim::NetworkScenario s;
  s.antennas = a.n;
  s.devices = a.k;
  io::Instance inst;
  try {
    const std::uint64_t seed = resolve_seed(a.seed, a.out_path.empty() ? err : out);
    if (a.unit) {
      inst.H = sim::unit_rician_channels(a.n, a.k, s.rician_factor, seed).matrix();
      inst.power = 1.0;
      inst.noise_variance = 1.0;
    } else {
      inst.H = sim::generate_channels(s, seed).matrix();
      inst.power = s.power_watts();
      inst.noise_variance = s.noise_watts();
    }
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kUsage;
  }
  try {
    if (a.out_path.empty()) {
      io::write_instance(out, inst);
    } else {
      io::write_instance_file(a.out_path, inst);
    }
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Globally optimal AirComp receive beamforming"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* sc = app.add_subcommand("solve", "Solve one instance file");
  sc->add_option("instance", solve.instance, "Instance file")->required();
  sc->add_option("--eps", solve.eps, "Relative optimality tolerance")->check(CLI::PositiveNumber);
  sc->add_option("--max-iter", solve.max_iter, "Iteration cap (0: default budget)");
  sc->add_option("--solver", solve.solver, "bnb | sdr | sca | mf")
      ->check(CLI::IsMember({"bnb", "sdr", "sca", "mf"}));
  sc->add_option("--trace", solve.trace, "Write per-iteration t,L,U rows");
  sc->add_option("--seed", solve.seed, "Seed for randomized solvers");
  sc->add_flag("--allow-capped", solve.allow_capped, "Exit 0 even if the iteration cap is hit");
  sc->add_flag("--full-root", solve.full_root,
               "Start from [0, 2pi) for every device instead of fixing the reference phase");

  BenchArgs bench;
  auto* bc = app.add_subcommand("bench", "Run a Monte-Carlo sweep and write a CSV table");
  bc->add_option("--sweep", bench.sweep, "antennas | devices")
      ->check(CLI::IsMember({"antennas", "devices"}));
  bc->add_option("--values", bench.values, "Axis values")->delimiter(',')->required();
  bc->add_option("--k", bench.k, "Devices when sweeping antennas");
  bc->add_option("--n", bench.n, "Antennas when sweeping devices");
  bc->add_option("--realizations", bench.realizations, "Channel realizations per point");
  bc->add_option("--seed", bench.seed, "Master seed");
  bc->add_option("--out", bench.out_path, "Output CSV (default stdout)");
  bc->add_option("--solvers", bench.solvers, "bnb,sdr,sca,mf")->delimiter(',');
  bc->add_option("--eps", bench.eps, "Branch-and-bound tolerance")->check(CLI::PositiveNumber);
  bc->add_option("--randomizations", bench.randomizations, "SDR randomization count");
  bc->add_flag("--no-timing", bench.no_timing, "Write 0 in the wall-time column");

  GenerateArgs gen;
  auto* gc = app.add_subcommand("generate", "Draw a channel instance and write it");
  gc->add_option("--n", gen.n, "Antennas");
  gc->add_option("--k", gen.k, "Devices");
  gc->add_option("--seed", gen.seed, "Seed");
  gc->add_option("--out", gen.out_path, "Output file (default stdout)");
  gc->add_flag("--unit", gen.unit, "Unit-gain Rician channels instead of the path-loss scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }
  if (sc->parsed()) return cmd_solve(solve, out, err);
  if (bc->parsed()) return cmd_bench(bench, out, err);
  return cmd_generate(gen, out, err);
}

}  // namespace airbeam::cli
