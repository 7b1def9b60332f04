#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "airbeam/channel.hpp"
#include "airbeam/geometry.hpp"
#include "airbeam/numerics.hpp"

namespace airbeam::bnb {

enum class BoundStatus { Bounded, Infeasible, NumericalFailure };

/// Relaxation of one subproblem: min ||m||^2 s.t. m^H h_k = x_k, x_k in the
/// convex hull of its sector.
struct NodeBound {
  BoundStatus status = BoundStatus::NumericalFailure;
  double lower = 0.0;
  ComplexVector m;
  ComplexVector x;
};

/// Real-embedded relaxation QP over z = [Re m; Im m; Re x; Im x].
numerics::ConvexQP relaxation_qp(const geometry::SectorBox& box, const ChannelSet& H);

NodeBound node_lower_bound(const geometry::SectorBox& box, const ChannelSet& H,
                           const numerics::QpTolerances& tol = {});

struct Incumbent {
  double upper = 0.0;
  ComplexVector m;
};

/// Scales (m*, x*) by 1 / min(|x*_1|, ..., |x*_K|, 1). Returns nullopt when
/// that factor is at most 1e-6.
std::optional<Incumbent> node_upper_bound(const ComplexVector& m, const ComplexVector& x,
                                          const geometry::SectorBox& box, const ChannelSet& H);

/// argmin_k |x_k|, lowest index on ties.
std::size_t select_branch_device(const ComplexVector& x);

/// (2 pi / arccos(1 / sqrt(1 + eps)))^K + 1, saturating at UINT64_MAX.
std::uint64_t iteration_budget(double epsilon, std::size_t devices);

/// Default root width of the phase-reference device.
inline constexpr double kReferenceSectorWidth = geometry::kTwoPi / 4096.0;

enum class SolveStatus { Converged, IterationCapped };

const char* to_string(SolveStatus status);

struct BoundPoint {
  std::uint64_t iteration = 0;
  double lower = 0.0;
  double upper = 0.0;
};

struct SolveOptions {
  double epsilon = 1e-5;
  std::uint64_t max_iterations = 0;  // 0: min(iteration_budget, 10^6)
  int threads = 0;                   // > 1 bounds the two children concurrently
  bool polish = true;                // local refinement of the final incumbent
  /// Width of device 1's root sector [0, w). Any solution can be rotated by a
  /// common phase so that arg(m^H h_1) = 0, so w < 2 pi loses no optimum;
  /// 2 pi gives the plain root box [0, 2 pi)^K.
  double reference_sector_width = kReferenceSectorWidth;
  numerics::QpTolerances qp;
};

struct SolveReport {
  ComplexVector optimal_m;
  double objective = 0.0;
  double global_lower = 0.0;
  double global_upper = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t node_count = 0;
  std::uint64_t numerical_failures = 0;
  SolveStatus status = SolveStatus::IterationCapped;
  std::vector<BoundPoint> bound_trace;

  double relative_gap() const;
};

/// Best-first branch and bound for min ||m||^2 s.t. |m^H h_k| >= 1.
/// Converged certifies (U - L) / L <= epsilon.
SolveReport solve_global(const ChannelSet& H, const SolveOptions& options = {});

}  // namespace airbeam::bnb
