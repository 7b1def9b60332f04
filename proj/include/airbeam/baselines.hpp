#pragma once

#include <cstdint>

#include "airbeam/channel.hpp"

namespace airbeam::baselines {

/// A feasible beamformer for min ||m||^2 s.t. |m^H h_k| >= 1 and its objective.
struct BeamformerResult {
  ComplexVector m;
  double objective = 0.0;
  int rounds = 0;
};

/// m = sum_k h_k / ||h_k||^2 scaled so min_k |m^H h_k| = 1. Falls back to
/// the principal left singular vector of H when the sum cancels.
ComplexVector matched_filter_beamformer(const ChannelSet& H);

// --- semidefinite relaxation -------------------------------------------------

/// min tr(M) s.t. h_k^H M h_k >= 1, M Hermitian PSD.
struct SdpProblem {
  ComplexMatrix channels;  // columns h_k
};

struct SdpOptions {
  double gap_tolerance = 1e-8;  // relative duality gap of the barrier path
  int max_newton_steps = 1000;
};

struct SdpSolution {
  ComplexMatrix M;
  double objective = 0.0;  // tr(M)
  int newton_steps = 0;
};

/// Dense log-barrier interior-point method with Newton steps over the real
/// parametrization of Hermitian matrices. Throws std::runtime_error when the
/// Newton iteration fails.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

struct SdrOptions {
  int randomizations = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
  double rank_one_ratio = 1e-7;  // lambda_2 / lambda_1 threshold
  SdpOptions sdp;
};

struct SdrResult {
  ComplexVector m;
  double objective = 0.0;       // ||m||^2 of the extracted beamformer
  double sdp_objective = 0.0;   // relaxation value, a lower bound on the optimum
  bool rank_one = false;
};

/// SDR with principal-eigenvector extraction when the relaxation is rank one,
/// otherwise Gaussian randomization from CN(0, M) keeping the best scaled
/// candidate. The principal eigenvector and a unit-modulus variant of every
/// draw are candidates too.
SdrResult sdr_beamformer(const ChannelSet& H, const SdrOptions& options = {});

// --- successive convex approximation ---------------------------------------

struct ScaOptions {
  int max_rounds = 100;
  double tolerance = 1e-8;  // relative objective change
};

/// Convex-concave procedure: each round replaces |h_k^H m|^2 >= 1 by its
/// tangent inner approximation at m_t and solves the resulting QP.
/// Objectives are nonincreasing; the best feasible iterate is returned.
BeamformerResult sca_beamformer(const ChannelSet& H, const ComplexVector& initial,
                                const ScaOptions& options = {});

/// SCA started from the matched filter.
BeamformerResult sca_beamformer(const ChannelSet& H, const ScaOptions& options = {});

}  // namespace airbeam::baselines
