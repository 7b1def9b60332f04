#pragma once

#include <cstdint>

#include "airbeam/channel.hpp"

namespace airbeam::aircomp {

/// Transceiver design: receive beamformer m, denoising factor eta and the
/// per-device transmit scalars w.
struct AirCompDesign {
  ComplexVector m;
  double eta = 0.0;
  ComplexVector w;
  double power = 1.0;           // P, watts
  double noise_variance = 1.0;  // sigma^2, watts
};

/// eta = P * min_k |m^H h_k|^2.
double denoising_factor(const ComplexVector& m, const ChannelSet& H, double power);

/// w_k = sqrt(eta) * conj(m^H h_k) / |m^H h_k|^2, which aligns every device:
/// m^H h_k w_k = sqrt(eta). Throws std::domain_error on a zero effective gain.
ComplexVector transmit_scalars(const ComplexVector& m, const ChannelSet& H, double eta);

/// sigma^2 ||m||^2 / (P min_k |m^H h_k|^2).
double analytic_mse(const ComplexVector& m, const ChannelSet& H, double power,
                    double noise_variance);

/// Closed-form design around a given beamformer.
AirCompDesign make_design(const ComplexVector& m, const ChannelSet& H, double power,
                          double noise_variance);

/// Monte-Carlo estimate of E|g_hat - g|^2 with s_k ~ CN(0,1) and
/// n ~ CN(0, sigma^2 I). Trials are drawn in fixed blocks, each with its own
/// derived stream, and block sums are accumulated in block order; the result
/// does not depend on how blocks are scheduled.
double empirical_mse(const AirCompDesign& design, const ChannelSet& H, std::uint64_t trials,
                     std::uint64_t seed);

/// Same estimator with blocks distributed over `threads` OpenMP workers.
/// Bitwise identical to empirical_mse for any thread count.
double empirical_mse_parallel(const AirCompDesign& design, const ChannelSet& H,
                              std::uint64_t trials, std::uint64_t seed, int threads);

/// Sample mean of g_hat - g (alignment bias check).
Complex empirical_bias(const AirCompDesign& design, const ChannelSet& H, std::uint64_t trials,
                       std::uint64_t seed);

}  // namespace airbeam::aircomp
