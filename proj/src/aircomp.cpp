#include "airbeam/aircomp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <omp.h>

#include "airbeam/random.hpp"

namespace airbeam::aircomp {

double denoising_factor(const ComplexVector& m, const ChannelSet& H, double power) {
  if (m.squaredNorm() == 0.0) throw std::invalid_argument("denoising_factor: m is zero");
  const double g = H.min_gain_modulus(m);
  return power * g * g;
}

ComplexVector transmit_scalars(const ComplexVector& m, const ChannelSet& H, double eta) {
  const ComplexVector a = H.effective_gains(m);
  const double root = std::sqrt(eta);
  ComplexVector w(a.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double gain = std::norm(a[k]);
    if (gain == 0.0) {
      throw std::domain_error("transmit_scalars: zero effective channel for device " +
                              std::to_string(k + 1));
    }
    w[k] = root * std::conj(a[k]) / gain;
  }
  return w;
}

double analytic_mse(const ComplexVector& m, const ChannelSet& H, double power,
                    double noise_variance) {
  return noise_variance * m.squaredNorm() / denoising_factor(m, H, power);
}

AirCompDesign make_design(const ComplexVector& m, const ChannelSet& H, double power,
                          double noise_variance) {
  AirCompDesign d;
  d.m = m;
  d.power = power;
  d.noise_variance = noise_variance;
  d.eta = denoising_factor(m, H, power);
  d.w = transmit_scalars(m, H, d.eta);
  return d;
}

namespace {

constexpr std::uint64_t kBlock = 4096;

struct BlockSums {
  double squared_error = 0.0;
  Complex error{0.0, 0.0};
};

BlockSums run_block(const AirCompDesign& d, const ChannelSet& H, std::uint64_t first,
                    std::uint64_t count, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {first / kBlock}));
  const Eigen::Index n = H.antennas();
  const Eigen::Index k = H.devices();
  const double inv_root_eta = 1.0 / std::sqrt(d.eta);
  ComplexVector y(n);
  ComplexVector s(k);
  BlockSums out;
  for (std::uint64_t t = 0; t < count; ++t) {
    for (Eigen::Index i = 0; i < k; ++i) s[i] = complex_gaussian(rng);
    for (Eigen::Index a = 0; a < n; ++a) y[a] = complex_gaussian(rng, d.noise_variance);
    for (Eigen::Index i = 0; i < k; ++i) y += H.column(i) * (d.w[i] * s[i]);
    const Complex g = s.sum();
    const Complex g_hat = d.m.dot(y) * inv_root_eta;  // dot() conjugates m
    const Complex e = g_hat - g;
    out.squared_error += std::norm(e);
    out.error += e;
  }
  return out;
}

std::vector<BlockSums> run_blocks(const AirCompDesign& d, const ChannelSet& H,
                                  std::uint64_t trials, std::uint64_t seed, int threads) {
  if (trials == 0) throw std::invalid_argument("empirical_mse: trials must be >= 1");
  if (d.m.size() != H.antennas() || d.w.size() != H.devices()) {
    throw std::invalid_argument("empirical_mse: design does not match channel dimensions");
  }
  const auto blocks = static_cast<std::int64_t>((trials + kBlock - 1) / kBlock);
  std::vector<BlockSums> sums(static_cast<std::size_t>(blocks));
  auto body = [&](std::int64_t b) {
    const std::uint64_t first = static_cast<std::uint64_t>(b) * kBlock;
    const std::uint64_t count = std::min(kBlock, trials - first);
    sums[static_cast<std::size_t>(b)] = run_block(d, H, first, count, seed);
  };
  if (threads <= 1) {
    for (std::int64_t b = 0; b < blocks; ++b) body(b);
  } else {
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) body(b);
  }
  return sums;
}

}  // namespace

double empirical_mse(const AirCompDesign& design, const ChannelSet& H, std::uint64_t trials,
                     std::uint64_t seed) {
  return empirical_mse_parallel(design, H, trials, seed, 0);
}

double empirical_mse_parallel(const AirCompDesign& design, const ChannelSet& H,
                              std::uint64_t trials, std::uint64_t seed, int threads) {
  double total = 0.0;
  for (const BlockSums& b : run_blocks(design, H, trials, seed, threads)) total += b.squared_error;
  return total / static_cast<double>(trials);
}

Complex empirical_bias(const AirCompDesign& design, const ChannelSet& H, std::uint64_t trials,
                       std::uint64_t seed) {
  Complex total{0.0, 0.0};
  for (const BlockSums& b : run_blocks(design, H, trials, seed, 0)) total += b.error;
  return total / static_cast<double>(trials);
}

}  // namespace airbeam::aircomp
