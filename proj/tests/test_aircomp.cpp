#include <doctest.h>

#include <cmath>

#include "airbeam/aircomp.hpp"
#include "airbeam/bnb.hpp"
#include "airbeam/random.hpp"
#include "airbeam/sim.hpp"

using namespace airbeam;
using namespace airbeam::aircomp;

TEST_CASE("denoising factor is P times the weakest effective gain") {
  ComplexMatrix h(2, 2);
  h << 2.0, 1.0, 0.0, 1.0;
  const ChannelSet H(h);
  ComplexVector m(2);
  m << 1.0, 0.0;
  CHECK(denoising_factor(m, H, 1.0) == doctest::Approx(1.0));
  CHECK(denoising_factor(m, H, 3.0) == doctest::Approx(3.0));
}

TEST_CASE("transmit scalars invert the effective channel") {
  ComplexMatrix h(1, 1);
  h << 2.0;
  const ChannelSet H(h);
  ComplexVector m(1);
  m << 1.0;  // m^H h = 2
  const ComplexVector w = transmit_scalars(m, H, 4.0);
  CHECK(std::abs(w[0] - Complex(1.0, 0.0)) < 1e-15);

  const ChannelSet R = sim::unit_rician_channels(3, 5, 3.0, 2);
  ComplexVector m2 = ComplexVector::Ones(3);
  const double eta = denoising_factor(m2, R, 1.0);
  const ComplexVector w2 = transmit_scalars(m2, R, eta);
  const ComplexVector gains = R.effective_gains(m2);
  for (Eigen::Index k = 0; k < 5; ++k) {
    CHECK(std::abs(gains[k] * w2[k] - std::sqrt(eta)) < 1e-12);
    CHECK(std::norm(w2[k]) <= 1.0 + 1e-12);
  }

  ComplexVector orth(3);
  orth << 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(transmit_scalars(orth, R, 1.0), std::domain_error);
}

TEST_CASE("analytic MSE") {
  ComplexMatrix h(2, 1);
  h << 1.0, 0.0;
  const ChannelSet H(h);
  ComplexVector m(2);
  m << 1.0, 1.0;  // ||m||^2 = 2, |m^H h|^2 = 1
  CHECK(analytic_mse(m, H, 1.0, 0.1) == doctest::Approx(0.2));
}

TEST_CASE("MSE depends only on the normalized objective") {
  const ChannelSet H = sim::unit_rician_channels(4, 6, 3.0, 8);
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexVector m(4);
    for (auto& v : m) v = complex_gaussian(rng);
    const ComplexVector scaled = scale_to_feasible(H, m);
    const double power = 0.5 + trial;
    const double noise = 1e-3 * (1 + trial);
    CHECK(analytic_mse(m, H, power, noise) ==
          doctest::Approx(noise / power * scaled.squaredNorm()).epsilon(1e-12));
    CHECK(analytic_mse(3.0 * m, H, power, noise) ==
          doctest::Approx(analytic_mse(m, H, power, noise)).epsilon(1e-12));
  }
}

TEST_CASE("power constraint holds for solver outputs") {
  const ChannelSet H = sim::unit_rician_channels(3, 4, 3.0, 4);
  const bnb::SolveReport r = bnb::solve_global(H);
  const AirCompDesign d = make_design(r.optimal_m, H, 2.0, 0.1);
  CHECK(d.eta >= 2.0 * (1 - 1e-9));
  for (Eigen::Index k = 0; k < d.w.size(); ++k) CHECK(std::norm(d.w[k]) <= 2.0 * (1 + 1e-12));
}

TEST_CASE("noiseless empirical MSE vanishes") {
  const ChannelSet H = sim::unit_rician_channels(4, 5, 3.0, 6);
  const ComplexVector m = scale_to_feasible(H, ComplexVector::Ones(4));
  const AirCompDesign d = make_design(m, H, 1.0, 0.0);
  // Perfect alignment up to rounding in the per-trial sums.
  CHECK(empirical_mse(d, H, 10000, 3) < 1e-25);
}

TEST_CASE("empirical MSE concentrates on the analytic value") {
  const ChannelSet H = sim::unit_rician_channels(4, 5, 3.0, 10);
  const ComplexVector m = scale_to_feasible(H, H.matrix().rowwise().sum());
  const AirCompDesign d = make_design(m, H, 1.0, 0.3);
  const double analytic = analytic_mse(m, H, 1.0, 0.3);
  CHECK(empirical_mse(d, H, 100000, 12) == doctest::Approx(analytic).epsilon(0.02));
}

TEST_CASE("parallel estimator is bitwise identical") {
  const ChannelSet H = sim::unit_rician_channels(3, 4, 3.0, 1);
  const ComplexVector m = scale_to_feasible(H, ComplexVector::Ones(3));
  const AirCompDesign d = make_design(m, H, 1.0, 0.5);
  const double serial = empirical_mse(d, H, 20000, 5);
  CHECK(empirical_mse(d, H, 20000, 5) == serial);
  for (int threads : {1, 2, 4}) CHECK(empirical_mse_parallel(d, H, 20000, 5, threads) == serial);
  // Trial counts that are not a multiple of the block size.
  CHECK(empirical_mse_parallel(d, H, 5001, 5, 3) == empirical_mse(d, H, 5001, 5));
}

TEST_CASE("alignment is unbiased") {
  const ChannelSet H = sim::unit_rician_channels(3, 4, 3.0, 7);
  const ComplexVector m = scale_to_feasible(H, ComplexVector::Ones(3));
  const AirCompDesign d = make_design(m, H, 1.0, 0.5);
  const double mse = analytic_mse(m, H, 1.0, 0.5);
  const std::uint64_t trials = 100000;
  // Five standard errors of the sample mean.
  const double bound = 5.0 * std::sqrt(mse / static_cast<double>(trials));
  CHECK(std::abs(empirical_bias(d, H, trials, 9)) < bound);
}
