#include "airbeam/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace airbeam::geometry {

Sector::Sector(double lower, double upper) : lower_(lower), upper_(upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || lower < 0.0 || lower >= kTwoPi ||
      upper <= lower || upper > kTwoPi) {
    throw std::invalid_argument("Sector: invalid interval [" + std::to_string(lower) + ", " +
                                std::to_string(upper) + ")");
  }
}

std::pair<Sector, Sector> Sector::bisect() const {
  const double mid = middle();
  return {Sector(lower_, mid), Sector(mid, upper_)};
}

SectorBox SectorBox::root(std::size_t devices) {
  return SectorBox{std::vector<Sector>(devices, Sector::full())};
}

std::size_t SectorBox::widest() const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < sectors.size(); ++k) {
    if (sectors[k].width() > sectors[best].width()) best = k;
  }
  return best;
}

std::vector<HalfPlane> hull_constraints(const Sector& s) {
  const double w = s.width();
  if (w > std::numbers::pi) return {};
  const std::complex<double> jj(0.0, 1.0);
  return {
      // chord through e^{jl} and e^{ju}
      HalfPlane{std::polar(1.0, s.middle()), std::cos(0.5 * w)},
      // Im{x e^{-jl}} >= 0
      HalfPlane{jj * std::polar(1.0, s.lower()), 0.0},
      // Im{x e^{-ju}} <= 0
      HalfPlane{-jj * std::polar(1.0, s.upper()), 0.0},
  };
}

namespace {

double argument(std::complex<double> x) {
  double a = std::arg(x);
  if (a < 0.0) a += kTwoPi;
  return a;
}

}  // namespace

bool sector_contains(const Sector& s, std::complex<double> x, double tol) {
  if (x == std::complex<double>(0.0, 0.0)) return false;
  const double a = argument(x);
  auto inside = [&](double v) { return v >= s.lower() - tol && v < s.upper() - tol; };
  // Arguments just below 2*pi are also just below 0.
  return inside(a) || (a > kTwoPi - tol && inside(a - kTwoPi));
}

bool sector_contains_closed(const Sector& s, std::complex<double> x, double tol) {
  if (x == std::complex<double>(0.0, 0.0)) return false;
  const double a = argument(x);
  auto inside = [&](double v) { return v >= s.lower() - tol && v <= s.upper() + tol; };
  return inside(a) || (a > kTwoPi - tol && inside(a - kTwoPi)) || (a < tol && inside(a + kTwoPi));
}

bool feasible_point(std::complex<double> x, double tol) { return std::abs(x) >= 1.0 - tol; }

std::pair<SectorBox, SectorBox> split_box(const SectorBox& box, std::size_t k) {
  if (k >= box.size()) throw std::out_of_range("split_box: device index out of range");
  auto [left_sector, right_sector] = box[k].bisect();
  SectorBox left = box;
  SectorBox right = box;
  left.sectors[k] = left_sector;
  right.sectors[k] = right_sector;
  return {std::move(left), std::move(right)};
}

}  // namespace airbeam::geometry
