#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

namespace airbeam::geometry {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kBoundaryTolerance = 1e-12;

/// Half-open argument interval [lower, upper) with 0 <= lower < upper <= 2*pi.
class Sector {
 public:
  Sector(double lower, double upper);

  static Sector full() { return {0.0, kTwoPi}; }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double width() const { return upper_ - lower_; }
  double middle() const { return 0.5 * (lower_ + upper_); }

  std::pair<Sector, Sector> bisect() const;

  friend bool operator==(const Sector&, const Sector&) = default;

 private:
  double lower_;
  double upper_;
};

/// Cartesian product of one sector per device.
struct SectorBox {
  std::vector<Sector> sectors;

  static SectorBox root(std::size_t devices);

  std::size_t size() const { return sectors.size(); }
  const Sector& operator[](std::size_t k) const { return sectors[k]; }
  std::size_t widest() const;

  friend bool operator==(const SectorBox&, const SectorBox&) = default;
};

/// Re{conj(x) * normal} >= offset, i.e. <x, normal> >= offset in R^2.
struct HalfPlane {
  std::complex<double> normal;
  double offset = 0.0;

  double slack(std::complex<double> x) const {
    return x.real() * normal.real() + x.imag() * normal.imag() - offset;
  }
  bool contains(std::complex<double> x, double tol = kBoundaryTolerance) const {
    return slack(x) >= -tol;
  }
};

/// Outer description of conv{x : |x| >= 1, arg x in [l, u)}.
///
/// For width <= pi this is the chord through e^{jl}, e^{ju} plus the two
/// bounding rays. Wider sectors have the whole plane as hull and yield no cuts.
std::vector<HalfPlane> hull_constraints(const Sector& s);

/// Argument membership under the half-open convention; x = 0 is never inside.
bool sector_contains(const Sector& s, std::complex<double> x, double tol = kBoundaryTolerance);

/// Membership in the closed sector [l, u] (used for scaled relaxation points,
/// which may sit on the upper ray).
bool sector_contains_closed(const Sector& s, std::complex<double> x,
                            double tol = kBoundaryTolerance);

/// |x| >= 1 up to tol.
bool feasible_point(std::complex<double> x, double tol = kBoundaryTolerance);

/// Bisects sector k of the box; both halves keep every other sector.
std::pair<SectorBox, SectorBox> split_box(const SectorBox& box, std::size_t k);

}  // namespace airbeam::geometry
