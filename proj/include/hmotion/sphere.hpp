#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "hmotion/tolerances.hpp"

namespace hmotion {

using cplx = std::complex<double>;

/// A point of the Riemann sphere. Infinity is symbolic, never a large float.
class SpherePoint {
 public:
  SpherePoint(cplx value);  // NOLINT: implicit from finite values
  SpherePoint(double value) : SpherePoint(cplx(value, 0.0)) {}  // NOLINT

  static SpherePoint infinity() { return SpherePoint(); }

  bool is_infinite() const noexcept { return !value_.has_value(); }
  bool is_finite() const noexcept { return value_.has_value(); }

  /// Throws Error(InvalidArgument) on infinity.
  cplx value() const;

 private:
  SpherePoint() = default;
  std::optional<cplx> value_;
};

/// Chordal distance on the sphere of diameter 2.
double chordal_distance(const SpherePoint& a, const SpherePoint& b);

/// Chordal distance between two finite points.
double chordal_distance(cplx a, cplx b);

/// Chordal distance from a finite point to infinity.
double chordal_to_infinity(cplx a);

bool approx_equal(const SpherePoint& a, const SpherePoint& b,
                  const Tolerances& tol = {});

struct Mobius {
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

  static Mobius identity() { return {}; }

  cplx determinant() const { return a * d - b * c; }
  SpherePoint operator()(const SpherePoint& z) const;
  Mobius inverse() const { return {d, -b, -c, a}; }
  friend Mobius operator*(const Mobius& f, const Mobius& g);
};

/// The unique Mobius transform with p -> 0, q -> 1, r -> infinity,
/// normalized to determinant 1. Throws Error(DegenerateTriple).
Mobius normalize_mobius(const SpherePoint& p, const SpherePoint& q,
                        const SpherePoint& r, const Tolerances& tol = {});

/// Ordered tuple of pairwise-separated finite punctures with
/// punctures[0] = 0 and punctures[1] = 1. Infinity is an implicit fixed
/// puncture and never stored.
class Configuration {
 public:
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t moving_count() const noexcept { return points_.size() - 2; }
  cplx operator[](std::size_t i) const { return points_[i]; }
  std::span<const cplx> points() const noexcept { return points_; }

  /// Minimum pairwise chordal distance, including every puncture's distance
  /// to infinity.
  double separation() const;

  /// Configuration with the last puncture dropped.
  Configuration without_last() const;
  Configuration with_point(cplx z, const Tolerances& tol = {}) const;

  friend Configuration make_configuration(std::span<const SpherePoint>,
                                          const Tolerances&);
  friend Configuration make_configuration(std::span<const cplx>,
                                          const Tolerances&);

 private:
  explicit Configuration(std::vector<cplx> points)
      : points_(std::move(points)) {}
  std::vector<cplx> points_;
};

/// Validates a labeled configuration. Throws SeparationViolation(i, j) for
/// the first close pair, Error(InfinitePuncture) for an infinite entry and
/// Error(InvalidArgument) when the first two entries are not 0 and 1.
Configuration make_configuration(std::span<const SpherePoint> points,
                                 const Tolerances& tol = {});
Configuration make_configuration(std::span<const cplx> points,
                                 const Tolerances& tol = {});
Configuration make_configuration(std::initializer_list<cplx> points,
                                 const Tolerances& tol = {});

/// Minimum chordal distance over all pairs of `points` and over each point
/// against infinity. Returns the closest pair through the optional outputs
/// (j == points.size() stands for infinity).
double min_chordal_separation(std::span<const cplx> points,
                              std::size_t* first = nullptr,
                              std::size_t* second = nullptr);

}  // namespace hmotion
