#include "hmotion/sphere.hpp"

#include <cmath>
#include <limits>

#include "hmotion/error.hpp"

namespace hmotion {

SpherePoint::SpherePoint(cplx value) : value_(value) {
  if (std::isnan(value.real()) || std::isnan(value.imag())) {
    throw Error(ErrorKind::InvalidArgument, "SpherePoint with NaN component");
  }
  if (std::isinf(value.real()) || std::isinf(value.imag())) {
    value_.reset();
  }
}

cplx SpherePoint::value() const {
  if (!value_) {
    throw Error(ErrorKind::InvalidArgument, "value() of the point at infinity");
  }
  return *value_;
}

double chordal_distance(cplx a, cplx b) {
  return 2.0 * std::abs(a - b) /
         std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
}

double chordal_to_infinity(cplx a) {
  return 2.0 / std::sqrt(1.0 + std::norm(a));
}

double chordal_distance(const SpherePoint& a, const SpherePoint& b) {
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite()) return chordal_to_infinity(b.value());
  if (b.is_infinite()) return chordal_to_infinity(a.value());
  return chordal_distance(a.value(), b.value());
}

bool approx_equal(const SpherePoint& a, const SpherePoint& b,
                  const Tolerances& tol) {
  return chordal_distance(a, b) <= tol.eq;
}

SpherePoint Mobius::operator()(const SpherePoint& z) const {
  if (z.is_infinite()) {
    if (c == cplx(0.0)) return SpherePoint::infinity();
    return SpherePoint(a / c);
  }
  const cplx w = z.value();
  const cplx den = c * w + d;
  if (den == cplx(0.0)) return SpherePoint::infinity();
  return SpherePoint((a * w + b) / den);
}

Mobius operator*(const Mobius& f, const Mobius& g) {
  return {f.a * g.a + f.b * g.c, f.a * g.b + f.b * g.d,
          f.c * g.a + f.d * g.c, f.c * g.b + f.d * g.d};
}

Mobius normalize_mobius(const SpherePoint& p, const SpherePoint& q,
                        const SpherePoint& r, const Tolerances& tol) {
  if (chordal_distance(p, q) <= tol.sep || chordal_distance(q, r) <= tol.sep ||
      chordal_distance(p, r) <= tol.sep) {
    throw Error(ErrorKind::DegenerateTriple,
                "normalize_mobius: two of the three points coincide");
  }
  Mobius m;
  if (r.is_infinite()) {
    // z -> (z - p) / (q - p)
    m = {1.0, -p.value(), 0.0, q.value() - p.value()};
  } else if (p.is_infinite()) {
    // z -> (q - r) / (z - r)
    m = {0.0, q.value() - r.value(), 1.0, -r.value()};
  } else if (q.is_infinite()) {
    // z -> (z - p) / (z - r)
    m = {1.0, -p.value(), 1.0, -r.value()};
  } else {
    const cplx pv = p.value(), qv = q.value(), rv = r.value();
    m = {qv - rv, -pv * (qv - rv), qv - pv, -rv * (qv - pv)};
  }
  const cplx det = m.determinant();
  if (std::abs(det) < tol.det) {
    throw Error(ErrorKind::DegenerateTriple,
                "normalize_mobius: determinant below floor");
  }
  const cplx s = std::sqrt(det);
  return {m.a / s, m.b / s, m.c / s, m.d / s};
}

double min_chordal_separation(std::span<const cplx> points, std::size_t* first,
                              std::size_t* second) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dinf = chordal_to_infinity(points[i]);
    if (dinf < best) {
      best = dinf;
      bi = i;
      bj = points.size();
    }
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = chordal_distance(points[i], points[j]);
      if (d < best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  }
  if (first) *first = bi;
  if (second) *second = bj;
  return best;
}

double Configuration::separation() const {
  return min_chordal_separation(points_);
}

Configuration Configuration::without_last() const {
  if (points_.size() <= 2) {
    throw Error(ErrorKind::InvalidArgument,
                "cannot drop a fixed puncture from a configuration");
  }
  return Configuration(
      std::vector<cplx>(points_.begin(), points_.end() - 1));
}

Configuration Configuration::with_point(cplx z, const Tolerances& tol) const {
  auto pts = points_;
  pts.push_back(z);
  return make_configuration(std::span<const cplx>(pts), tol);
}

Configuration make_configuration(std::span<const SpherePoint> points,
                                 const Tolerances& tol) {
  std::vector<cplx> finite;
  finite.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].is_infinite()) {
      throw Error(ErrorKind::InfinitePuncture,
                  "configuration entry " + std::to_string(i) +
                      " is the point at infinity");
    }
    finite.push_back(points[i].value());
  }
  return make_configuration(std::span<const cplx>(finite), tol);
}

Configuration make_configuration(std::span<const cplx> points,
                                 const Tolerances& tol) {
  if (points.size() < 2) {
    throw Error(ErrorKind::InvalidArgument,
                "a configuration holds at least the punctures 0 and 1");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const cplx z = points[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorKind::InfinitePuncture,
                  "configuration entry " + std::to_string(i) +
                      " is not finite");
    }
  }
  if (std::abs(points[0]) > tol.eq || std::abs(points[1] - 1.0) > tol.eq) {
    throw Error(ErrorKind::InvalidArgument,
                "configuration must start with the punctures 0 and 1");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = chordal_distance(points[i], points[j]);
      if (d <= tol.sep) throw SeparationViolation(i, j, d);
    }
  }
  std::vector<cplx> stored(points.begin(), points.end());
  stored[0] = 0.0;
  stored[1] = 1.0;
  return Configuration(std::move(stored));
}

Configuration make_configuration(std::initializer_list<cplx> points,
                                 const Tolerances& tol) {
  return make_configuration(
      std::span<const cplx>(points.begin(), points.size()), tol);
}

}  // namespace hmotion
