#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hmotion/tolerances.hpp"

namespace hmotion {

using cplx = std::complex<double>;

/// One piece of a path: a straight segment or a circular arc.
struct PathPiece {
  enum class Kind { Segment, Arc };
  Kind kind = Kind::Segment;
  cplx from{0.0}, to{0.0};    // segment endpoints
  cplx center{0.0};           // arc data
  double radius = 0.0;
  double start_angle = 0.0;
  double sweep = 0.0;

  cplx at(double s) const;    // s in [0, 1]
  cplx begin() const { return at(0.0); }
  cplx end() const { return at(1.0); }
  double length() const;
  PathPiece reversed() const;
};

/// Piecewise segment/arc curve [0, 1] -> C parameterized proportionally to
/// arc length. A zero-length path is a constant path.
class Path {
 public:
  static Path constant(cplx point);
  static Path segment(cplx from, cplx to);
  static Path arc(cplx center, double radius, double start_angle, double sweep);
  /// Full counterclockwise circle around `center` through `through`.
  static Path circle_through(cplx center, cplx through, int turns = 1);

  cplx at(double t) const;
  cplx start() const { return start_; }
  cplx end() const { return end_; }
  double length() const { return total_length_; }
  bool is_closed(double eps = 1e-12) const { return std::abs(end_ - start_) <= eps; }

  /// This path followed by `next`; throws if next does not start at end().
  Path then(const Path& next) const;
  Path reversed() const;
  /// This closed path traversed `times` times.
  Path repeated(int times) const;

  const std::vector<PathPiece>& pieces() const { return pieces_; }

 private:
  explicit Path(std::vector<PathPiece> pieces);
  std::vector<PathPiece> pieces_;
  std::vector<double> cumulative_;  // normalized arc length at piece ends
  double total_length_ = 0.0;
  cplx start_{0.0}, end_{0.0};
};

enum class DomainKind { Disk, PuncturedDisk, Annulus, FinitelyPuncturedDisk };

std::string_view to_string(DomainKind kind);
DomainKind domain_kind_from_string(std::string_view text);

/// A hyperbolic plane domain with a basepoint and explicit generators of
/// its fundamental group (counterclockwise loops based at the basepoint).
class ParameterDomain {
 public:
  static ParameterDomain disk(cplx center, double radius, cplx basepoint,
                              const Tolerances& tol = {});
  static ParameterDomain punctured_disk(cplx center, double radius,
                                        cplx puncture, cplx basepoint,
                                        const Tolerances& tol = {});
  static ParameterDomain annulus(cplx center, double inner, double outer,
                                 cplx basepoint, const Tolerances& tol = {});
  static ParameterDomain finitely_punctured_disk(cplx center, double radius,
                                                 std::vector<cplx> punctures,
                                                 cplx basepoint,
                                                 const Tolerances& tol = {});

  DomainKind kind() const { return kind_; }
  cplx center() const { return center_; }
  double outer_radius() const { return outer_; }
  double inner_radius() const { return inner_; }
  const std::vector<cplx>& punctures() const { return punctures_; }
  cplx basepoint() const { return basepoint_; }
  const std::vector<Path>& generators() const { return generators_; }

  /// Euclidean distance from z to the complement of the domain (negative
  /// outside).
  double boundary_distance(cplx z) const;
  bool contains(cplx z) const { return boundary_distance(z) > 0.0; }

  /// Smallest boundary distance over a dense sampling of the path.
  double clearance(const Path& path) const;

  /// A path from the basepoint to `target` keeping at least `clearance`
  /// from the boundary (half the target's own boundary distance when that
  /// is below twice `clearance`). Throws Error(OutsideDomain) when none is
  /// found.
  Path route(cplx target, double clearance) const;
  /// Path between two interior points (segment when clear, otherwise via
  /// the basepoint).
  Path route_between(cplx from, cplx to, double clearance) const;

  /// Deterministic low-discrepancy (Halton 2,3) points of the domain with
  /// boundary distance at least `clearance`.
  std::vector<cplx> sample_points(std::size_t count, double clearance) const;

 private:
  ParameterDomain() = default;
  std::optional<Path> find_route(cplx target, double need) const;
  void build_generators(const Tolerances& tol);
  void check_basepoint(const Tolerances& tol) const;

  DomainKind kind_ = DomainKind::Disk;
  cplx center_{0.0};
  double outer_ = 1.0;
  double inner_ = 0.0;
  std::vector<cplx> punctures_;
  cplx basepoint_{0.0};
  std::vector<Path> generators_;
};

}  // namespace hmotion
