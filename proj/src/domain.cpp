#include "hmotion/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "hmotion/error.hpp"

namespace hmotion {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double halton(std::size_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace

cplx PathPiece::at(double s) const {
  if (s <= 0.0) return from;
  if (s >= 1.0) return to;
  if (kind == Kind::Segment) return from + s * (to - from);
  return center + std::polar(radius, start_angle + s * sweep);
}

double PathPiece::length() const {
  if (kind == Kind::Segment) return std::abs(to - from);
  return std::abs(sweep) * radius;
}

PathPiece PathPiece::reversed() const {
  PathPiece r = *this;
  std::swap(r.from, r.to);
  if (kind == Kind::Arc) {
    r.start_angle = start_angle + sweep;
    r.sweep = -sweep;
  }
  return r;
}

Path::Path(std::vector<PathPiece> pieces) {
  if (pieces.empty()) {
    throw Error(ErrorKind::InvalidArgument, "path without pieces");
  }
  start_ = pieces.front().from;
  end_ = pieces.back().to;
  for (auto& p : pieces) {
    if (p.length() > 0.0) pieces_.push_back(p);
  }
  if (pieces_.empty()) {
    PathPiece c;
    c.from = c.to = start_;
    pieces_.push_back(c);
  }
  double acc = 0.0;
  for (const auto& p : pieces_) {
    acc += p.length();
    cumulative_.push_back(acc);
  }
  total_length_ = acc;
  if (acc > 0.0) {
    for (auto& c : cumulative_) c /= acc;
    cumulative_.back() = 1.0;
  }
}

Path Path::constant(cplx point) {
  PathPiece p;
  p.from = p.to = point;
  return Path({p});
}

Path Path::segment(cplx from, cplx to) {
  PathPiece p;
  p.from = from;
  p.to = to;
  return Path({p});
}

Path Path::arc(cplx center, double radius, double start_angle, double sweep) {
  PathPiece p;
  p.kind = PathPiece::Kind::Arc;
  p.center = center;
  p.radius = radius;
  p.start_angle = start_angle;
  p.sweep = sweep;
  p.from = center + std::polar(radius, start_angle);
  p.to = center + std::polar(radius, start_angle + sweep);
  return Path({p});
}

Path Path::circle_through(cplx center, cplx through, int turns) {
  PathPiece p;
  p.kind = PathPiece::Kind::Arc;
  p.center = center;
  p.radius = std::abs(through - center);
  p.start_angle = std::arg(through - center);
  p.sweep = kTwoPi * turns;
  p.from = p.to = through;
  return Path({p});
}

cplx Path::at(double t) const {
  if (t <= 0.0 || total_length_ == 0.0) return start_;
  if (t >= 1.0) return end_;
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), t);
  const std::size_t k = std::min<std::size_t>(it - cumulative_.begin(), pieces_.size() - 1);
  const double lo = k == 0 ? 0.0 : cumulative_[k - 1];
  const double hi = cumulative_[k];
  return pieces_[k].at(hi > lo ? (t - lo) / (hi - lo) : 0.0);
}

Path Path::then(const Path& next) const {
  if (std::abs(next.start_ - end_) > 1e-12 * (1.0 + std::abs(end_))) {
    throw Error(ErrorKind::InvalidArgument,
                "path concatenation: next path does not start at this end");
  }
  std::vector<PathPiece> pieces = pieces_;
  pieces.front().from = start_;
  pieces.back().to = end_;
  auto tail = next.pieces_;
  tail.front().from = end_;
  tail.back().to = next.end_;
  pieces.insert(pieces.end(), tail.begin(), tail.end());
  return Path(std::move(pieces));
}

Path Path::reversed() const {
  std::vector<PathPiece> pieces;
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    pieces.push_back(it->reversed());
  }
  pieces.front().from = end_;
  pieces.back().to = start_;
  return Path(std::move(pieces));
}

Path Path::repeated(int times) const {
  if (times < 1) throw Error(ErrorKind::InvalidArgument, "repeat count < 1");
  if (!is_closed()) throw Error(ErrorKind::NotClosed, "repeating an open path");
  Path result = *this;
  for (int k = 1; k < times; ++k) result = result.then(*this);
  return result;
}

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Disk: return "disk";
    case DomainKind::PuncturedDisk: return "punctured-disk";
    case DomainKind::Annulus: return "annulus";
    case DomainKind::FinitelyPuncturedDisk: return "finitely-punctured-disk";
  }
  return "disk";
}

DomainKind domain_kind_from_string(std::string_view text) {
  for (auto k : {DomainKind::Disk, DomainKind::PuncturedDisk, DomainKind::Annulus,
                 DomainKind::FinitelyPuncturedDisk}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown domain kind '" + std::string(text) + "'");
}

double ParameterDomain::boundary_distance(cplx z) const {
  double d = outer_ - std::abs(z - center_);
  if (kind_ == DomainKind::Annulus) d = std::min(d, std::abs(z - center_) - inner_);
  for (const cplx p : punctures_) d = std::min(d, std::abs(z - p));
  return d;
}

double ParameterDomain::clearance(const Path& path) const {
  const double len = path.length();
  const std::size_t n = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(len / 1e-3)), 64, 20000);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= n; ++k) {
    best = std::min(best, boundary_distance(path.at(static_cast<double>(k) / n)));
  }
  // boundary_distance is 1-Lipschitz, so this is a lower bound.
  return best - 0.5 * len / static_cast<double>(n);
}

void ParameterDomain::check_basepoint(const Tolerances& tol) const {
  if (!(outer_ > 0.0) || !std::isfinite(outer_)) {
    throw Error(ErrorKind::InvalidArgument, "domain radius must be positive");
  }
  if (kind_ == DomainKind::Annulus && !(inner_ > 0.0 && inner_ < outer_)) {
    throw Error(ErrorKind::InvalidArgument, "annulus radii must satisfy 0 < inner < outer");
  }
  for (const cplx p : punctures_) {
    if (std::abs(p - center_) >= outer_) {
      throw Error(ErrorKind::InvalidArgument, "domain puncture outside the disk");
    }
  }
  if (boundary_distance(basepoint_) < tol.boundary) {
    throw Error(ErrorKind::OutsideDomain, "basepoint is not in the domain interior");
  }
}

void ParameterDomain::build_generators(const Tolerances& tol) {
  generators_.clear();
  const double need = tol.boundary;
  if (kind_ == DomainKind::Disk) return;
  if (kind_ == DomainKind::Annulus) {
    Path loop = Path::circle_through(center_, basepoint_);
    if (clearance(loop) < need) {
      throw Error(ErrorKind::InvalidArgument,
                  "annulus generator loop through the basepoint is too close to the boundary");
    }
    generators_.push_back(std::move(loop));
    return;
  }
  for (std::size_t k = 0; k < punctures_.size(); ++k) {
    const cplx p = punctures_[k];
    const double reach = std::abs(basepoint_ - p);
    bool encloses_other = false;
    double nearest_other = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < punctures_.size(); ++j) {
      if (j == k) continue;
      const double d = std::abs(punctures_[j] - p);
      nearest_other = std::min(nearest_other, d);
      if (d < reach + need) encloses_other = true;
    }
    Path circle = Path::circle_through(p, basepoint_);
    if (!encloses_other && clearance(circle) >= need) {
      generators_.push_back(std::move(circle));
      continue;
    }
    // Lollipop: segment towards the puncture, small circle, segment back.
    const cplx u = (p - basepoint_) / reach;
    const double rho = 0.5 * std::min({nearest_other, outer_ - std::abs(p - center_), reach});
    const cplx stop = p - rho * u;
    Path loop = Path::segment(basepoint_, stop)
                    .then(Path::circle_through(p, stop))
                    .then(Path::segment(stop, basepoint_));
    if (rho < 2.0 * need || clearance(loop) < need) {
      throw Error(ErrorKind::InvalidArgument,
                  "cannot build a generator loop around domain puncture " + std::to_string(k));
    }
    generators_.push_back(std::move(loop));
  }
}

ParameterDomain ParameterDomain::disk(cplx center, double radius, cplx basepoint,
                                      const Tolerances& tol) {
  ParameterDomain d;
  d.kind_ = DomainKind::Disk;
  d.center_ = center;
  d.outer_ = radius;
  d.basepoint_ = basepoint;
  d.check_basepoint(tol);
  d.build_generators(tol);
  return d;
}

ParameterDomain ParameterDomain::punctured_disk(cplx center, double radius, cplx puncture,
                                                cplx basepoint, const Tolerances& tol) {
  ParameterDomain d;
  d.kind_ = DomainKind::PuncturedDisk;
  d.center_ = center;
  d.outer_ = radius;
  d.punctures_ = {puncture};
  d.basepoint_ = basepoint;
  d.check_basepoint(tol);
  d.build_generators(tol);
  return d;
}

ParameterDomain ParameterDomain::annulus(cplx center, double inner, double outer,
                                         cplx basepoint, const Tolerances& tol) {
  ParameterDomain d;
  d.kind_ = DomainKind::Annulus;
  d.center_ = center;
  d.inner_ = inner;
  d.outer_ = outer;
  d.basepoint_ = basepoint;
  d.check_basepoint(tol);
  d.build_generators(tol);
  return d;
}

ParameterDomain ParameterDomain::finitely_punctured_disk(cplx center, double radius,
                                                         std::vector<cplx> punctures,
                                                         cplx basepoint,
                                                         const Tolerances& tol) {
  if (punctures.empty()) {
    throw Error(ErrorKind::InvalidArgument, "finitely-punctured-disk needs punctures");
  }
  ParameterDomain d;
  d.kind_ = DomainKind::FinitelyPuncturedDisk;
  d.center_ = center;
  d.outer_ = radius;
  d.punctures_ = std::move(punctures);
  d.basepoint_ = basepoint;
  d.check_basepoint(tol);
  d.build_generators(tol);
  return d;
}

std::optional<Path> ParameterDomain::find_route(cplx target, double need) const {
  const cplx x0 = basepoint_;
  if (target == x0) return Path::constant(x0);

  const Path direct = Path::segment(x0, target);
  if (clearance(direct) >= need) return direct;

  // Arc around the center combined with a radial segment, both orders and
  // both directions.
  const double r0 = std::abs(x0 - center_), r1 = std::abs(target - center_);
  const double a0 = std::arg(x0 - center_), a1 = std::arg(target - center_);
  double sweep = std::remainder(a1 - a0, kTwoPi);
  for (double s : {sweep, sweep > 0 ? sweep - kTwoPi : sweep + kTwoPi}) {
    if (r0 > 0.0) {
      Path arc_first = Path::arc(center_, r0, a0, s);
      arc_first = Path::segment(x0, arc_first.start()).then(arc_first);
      Path candidate = arc_first.then(Path::segment(arc_first.end(), target));
      if (clearance(candidate) >= need) return candidate;
    }
    if (r1 > 0.0) {
      const cplx corner = center_ + std::polar(r1, a0);
      Path candidate = Path::segment(x0, corner).then(Path::arc(center_, r1, a0, s));
      candidate = candidate.then(Path::segment(candidate.end(), target));
      if (clearance(candidate) >= need) return candidate;
    }
  }

  auto waypoints = sample_points(96, need);
  std::stable_sort(waypoints.begin(), waypoints.end(), [&](cplx a, cplx b) {
    return std::abs(a - x0) + std::abs(a - target) < std::abs(b - x0) + std::abs(b - target);
  });
  for (const cplx w : waypoints) {
    Path candidate = Path::segment(x0, w).then(Path::segment(w, target));
    if (clearance(candidate) >= need) return candidate;
  }
  const std::size_t limit = std::min<std::size_t>(24, waypoints.size());
  for (std::size_t a = 0; a < limit; ++a) {
    for (std::size_t b = 0; b < limit; ++b) {
      if (a == b) continue;
      Path candidate = Path::segment(x0, waypoints[a])
                           .then(Path::segment(waypoints[a], waypoints[b]))
                           .then(Path::segment(waypoints[b], target));
      if (clearance(candidate) >= need) return candidate;
    }
  }
  return std::nullopt;
}

Path ParameterDomain::route(cplx target, double need) const {
  const double bd = boundary_distance(target);
  if (bd < need) {
    throw Error(ErrorKind::OutsideDomain, "route target too close to the domain boundary");
  }
  if (auto path = find_route(target, need)) return *path;
  // A target barely inside the collar is approached with half its own
  // boundary distance.
  if (auto path = find_route(target, std::min(need, 0.5 * bd))) return *path;
  throw Error(ErrorKind::OutsideDomain, "no route from the basepoint to the target");
}

Path ParameterDomain::route_between(cplx from, cplx to, double need) const {
  const Path direct = Path::segment(from, to);
  if (clearance(direct) >= need) return direct;
  return route(from, need).reversed().then(route(to, need));
}

std::vector<cplx> ParameterDomain::sample_points(std::size_t count, double need) const {
  std::vector<cplx> out;
  out.reserve(count);
  const std::size_t cap = 200 * count + 1000;
  for (std::size_t k = 1; out.size() < count && k < cap; ++k) {
    const cplx z = center_ + outer_ * cplx(2.0 * halton(k, 2) - 1.0, 2.0 * halton(k, 3) - 1.0);
    if (boundary_distance(z) >= need) out.push_back(z);
  }
  return out;
}

}  // namespace hmotion
