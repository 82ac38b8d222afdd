#include "hmotion/motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hmotion/continuation.hpp"
#include "hmotion/error.hpp"

namespace hmotion {

namespace {

constexpr std::size_t kCirclePoints = 32;
constexpr std::size_t kLoopSamples = 64;
constexpr std::size_t kNewtonStarts = 3;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

StrandSpec StrandSpec::closed_form(Expr expr) {
  if (expr.depends_on_variable()) {
    throw Error(ErrorKind::InvalidArgument, "closed-form strand must not mention z");
  }
  return StrandSpec(Kind::ClosedForm, std::move(expr), 0.0);
}

StrandSpec StrandSpec::algebraic_root(Expr polynomial, cplx root_at_basepoint) {
  const int degree = polynomial.variable_degree();
  if (degree < 1) {
    throw Error(ErrorKind::InvalidArgument,
                "algebraic strand needs a polynomial of degree >= 1 in z");
  }
  return StrandSpec(Kind::AlgebraicRoot, std::move(polynomial), root_at_basepoint);
}

cplx StrandSpec::eval(cplx lambda) const {
  if (kind_ != Kind::ClosedForm) {
    throw Error(ErrorKind::OffTrack,
                "algebraic strands are only evaluated by continuation along a path");
  }
  return expr_(lambda);
}

Dual StrandSpec::eval_with_slope(cplx lambda) const {
  if (kind_ != Kind::ClosedForm) {
    throw Error(ErrorKind::OffTrack,
                "algebraic strands are only evaluated by continuation along a path");
  }
  return expr_.eval_with_parameter_slope(lambda);
}

StrandSpec StrandSpec::compose(const Expr& inner) const {
  return StrandSpec(kind_, expr_.substitute_parameter(inner), anchor_);
}

std::string StrandSpec::describe() const {
  if (kind_ == Kind::ClosedForm) return "expr = " + expr_.to_string();
  return "poly = " + expr_.to_string() + "; root = " + format_constant(anchor_);
}

std::optional<cplx> polish_root(const Expr& polynomial, cplx lambda, cplx guess,
                                int max_iterations) {
  cplx z = guess;
  for (int it = 0; it < max_iterations; ++it) {
    const Dual p = polynomial.eval_with_variable_slope(lambda, z);
    if (p.slope == cplx(0.0)) return std::nullopt;
    const cplx delta = p.value / p.slope;
    z -= delta;
    if (!finite(z)) return std::nullopt;
    if (std::abs(delta) <= 1e-15 * (1.0 + std::abs(z))) return z;
  }
  return std::nullopt;
}

namespace {

Configuration anchored_base(const Configuration& base, const std::vector<StrandSpec>& strands,
                            cplx x0, const Tolerances& tol) {
  if (strands.size() != base.moving_count()) {
    throw Error(ErrorKind::InvalidArgument,
                "expected one strand per moving puncture (" +
                    std::to_string(base.moving_count()) + "), got " +
                    std::to_string(strands.size()));
  }
  std::vector<cplx> pts(base.points().begin(), base.points().end());
  for (std::size_t k = 0; k < strands.size(); ++k) {
    const std::size_t index = k + 2;
    const StrandSpec& s = strands[k];
    if (s.is_closed_form()) {
      const cplx v = s.eval(x0);
      if (!finite(v) || chordal_distance(v, pts[index]) > tol.eq) {
        std::ostringstream os;
        os << "strand " << index << " evaluates to " << v << " at the basepoint, expected "
           << pts[index];
        throw ValidationFailure("basepoint", x0, os.str());
      }
      continue;
    }
    const auto root = polish_root(s.polynomial(), x0, s.anchor());
    if (!root || std::abs(*root - pts[index]) > 1e-6 * (1.0 + std::abs(pts[index]))) {
      throw ValidationFailure("basepoint", x0,
                              "algebraic strand " + std::to_string(index) +
                                  " has no root at its base value");
    }
    const Dual p = s.polynomial().eval_with_variable_slope(x0, *root);
    if (std::abs(p.slope) <= 1e-10) {
      throw ValidationFailure("basepoint", x0,
                              "algebraic strand " + std::to_string(index) +
                                  " is anchored at a multiple root (zero discriminant)");
    }
    pts[index] = *root;
  }
  return make_configuration(std::span<const cplx>(pts), tol);
}

}  // namespace

MotionFamily::MotionFamily(ParameterDomain domain, Configuration base,
                           std::vector<StrandSpec> strands, const Tolerances& tol)
    : domain_(std::move(domain)),
      base_(anchored_base(base, strands, domain_.basepoint(), tol)),
      strands_(std::move(strands)) {
  for (auto& s : strands_) {
    if (!s.is_closed_form()) {
      // Re-anchor at the polished root so continuation starts exactly on it.
      const std::size_t index = static_cast<std::size_t>(&s - strands_.data()) + 2;
      s = StrandSpec::algebraic_root(s.polynomial(), base_[index]);
    }
  }
}

MotionFamily MotionFamily::identity(ParameterDomain domain, Configuration base) {
  std::vector<StrandSpec> strands;
  for (std::size_t i = 2; i < base.size(); ++i) strands.push_back(StrandSpec::constant(base[i]));
  return MotionFamily(std::move(domain), std::move(base), std::move(strands));
}

bool MotionFamily::has_algebraic_strands() const {
  return std::any_of(strands_.begin(), strands_.end(),
                     [](const StrandSpec& s) { return !s.is_closed_form(); });
}

StrandSpec MotionFamily::strand(std::size_t index) const {
  if (index == 0) return StrandSpec::constant(0.0);
  if (index == 1) return StrandSpec::constant(1.0);
  if (index - 2 >= strands_.size()) {
    throw Error(ErrorKind::InvalidArgument, "strand index out of range");
  }
  return strands_[index - 2];
}

MotionFamily MotionFamily::with_strand(const StrandSpec& strand, cplx base_value,
                                       const Tolerances& tol) const {
  auto strands = strands_;
  strands.push_back(strand);
  return MotionFamily(domain_, base_.with_point(base_value, tol), std::move(strands), tol);
}

MotionFamily MotionFamily::without_last_strand() const {
  auto strands = strands_;
  if (strands.empty()) {
    throw Error(ErrorKind::InvalidArgument, "family has no moving strand to forget");
  }
  strands.pop_back();
  return MotionFamily(domain_, base_.without_last(), std::move(strands));
}

Configuration eval_motion(const MotionFamily& family, cplx lambda, const Tolerances& tol) {
  if (!family.domain().contains(lambda)) {
    throw Error(ErrorKind::OutsideDomain, "parameter outside the motion's domain");
  }
  const bool at_basepoint = lambda == family.domain().basepoint();
  std::vector<cplx> pts(family.puncture_count());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const StrandSpec s = family.strand(i);
    if (!s.is_closed_form() && at_basepoint) {
      pts[i] = family.base()[i];
    } else {
      pts[i] = s.eval(lambda);
    }
  }
  std::size_t a = 0, b = 0;
  const double sep = min_chordal_separation(pts, &a, &b);
  if (sep <= tol.sep) {
    throw CollisionError(ErrorKind::CollisionAtParameter, a, b, lambda, 0.0, sep);
  }
  return make_configuration(std::span<const cplx>(pts), tol);
}

namespace {

// Mean of h over a circle of radius r about lambda (trapezoid rule, which is
// spectrally accurate for holomorphic h).
cplx circle_mean(const StrandSpec& s, cplx lambda, double r) {
  cplx sum = 0.0;
  for (std::size_t k = 0; k < kCirclePoints; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / kCirclePoints;
    sum += s.eval(lambda + std::polar(r, a));
  }
  return sum / static_cast<double>(kCirclePoints);
}

struct PairWitness {
  std::size_t i, j;
  cplx lambda;
};

// Newton search for an exact collision of two closed-form strands (or a
// pole when j is the index one past the end).
std::optional<PairWitness> refine_collision(const MotionFamily& family,
                                            const std::vector<cplx>& params,
                                            const std::vector<std::vector<cplx>>& values,
                                            std::size_t i, std::size_t j,
                                            const Tolerances& tol) {
  const std::size_t m = family.puncture_count();
  const StrandSpec si = family.strand(i);
  if (!si.is_closed_form()) return std::nullopt;
  std::optional<StrandSpec> sj;
  if (j < m) {
    sj = family.strand(j);
    if (!sj->is_closed_form()) return std::nullopt;
    if (!si.expr().depends_on_parameter() && !sj->expr().depends_on_parameter()) {
      return std::nullopt;
    }
  } else if (!si.expr().depends_on_parameter()) {
    return std::nullopt;
  }
  auto g = [&](cplx lambda) -> Dual {
    const Dual hi = si.eval_with_slope(lambda);
    if (sj) return hi - sj->eval_with_slope(lambda);
    return Dual(1.0) / hi;
  };
  std::vector<std::size_t> order(params.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  auto dist = [&](std::size_t k) {
    return j < m ? chordal_distance(values[k][i], values[k][j]) : chordal_to_infinity(values[k][i]);
  };
  const std::size_t starts = std::min(kNewtonStarts, order.size());
  std::partial_sort(order.begin(), order.begin() + starts, order.end(),
                    [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
  for (std::size_t s = 0; s < starts; ++s) {
    cplx lambda = params[order[s]];
    for (int it = 0; it < 40; ++it) {
      Dual v;
      try {
        v = g(lambda);
      } catch (const Error&) {
        break;
      }
      if (!finite(v.value) || !finite(v.slope) || v.slope == cplx(0.0)) break;
      const cplx delta = v.value / v.slope;
      lambda -= delta;
      if (!finite(lambda) || std::abs(lambda - family.domain().center()) > 4.0 * family.domain().outer_radius()) break;
      if (std::abs(delta) <= 1e-15 * (1.0 + std::abs(lambda))) {
        const Dual at = g(lambda);
        if (std::abs(at.value) <= 1e-12 &&
            family.domain().boundary_distance(lambda) > tol.boundary) {
          return PairWitness{i, j, lambda};
        }
        break;
      }
    }
  }
  return std::nullopt;
}

std::string describe_sampling(std::size_t budget, std::size_t loops, double radius) {
  std::ostringstream os;
  os << "halton(2,3) interior samples n=" << budget << "; generator loops=" << loops
     << " (" << kLoopSamples << "+ continuation samples each); circle mean N=" << kCirclePoints
     << " r<=" << radius << "; Newton collision refinement from " << kNewtonStarts
     << " closest samples per closed-form pair";
  return os.str();
}

}  // namespace

ValidationReport check_motion(const MotionFamily& family, std::size_t sample_budget,
                              const Tolerances& tol) {
  if (sample_budget < 100) {
    throw Error(ErrorKind::InvalidArgument, "validation needs a sample budget of at least 100");
  }
  ValidationReport report;
  const ParameterDomain& domain = family.domain();
  const cplx x0 = domain.basepoint();
  const std::size_t m = family.puncture_count();
  report.holomorphy_residual.assign(family.strands().size(), 0.0);
  report.circle_radius = tol.circle_radius;
  report.sampling = describe_sampling(sample_budget, domain.generators().size(), tol.circle_radius);

  auto fail = [&](std::string axiom, cplx witness, std::string detail) {
    if (!report.passed) return;
    report.passed = false;
    report.failed_axiom = std::move(axiom);
    report.witness = witness;
    report.failure_detail = std::move(detail);
  };

  // Basepoint identity.
  for (std::size_t i = 2; i < m; ++i) {
    const StrandSpec s = family.strand(i);
    cplx v = family.base()[i];
    if (s.is_closed_form()) {
      v = s.eval(x0);
    } else if (auto r = polish_root(s.polynomial(), x0, s.anchor())) {
      v = *r;
    }
    report.basepoint_residual =
        std::max(report.basepoint_residual, chordal_distance(v, family.base()[i]));
  }
  if (report.basepoint_residual > tol.eq) {
    fail("basepoint", x0, "strands do not start at the base configuration");
  }

  // Parameter samples and their configurations.
  const auto params = domain.sample_points(sample_budget, tol.boundary);
  std::vector<std::vector<cplx>> values(params.size());
  double margin = family.base().separation();
  cplx margin_witness = x0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (family.has_algebraic_strands()) {
      try {
        const auto tracks = continue_strands(family, domain.route(params[k], tol.boundary), tol);
        values[k] = tracks.snapshot(tracks.sample_count() - 1);
        if (tracks.min_separation() < margin) {
          margin = tracks.min_separation();
          margin_witness = params[k];
        }
      } catch (const CollisionError& e) {
        fail("injectivity", e.parameter(), e.what());
        values[k] = std::vector<cplx>(m, cplx(std::numeric_limits<double>::quiet_NaN()));
        continue;
      }
    } else {
      values[k].resize(m);
      for (std::size_t i = 0; i < m; ++i) values[k][i] = family.strand(i).eval(params[k]);
    }
    const double sep = min_chordal_separation(values[k]);
    if (sep < margin) {
      margin = sep;
      margin_witness = params[k];
    }
  }
  report.parameter_samples = params.size();

  // Generator loops, by continuation.
  for (const Path& loop : domain.generators()) {
    try {
      ContinuationOptions opts;
      opts.initial_samples = std::max<std::size_t>(kLoopSamples, 256);
      const auto tracks = continue_strands(family, loop, tol, opts);
      report.loop_samples += tracks.sample_count();
      if (tracks.min_separation() < margin) {
        margin = tracks.min_separation();
        margin_witness = loop.at(0.5);
      }
    } catch (const CollisionError& e) {
      fail("injectivity", e.parameter(), e.what());
    }
  }
  report.injectivity_margin = margin;
  if (margin <= tol.sep) fail("injectivity", margin_witness, "punctures collide at a sample");

  // Exact collisions of closed-form pairs between samples.
  if (report.passed && !params.empty()) {
    for (std::size_t i = 0; i < m && report.passed; ++i) {
      for (std::size_t j = i + 1; j <= m && report.passed; ++j) {
        if (auto w = refine_collision(family, params, values, i, j, tol)) {
          std::ostringstream os;
          os << "punctures " << w->i << " and "
             << (w->j == m ? std::string("infinity") : std::to_string(w->j))
             << " collide at lambda = " << w->lambda;
          report.injectivity_margin = 0.0;
          fail("injectivity", w->lambda, os.str());
        }
      }
    }
  }

  // Holomorphy by the circle-mean property.
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double bd = domain.boundary_distance(params[k]);
    const double r = std::min(tol.circle_radius, bd / 4.0);
    if (!(bd > 2.0 * r)) continue;
    if (!finite(values[k].empty() ? cplx(0.0) : values[k].front())) continue;
    ++report.holomorphy_samples;
    for (std::size_t s = 0; s < family.strands().size(); ++s) {
      const StrandSpec& strand = family.strands()[s];
      double residual = 0.0;
      if (strand.is_closed_form()) {
        residual = std::abs(strand.eval(params[k]) - circle_mean(strand, params[k], r));
      } else {
        try {
          const cplx on_circle = params[k] + r;
          const Path reach = domain.route(params[k], tol.boundary)
                                 .then(Path::segment(params[k], on_circle));
          const auto to_circle = continue_strands(family, reach, tol);
          const auto start = to_circle.snapshot(to_circle.sample_count() - 1);
          const auto around = continue_strands(family, Path::circle_through(params[k], on_circle),
                                               tol, {}, start);
          cplx sum = 0.0;
          std::size_t found = 0;
          for (std::size_t q = 0; q < around.sample_count(); ++q) {
            const double scaled = around.times()[q] * kCirclePoints;
            if (q + 1 < around.sample_count() && std::abs(scaled - std::round(scaled)) < 1e-9) {
              sum += around.position(s + 2, q);
              ++found;
            }
          }
          residual = std::abs(values[k][s + 2] - sum / static_cast<double>(found));
        } catch (const Error& e) {
          fail("holomorphy", params[k], e.what());
          continue;
        }
      }
      report.holomorphy_residual[s] = std::max(report.holomorphy_residual[s], residual);
      if (residual > tol.holomorphy) {
        fail("holomorphy", params[k],
             "strand " + std::to_string(s + 2) + " fails the circle-mean property");
      }
    }
  }
  return report;
}

ValidationReport validate_motion(const MotionFamily& family, std::size_t sample_budget,
                                 const Tolerances& tol) {
  ValidationReport report = check_motion(family, sample_budget, tol);
  if (!report.passed) {
    throw ValidationFailure(report.failed_axiom, report.witness,
                            report.failed_axiom + ": " + report.failure_detail);
  }
  return report;
}

MotionFamily pullback(const MotionFamily& family, const ParameterDomain& domain,
                      const Expr& map, const Tolerances& tol) {
  if (map.depends_on_variable()) {
    throw Error(ErrorKind::InvalidArgument, "pullback map must be an expression in lambda");
  }
  const cplx target = family.domain().basepoint();
  const cplx image = map(domain.basepoint());
  if (!finite(image) || std::abs(image - target) > tol.cover * (1.0 + std::abs(target))) {
    throw Error(ErrorKind::NotBasepointPreserving,
                "pullback map does not send the basepoint to the family's basepoint");
  }
  std::vector<cplx> probes = domain.sample_points(256, tol.boundary);
  for (const Path& loop : domain.generators()) {
    for (std::size_t k = 0; k < kLoopSamples; ++k) {
      probes.push_back(loop.at(static_cast<double>(k) / kLoopSamples));
    }
  }
  for (const cplx lambda : probes) {
    const cplx w = map(lambda);
    if (!finite(w) || family.domain().boundary_distance(w) <= 0.0) {
      std::ostringstream os;
      os << "pullback map sends " << lambda << " outside the target domain";
      throw Error(ErrorKind::RangeEscape, os.str());
    }
  }
  std::vector<StrandSpec> strands;
  for (const auto& s : family.strands()) strands.push_back(s.compose(map));
  return MotionFamily(domain, family.base(), std::move(strands), tol);
}

}  // namespace hmotion
