#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hmotion/domain.hpp"
#include "hmotion/expr.hpp"
#include "hmotion/sphere.hpp"
#include "hmotion/tolerances.hpp"

namespace hmotion {

/// Carrier for one holomorphic strand lambda -> h(lambda).
///
/// A ClosedForm strand is a rational expression in lambda. An AlgebraicRoot
/// strand is a simple root of a polynomial in z with lambda-rational
/// coefficients; its branch is fixed by the root value at the basepoint and
/// is only reachable by continuation along a path.
class StrandSpec {
 public:
  enum class Kind { ClosedForm, AlgebraicRoot };

  static StrandSpec closed_form(Expr expr);
  static StrandSpec constant(cplx value) { return closed_form(Expr::constant(value)); }
  static StrandSpec algebraic_root(Expr polynomial, cplx root_at_basepoint);

  Kind kind() const { return kind_; }
  bool is_closed_form() const { return kind_ == Kind::ClosedForm; }
  const Expr& expr() const { return expr_; }        // closed form
  const Expr& polynomial() const { return expr_; }  // algebraic root
  cplx anchor() const { return anchor_; }

  /// Closed-form evaluation; throws Error(OffTrack) for AlgebraicRoot.
  cplx eval(cplx lambda) const;
  /// Value and d/dlambda of a closed-form strand.
  Dual eval_with_slope(cplx lambda) const;

  /// Strand composed with a parameter map: lambda -> h(inner(lambda)).
  StrandSpec compose(const Expr& inner) const;

  std::string describe() const;

 private:
  StrandSpec(Kind kind, Expr expr, cplx anchor)
      : kind_(kind), expr_(std::move(expr)), anchor_(anchor) {}
  Kind kind_;
  Expr expr_;
  cplx anchor_{0.0};
};

/// Newton iteration on poly(., lambda) started at `guess`. Returns nullopt
/// when it does not converge within `max_iterations`.
std::optional<cplx> polish_root(const Expr& polynomial, cplx lambda, cplx guess,
                                int max_iterations = 50);

/// A holomorphic motion of E = {0, 1, infinity, base[2], ...} over a plane
/// domain: one strand per moving puncture, constant strands at 0 and 1.
class MotionFamily {
 public:
  /// Checks the strand count, the basepoint identity phi(x0, z) = z and,
  /// for algebraic strands, that the anchored root is simple. An algebraic
  /// strand's base value is replaced by its Newton-polished root when the
  /// two agree to 1e-6 (the base value is the branch label).
  MotionFamily(ParameterDomain domain, Configuration base,
               std::vector<StrandSpec> strands, const Tolerances& tol = {});

  static MotionFamily identity(ParameterDomain domain, Configuration base);

  const ParameterDomain& domain() const { return domain_; }
  const Configuration& base() const { return base_; }
  /// Moving strands only; strands()[k] drives puncture k + 2.
  const std::vector<StrandSpec>& strands() const { return strands_; }
  std::size_t puncture_count() const { return base_.size(); }
  bool has_algebraic_strands() const;

  /// Strand of puncture `index` (constant for 0 and 1).
  StrandSpec strand(std::size_t index) const;

  MotionFamily with_strand(const StrandSpec& strand, cplx base_value,
                           const Tolerances& tol = {}) const;
  MotionFamily without_last_strand() const;

 private:
  ParameterDomain domain_;
  Configuration base_;
  std::vector<StrandSpec> strands_;
};

/// Configuration of all finite punctures at lambda. Throws
/// Error(OutsideDomain), CollisionError(CollisionAtParameter) and, for
/// algebraic strands away from the basepoint, Error(OffTrack).
Configuration eval_motion(const MotionFamily& family, cplx lambda,
                          const Tolerances& tol = {});

struct ValidationReport {
  bool passed = true;
  std::string failed_axiom;  // "basepoint" | "injectivity" | "holomorphy"
  cplx witness{0.0};
  std::string failure_detail;

  double basepoint_residual = 0.0;
  double injectivity_margin = 0.0;
  std::vector<double> holomorphy_residual;  // per moving strand
  std::size_t parameter_samples = 0;
  std::size_t loop_samples = 0;
  std::size_t holomorphy_samples = 0;
  double circle_radius = 0.0;
  std::string sampling;
};

/// Numerical check of the three motion axioms: basepoint identity,
/// injectivity (sampled, along generator loops, plus Newton refinement of
/// near-collisions of closed-form pairs) and holomorphy (circle-mean
/// property). Never throws for axiom violations; see validate_motion.
ValidationReport check_motion(const MotionFamily& family, std::size_t sample_budget,
                              const Tolerances& tol = {});

/// As check_motion, but throws ValidationFailure on the first violated axiom.
ValidationReport validate_motion(const MotionFamily& family, std::size_t sample_budget,
                                 const Tolerances& tol = {});

/// f*(phi)(x, z) = phi(f(x), z) for a basepoint-preserving map f from
/// `domain` into family.domain(). Throws Error(NotBasepointPreserving) and
/// Error(RangeEscape).
MotionFamily pullback(const MotionFamily& family, const ParameterDomain& domain,
                      const Expr& map, const Tolerances& tol = {});

/// Parsed motion definition file.
struct MotionFile {
  std::string name;
  MotionFamily family;
  std::vector<cplx> extend_points;
  std::vector<int> degree_schedule;
};

/// Parses the sectioned key-value motion format ([motion], [domain], [base],
/// [strand.i], [extend]). Syntax errors raise ParseError with line/column.
MotionFile parse_motion_file(std::string_view text, const Tolerances& tol = {});
MotionFile load_motion_file(const std::string& path, const Tolerances& tol = {});
std::string format_motion_file(const MotionFile& file);

}  // namespace hmotion
