#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "hmotion/error.hpp"
#include "hmotion/expr.hpp"
#include "hmotion/motion.hpp"

using namespace hmotion;

TEST_CASE("expressions parse and evaluate") {
  CHECK(parse_constant("1/2") == cplx(0.5));
  CHECK(parse_constant("5/2 + i/2") == cplx(2.5, 0.5));
  CHECK(std::abs(parse_constant("(1 + i)^-2") - 1.0 / (cplx(1, 1) * cplx(1, 1))) < 1e-15);
  for (const cplx c : {cplx(0.25), cplx(-1.0, 3.5), cplx(1e-7, -2.0)}) {
    CHECK(parse_constant(format_constant(c)) == c);
  }
  const Expr e = Expr::parameter().pow(2) - Expr::constant(3.0) * Expr::parameter();
  const cplx x(0.3, 0.4);
  CHECK(std::abs(e(x) - (x * x - 3.0 * x)) < 1e-15);
  const Dual d = e.eval_with_parameter_slope(x);
  CHECK(std::abs(d.slope - (2.0 * x - 3.0)) < 1e-14);
}

TEST_CASE("malformed motion file reports line and column") {
  try {
    corpus::load("malformed");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 9);
    CHECK(e.column() == 17);
  }
  CHECK_THROWS_AS(parse_motion_file("[motion]\nname = x\n[domain]\nkind = disk\nbogus = 1\n"), ParseError);
}

TEST_CASE("motion files round trip through the formatter") {
  for (const auto& entry : corpus::families()) {
    if (entry.name.rfind("pullback", 0) == 0) continue;
    const MotionFile file = corpus::load(entry.name);
    const MotionFile again = parse_motion_file(format_motion_file(file));
    CHECK(again.family.puncture_count() == file.family.puncture_count());
    CHECK(again.family.domain().kind() == file.family.domain().kind());
    CHECK(again.family.domain().basepoint() == file.family.domain().basepoint());
    if (file.family.has_algebraic_strands()) continue;
    for (const cplx lambda : file.family.domain().sample_points(20, 0.01)) {
      const Configuration a = eval_motion(file.family, lambda), b = eval_motion(again.family, lambda);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-13);
    }
  }
}

TEST_CASE("every corpus family satisfies the motion axioms") {
  for (const auto& entry : corpus::families()) {
    CAPTURE(entry.name);
    const ValidationReport r = check_motion(entry.family, 200);
    CHECK(r.passed);
    CHECK(r.basepoint_residual < 1e-12);
    for (const double h : r.holomorphy_residual) CHECK(h < 1e-6);
  }
  const ValidationReport id = check_motion(corpus::load("identity").family, 100);
  CHECK(id.basepoint_residual == 0.0);
}

TEST_CASE("collisions are reported as injectivity failures") {
  // The moving puncture follows lambda across 0 inside the disk.
  const ParameterDomain disk = ParameterDomain::disk(0.0, 1.0, 0.5);
  const MotionFamily f(disk, make_configuration({cplx(0.0), cplx(1.0), cplx(0.5)}),
                       {StrandSpec::closed_form(Expr::parameter())});
  const ValidationReport r = check_motion(f, 200);
  CHECK_FALSE(r.passed);
  CHECK(r.failed_axiom == "injectivity");
  CHECK(std::abs(r.witness) < 0.05);
  CHECK_THROWS_AS(validate_motion(f, 200), ValidationFailure);
  try {
    eval_motion(f, 0.0);
    FAIL("expected a collision");
  } catch (const CollisionError& e) {
    CHECK(e.kind() == ErrorKind::CollisionAtParameter);
  }
}

TEST_CASE("basepoint identity is enforced") {
  const ParameterDomain disk = ParameterDomain::disk(0.0, 1.0, 0.0);
  CHECK_THROWS_AS(MotionFamily(disk, make_configuration({cplx(0.0), cplx(1.0), cplx(0.5)}),
                               {StrandSpec::closed_form(Expr::parameter() + Expr::constant(0.6))}),
                  Error);
}

TEST_CASE("algebraic strands are only reachable along paths") {
  const MotionFamily f = corpus::load("algebraic_pair").family;
  CHECK_NOTHROW(eval_motion(f, f.domain().basepoint()));
  try {
    eval_motion(f, f.domain().basepoint() + 0.1);
    FAIL("expected OffTrack");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OffTrack);
  }
}

TEST_CASE("pullback composes with parameter maps") {
  const MotionFamily w = corpus::load("winding_w").family;
  const Expr lambda = Expr::parameter();
  const double r = std::sqrt(0.5);
  const ParameterDomain mid = ParameterDomain::punctured_disk(0.0, 1.0, 0.0, r);
  const ParameterDomain small = ParameterDomain::disk(0.0, 0.2, 0.0);
  const Expr f = lambda.pow(2);
  const Expr g = Expr::constant(r) + lambda;
  const MotionFamily twice = pullback(pullback(w, mid, f), small, g);
  const MotionFamily once = pullback(w, small, (Expr::constant(r) + lambda).pow(2));
  for (const cplx x : small.sample_points(40, 0.001)) {
    const Configuration a = eval_motion(twice, x), b = eval_motion(once, x);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-13);
    CHECK(std::abs(a[2] - (r + x) * (r + x)) < 1e-13);
  }
  // Identity map changes nothing.
  const MotionFamily same = pullback(w, w.domain(), lambda);
  for (const cplx x : w.domain().sample_points(20, 0.01)) CHECK(eval_motion(same, x)[2] == eval_motion(w, x)[2]);
}

TEST_CASE("pullback rejects bad maps") {
  const MotionFamily w = corpus::load("winding_w").family;
  const ParameterDomain disk = ParameterDomain::disk(0.0, 1.0, 0.0);
  try {
    pullback(w, disk, Expr::parameter());
    FAIL("expected NotBasepointPreserving");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotBasepointPreserving);
  }
  try {
    pullback(w, disk, Expr::constant(0.5) + Expr::constant(2.0) * Expr::parameter());
    FAIL("expected RangeEscape");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RangeEscape);
  }
}

TEST_CASE("extending a family by a strand") {
  const MotionFamily id = corpus::load("identity").family;
  const MotionFamily more = id.with_strand(StrandSpec::constant(-1.0), -1.0);
  CHECK(more.puncture_count() == id.puncture_count() + 1);
  CHECK(more.without_last_strand().puncture_count() == id.puncture_count());
  CHECK_THROWS(id.with_strand(StrandSpec::constant(0.5), 0.5));
}
