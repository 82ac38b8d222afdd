#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "hmotion/cover.hpp"
#include "hmotion/error.hpp"
#include "hmotion/extend.hpp"
#include "oracles.hpp"

using namespace hmotion;

TEST_CASE("fixed point of the zero operator is the target") {
  FixedPointProblem p;
  p.target = cplx(0.3, -0.2);
  p.op = [](std::span<const cplx> g) { return std::vector<cplx>(g.size(), 0.0); };
  const std::vector<cplx> init(8, cplx(5.0, 5.0));
  const FixedPointResult r = fixed_point_iterate(p, init);
  for (const cplx v : r.values) CHECK(std::abs(v - p.target) < 1e-10);
  CHECK(r.iterations == 1);
  CHECK(r.unique);
  CHECK(r.uniqueness_spread <= 1e-9);
}

TEST_CASE("fixed point of half the identity is twice the target") {
  FixedPointProblem p;
  p.target = cplx(-1.0, 0.5);
  p.op = [](std::span<const cplx> g) {
    std::vector<cplx> out(g.begin(), g.end());
    for (cplx& v : out) v *= 0.5;
    return out;
  };
  const std::vector<cplx> init(8, 0.0);
  const FixedPointResult r = fixed_point_iterate(p, init);
  for (const cplx v : r.values) CHECK(std::abs(v - 2.0 * p.target) < 1e-10);
  CHECK(r.residual < 1e-10);
  // Increments of a 1/2-contraction halve, and the error stays within twice
  // the a priori bound q^k / (1 - q) * |g_1 - g_0|.
  for (std::size_t k = 1; k < r.increments.size(); ++k) {
    CHECK(r.increments[k] == doctest::Approx(0.5 * r.increments[k - 1]).epsilon(1e-6));
  }
  const double bound = std::pow(0.5, r.iterations) / 0.5 * r.increments.front();
  for (const cplx v : r.values) CHECK(std::abs(v - 2.0 * p.target) <= 2.0 * bound);
  CHECK(r.unique);
}

TEST_CASE("expanding operators diverge") {
  FixedPointProblem p;
  p.target = 1.0;
  p.max_iterations = 200;
  p.op = [](std::span<const cplx> g) {
    std::vector<cplx> out(g.begin(), g.end());
    for (cplx& v : out) v *= 2.0;
    return out;
  };
  const std::vector<cplx> init(4, 0.0);
  CHECK_THROWS_AS(fixed_point_iterate(p, init), Diverged);
}

TEST_CASE("constant strand for a static family") {
  const MotionFamily id = corpus::load("identity").family;
  const NewStrand s = solve_new_strand(id, -1.0, 2);
  const double expected = std::min({oracle::chordal(-1.0, 0.0), oracle::chordal(-1.0, 1.0),
                                    oracle::chordal(-1.0, 0.5), oracle::chordal_inf(-1.0)});
  CHECK(s.margin == doctest::Approx(expected).epsilon(1e-9));
  CHECK(s.margin == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  for (const cplx x : id.domain().sample_points(10, 0.01)) CHECK(std::abs(s.strand.eval(x) + 1.0) < 1e-12);
}

TEST_CASE("new strand for the wiggle family") {
  const MotionFamily f = corpus::load("wiggle").family;
  const NewStrand s = solve_new_strand(f, 0.25, 2);
  CHECK(s.margin >= 0.05);
  CHECK(s.holomorphy_residual < 1e-8);
  CHECK(std::abs(s.strand.eval(f.domain().basepoint()) - 0.25) < 1e-14);
  const MotionFamily g = f.with_strand(s.strand, 0.25);
  CHECK(check_motion(g, 300).passed);
  CHECK(is_trivial_monodromy(g));
  // Old strands are untouched.
  for (const cplx x : f.domain().sample_points(50, 0.01)) {
    const Configuration a = eval_motion(f, x), b = eval_motion(g, x);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
  // Independent margin on a dense sampling.
  for (const cplx x : f.domain().sample_points(10000, 0.001)) {
    const Configuration c = eval_motion(f, x);
    const cplx h = s.strand.eval(x);
    CHECK(oracle::chordal_inf(h) >= 0.05);
    for (const cplx p : c.points()) CHECK(oracle::chordal(h, p) >= 0.05);
  }
}

TEST_CASE("new strand preconditions") {
  const MotionFamily f = corpus::load("wiggle").family;
  try {
    solve_new_strand(f, 0.5, 2);
    FAIL("expected InvalidNewPoint");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidNewPoint);
  }
  CHECK_THROWS_AS(solve_new_strand(corpus::load("winding_w").family, 0.25, 2), NontrivialMonodromy);
}

TEST_CASE("inductive extension of the wiggle family") {
  const MotionFile file = corpus::load("wiggle");
  const InductiveExtension ext =
      extend_motion_inductive(file.family, file.extend_points, file.degree_schedule);
  REQUIRE(ext.stages.size() == 2);
  for (const auto& s : ext.stages) {
    CHECK(s.validated);
    CHECK(s.monodromy_trivial);
    CHECK(s.forgetful_compatible);
    CHECK(s.margin >= 0.05);
  }
  CHECK(ext.family.puncture_count() == file.family.puncture_count() + 2);
  // Forgetting the new strands recovers the original lift.
  const LiftedMap upper = lift_map(ext.family);
  const LiftedMap lower = lift_map(file.family, {}, {.projection_angle = upper.projection_angle});
  for (const cplx x : file.family.domain().sample_points(4, 0.05)) {
    const CoverPoint a = forgetful(forgetful(upper.at(x))), b = lower.at(x);
    CHECK(same_cover_point(a, b));
  }
}

TEST_CASE("inductive extension with no points is the identity") {
  const MotionFile file = corpus::load("wiggle");
  const InductiveExtension ext = extend_motion_inductive(file.family, {}, file.degree_schedule);
  CHECK(ext.stages.empty());
  CHECK(ext.family.puncture_count() == file.family.puncture_count());
}

TEST_CASE("inductive extension reports the failing stage") {
  const MotionFile file = corpus::load("wiggle");
  const std::vector<cplx> points{0.25, 0.25};
  try {
    extend_motion_inductive(file.family, points, file.degree_schedule);
    FAIL("expected StageFailure");
  } catch (const StageFailure& e) {
    CHECK(e.stage() == 1);
    CHECK(e.cause() == ErrorKind::InvalidNewPoint);
  }
}

TEST_CASE("continuous motion of the identity family is the identity") {
  const ContinuousMotionGrid g = build_continuous_motion(corpus::load("identity").family);
  for (const auto& s : g.samples) {
    for (std::size_t p = 0; p < s.image.size(); ++p) CHECK(s.image[p] == g.samples[0].image[p]);
    CHECK(s.beltrami_sup == 0.0);
  }
}

TEST_CASE("continuous motion of the wiggle family") {
  const MotionFamily f = corpus::load("wiggle").family;
  const ContinuousMotionGrid g = build_continuous_motion(f);
  CHECK(g.samples.size() > 16);
  CHECK(g.max_strand_error() < 1e-6);
  CHECK(g.min_jacobian() > 0.0);
  CHECK(g.max_beltrami() < 1.0);
  CHECK(g.max_beltrami_jump() < 0.1);
  for (const auto& s : g.samples) {
    const Configuration c = eval_motion(f, s.parameter);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(oracle::chordal(s.punctures[i], c[i]) < 1e-6);
    // Grid points outside the support never move.
    for (std::size_t j = 0; j < g.grid.ny; ++j) {
      for (std::size_t i = 0; i < g.grid.nx; ++i) {
        const cplx z = g.grid.point(i, j);
        if (std::abs(z - g.support_center) >= g.support_radius) CHECK(s.image[j * g.grid.nx + i] == z);
      }
    }
  }
}

TEST_CASE("continuous motion requires trivial monodromy and room") {
  CHECK_THROWS_AS(build_continuous_motion(corpus::load("winding_w").family), NontrivialMonodromy);
  ContinuousMotionOptions opts;
  GridSpec coarse;
  coarse.step = 0.5;
  coarse.origin = cplx(-1.0, -1.0);
  coarse.nx = coarse.ny = 6;
  opts.grid = coarse;
  try {
    build_continuous_motion(corpus::load("wiggle").family, {}, opts);
    FAIL("expected TubeCollapse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TubeCollapse);
  }
}
