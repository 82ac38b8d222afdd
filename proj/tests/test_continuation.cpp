#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "hmotion/continuation.hpp"
#include "hmotion/error.hpp"
#include "oracles.hpp"

using namespace hmotion;

TEST_CASE("closed-form tracks follow the strand formula") {
  const MotionFamily w = corpus::load("winding_w").family;
  const Path loop = w.domain().generators().at(0);
  const StrandTracks t = continue_strands(w, loop);
  CHECK(t.closed());
  CHECK(t.sample_count() >= 257);
  for (std::size_t k = 0; k < t.sample_count(); ++k) {
    CHECK(std::abs(t.position(2, k) - loop.at(t.times()[k])) < 1e-14);
    CHECK(t.position(0, k) == cplx(0.0));
    CHECK(t.position(1, k) == cplx(1.0));
  }
}

TEST_CASE("adjacent samples move less than a quarter of the separation") {
  for (const auto& entry : corpus::families()) {
    CAPTURE(entry.name);
    const ParameterDomain& d = entry.family.domain();
    std::vector<Path> paths = d.generators();
    for (const cplx x : d.sample_points(3, 0.05)) paths.push_back(d.route(x, 0.02));
    for (const Path& p : paths) {
      const StrandTracks t = continue_strands(entry.family, p);
      double gap = 1e300;
      for (std::size_t k = 0; k < t.sample_count(); ++k) {
        gap = std::min(gap, min_chordal_separation(t.snapshot(k)));
      }
      CHECK(t.min_separation() == doctest::Approx(gap));
      for (std::size_t k = 0; k + 1 < t.sample_count(); ++k) {
        for (std::size_t i = 0; i < t.strand_count(); ++i) {
          CHECK(chordal_distance(t.position(i, k), t.position(i, k + 1)) < 0.25 * gap + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("winding numbers match the argument principle") {
  for (const char* name : {"winding_w", "annulus_winding", "winding_squared", "wiggle"}) {
    CAPTURE(name);
    const MotionFamily f = corpus::load(name).family;
    const Path loop = f.domain().generators().at(0);
    const StrandTracks t = continue_strands(f, loop);
    const StrandSpec s = f.strand(2);
    for (const cplx c : {cplx(0.0), cplx(1.0)}) {
      const int expected = oracle::winding([&](double u) { return s.eval(loop.at(u)); }, c);
      CHECK(winding_number(t, 2, SpherePoint(c)) == expected);
    }
  }
  const MotionFamily w = corpus::load("winding_w").family;
  CHECK(winding_number(continue_strands(w, w.domain().generators()[0]), 2, SpherePoint(0.0)) == 1);
}

TEST_CASE("open tracks have no winding number") {
  const MotionFamily w = corpus::load("winding_w").family;
  const StrandTracks t = continue_strands(w, Path::segment(0.5, cplx(0.5, 0.3)));
  CHECK_FALSE(t.closed());
  CHECK_THROWS_AS(winding_number(t, 2, SpherePoint(0.0)), Error);
}

TEST_CASE("algebraic roots are continued on their branch") {
  for (const char* name : {"algebraic_pair", "algebraic_swap"}) {
    CAPTURE(name);
    const MotionFamily f = corpus::load(name).family;
    const ParameterDomain& d = f.domain();
    std::vector<Path> paths = d.generators();
    for (const cplx x : d.sample_points(4, 0.05)) paths.push_back(d.route(x, 0.02));
    for (const Path& p : paths) {
      const Configuration end = eval_along(f, p);
      for (std::size_t i = 2; i < f.puncture_count(); ++i) {
        const Expr poly = f.strand(i).polynomial();
        const cplx expected = oracle::follow_root([&](cplx z, cplx l) { return poly.eval<cplx>(l, z); },
                                                  [&](double u) { return p.at(u); }, f.base()[i]);
        CHECK(std::abs(end[i] - expected) < 1e-9);
      }
    }
  }
}

TEST_CASE("collisions along a path are detected") {
  const ParameterDomain disk = ParameterDomain::disk(0.0, 1.0, 0.5);
  const MotionFamily f(disk, make_configuration({cplx(0.0), cplx(1.0), cplx(0.5)}),
                       {StrandSpec::closed_form(Expr::parameter())});
  try {
    continue_strands(f, Path::segment(0.5, -0.5));
    FAIL("expected CollisionDetected");
  } catch (const CollisionError& e) {
    CHECK(e.kind() == ErrorKind::CollisionDetected);
    CHECK(e.first() == 0);
    CHECK(e.second() == 2);
    CHECK(e.time() == doctest::Approx(0.5).epsilon(1e-3));
  }
}

TEST_CASE("paths outside the domain are rejected") {
  const MotionFamily w = corpus::load("winding_w").family;
  try {
    continue_strands(w, Path::segment(0.5, 1.5));
    FAIL("expected OutsideDomain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutsideDomain);
  }
}
