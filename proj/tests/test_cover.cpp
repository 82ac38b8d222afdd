#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "hmotion/cover.hpp"
#include "hmotion/error.hpp"
#include "oracles.hpp"

using namespace hmotion;

namespace {

// Permutation image of `position` under the word's letters.
std::size_t track_position(const BraidWord& w, std::size_t position) {
  for (const int l : w.letters()) {
    const std::size_t g = static_cast<std::size_t>(std::abs(l));
    if (position == g - 1) position = g;
    else if (position == g) position = g - 1;
  }
  return position;
}

bool same_braid(const BraidWord& a, const BraidWord& b) {
  return oracle::burau_trivial(a.strand_count(), (a * b.inverse()).letters());
}

}  // namespace

TEST_CASE("strand deletion by hand") {
  CHECK(delete_strand(BraidWord(3, {1}), 0).empty());
  CHECK(delete_strand(BraidWord(3, {1, 2}), 0).empty());
  CHECK(delete_strand(BraidWord(3, {2}), 0) == BraidWord(2, {1}));
  CHECK(delete_strand(BraidWord(3, {1, 1}), 2) == BraidWord(2, {1, 1}));
  CHECK(delete_strand(BraidWord(4, {3, -1}), 1) == BraidWord(3, {2}));
}

TEST_CASE("strand deletion is a homomorphism along the strand") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 3 + static_cast<std::size_t>(trial % 4);
    std::uniform_int_distribution<int> gen(1, static_cast<int>(m) - 1);
    std::vector<int> a(8), b(8);
    for (int& l : a) l = gen(rng) * (rng() % 2 ? 1 : -1);
    for (int& l : b) l = gen(rng) * (rng() % 2 ? 1 : -1);
    const BraidWord u(m, a), v(m, b);
    const std::size_t p = rng() % m;
    const BraidWord lhs = delete_strand(u * v, p);
    const BraidWord rhs = delete_strand(u, p) * delete_strand(v, track_position(u, p));
    CHECK(same_braid(lhs, rhs));
  }
  for (std::size_t m = 3; m <= 6; ++m) {
    for (std::size_t p = 0; p < m; ++p) {
      CHECK(same_braid(delete_strand(BraidWord::full_twist(m), p), BraidWord::full_twist(m - 1)));
    }
  }
}

TEST_CASE("lift endpoints are the motion at the path end") {
  for (const auto& entry : corpus::families()) {
    const MotionFamily& f = entry.family;
    if (f.has_algebraic_strands()) continue;
    CAPTURE(entry.name);
    for (const cplx x : f.domain().sample_points(6, 0.05)) {
      const CoverPoint p = lift_path(f, f.domain().route(x, 0.02));
      const Configuration direct = eval_motion(f, x);
      for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(oracle::chordal(universal_motion_eval(p, i).value(), direct[i]) < 1e-10);
      }
      CHECK(universal_motion_eval(p, p.end.size()).is_infinite());
    }
  }
}

TEST_CASE("lifts do not depend on the sampling") {
  const MotionFamily f = corpus::load("exchange").family;
  for (const Path& loop : f.domain().generators()) {
    LiftOptions coarse, fine;
    fine.initial_samples = 1024;
    fine.seed = 5;
    coarse.projection_angle = fine.projection_angle = 0.3;
    const CoverPoint a = lift_path(f, loop, {}, coarse), b = lift_path(f, loop, {}, fine);
    CHECK(same_cover_point(a, b));
    CHECK(a.word == b.word);
  }
}

TEST_CASE("deck transforms of generator loops") {
  const MotionFamily w = corpus::load("winding_w").family;
  CHECK(deck_transform(w, 0).word.to_string() == "s1 s1");
  const MotionFamily wiggle = corpus::load("wiggle").family;
  CHECK(deck_transform(wiggle, 0).word.empty());
  CHECK_THROWS_AS(lift_path(w, Path::segment(0.3, 0.5)), Error);
}

TEST_CASE("cover points identify words up to the full twist") {
  const MotionFamily w = corpus::load("winding_w").family;
  CoverPoint a = lift_path(w, Path::constant(0.5));
  CoverPoint b = a;
  b.word = BraidWord::full_twist(3);
  CHECK(same_cover_point(a, b));
  b.word = BraidWord(3, {1, 1});
  CHECK_FALSE(same_cover_point(a, b));
}

TEST_CASE("forgetting a strand commutes with lifting") {
  for (const char* name : {"disk_two", "exchange_trivial", "exchange", "algebraic_pair"}) {
    CAPTURE(name);
    const MotionFamily f = corpus::load(name).family;
    const MotionFamily g = f.without_last_strand();
    const double angle = choose_projection_angle(f.base());
    LiftOptions opts;
    opts.projection_angle = angle;
    std::vector<Path> paths = f.domain().generators();
    for (const cplx x : f.domain().sample_points(4, 0.05)) paths.push_back(f.domain().route(x, 0.02));
    for (const Path& p : paths) {
      const CoverPoint upper = forgetful(lift_path(f, p, {}, opts));
      const CoverPoint lower = lift_path(g, p, {}, opts);
      CHECK(same_cover_point(upper, lower));
      CHECK(upper.word == lower.word);
    }
  }
}

TEST_CASE("lifted maps are single valued exactly when monodromy is trivial") {
  const LiftedMap m = lift_map(corpus::load("wiggle").family);
  CHECK(m.certified());
  CHECK(m.probes.size() == 16);
  for (const auto& probe : m.probes) CHECK(probe.agree);
  const CoverPoint p = m.at(cplx(0.1, 0.2));
  CHECK(std::abs(p.end[2] - (0.5 + (cplx(0.1, 0.2) - 0.5) / 10.0)) < 1e-12);
  try {
    lift_map(corpus::load("winding_w").family);
    FAIL("expected NontrivialMonodromy");
  } catch (const NontrivialMonodromy& e) {
    CHECK(e.generator() == 0);
    CHECK(e.word() == "s1 s1");
  }
}
