#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "hmotion/braid.hpp"
#include "hmotion/continuation.hpp"
#include "hmotion/error.hpp"
#include "oracles.hpp"

using namespace hmotion;

namespace {

BraidWord random_word(std::mt19937_64& rng, std::size_t strands, std::size_t max_length) {
  std::uniform_int_distribution<std::size_t> len(0, max_length);
  std::uniform_int_distribution<int> gen(1, static_cast<int>(strands) - 1);
  std::bernoulli_distribution sign(0.5);
  std::vector<int> letters(len(rng));
  for (int& l : letters) l = gen(rng) * (sign(rng) ? 1 : -1);
  return BraidWord(strands, letters);
}

bool quotient(const BraidWord& w) { return is_trivial_mapping_class({w}); }

}  // namespace

TEST_CASE("braid words parse and print") {
  const BraidWord w = BraidWord::parse(4, "s1 s3^-1 s2");
  CHECK(w.letters() == std::vector<int>{1, -3, 2});
  CHECK(w.to_string() == "s1 s3^-1 s2");
  CHECK(BraidWord::parse(3, "").empty());
  CHECK(w.exponent_sum() == 1);
  CHECK((w * w.inverse()).free_reduced().empty());
  CHECK(w.power(3).length() == 9);
  CHECK(w.power(-1) == w.inverse());
  CHECK_THROWS_AS(BraidWord(3, {3}), Error);
  CHECK_THROWS_AS(BraidWord(3, {0}), Error);
  CHECK_THROWS_AS(BraidWord::parse(3, "s1 t2"), Error);
  CHECK(BraidWord::full_twist(3).letters() == std::vector<int>{1, 2, 1, 2, 1, 2});
}

TEST_CASE("Dynnikov action is invertible letter by letter") {
  std::mt19937_64 rng(21);
  for (std::size_t m = 2; m <= 6; ++m) {
    for (int trial = 0; trial < 50; ++trial) {
      const BraidWord w = random_word(rng, m, 20);
      DynnikovCoords c = dynnikov_act(dynnikov_base(m), w);
      CHECK(dynnikov_act(c, w.inverse()) == dynnikov_base(m));
    }
  }
}

TEST_CASE("disk braid triviality agrees with the Burau image") {
  std::mt19937_64 rng(33);
  int trivial_seen = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(trial % 5);
    BraidWord w = random_word(rng, m, 12);
    // Mix in words that are trivial for nontrivial reasons.
    if (trial % 3 == 0) {
      const BraidWord u = random_word(rng, m, 6);
      w = u * w * w.inverse() * u.inverse();
    }
    const bool expected = oracle::burau_trivial(m, w.letters());
    trivial_seen += expected;
    CHECK(is_trivial_braid(w) == expected);
    CHECK(quotient(w) == oracle::quotient_trivial(m, w.letters()));
  }
  CHECK(trivial_seen > 300);
}

TEST_CASE("braid relations hold") {
  for (std::size_t m = 3; m <= 6; ++m) {
    for (int i = 1; i + 1 < static_cast<int>(m); ++i) {
      const BraidWord braid_rel(m, {i, i + 1, i, -(i + 1), -i, -(i + 1)});
      CHECK(is_trivial_braid(braid_rel));
      for (int j = i + 2; j < static_cast<int>(m); ++j) CHECK(is_trivial_braid(BraidWord(m, {i, j, -i, -j})));
    }
  }
}

TEST_CASE("full twist is central and trivial only in the quotient") {
  std::mt19937_64 rng(44);
  for (std::size_t m = 2; m <= 6; ++m) {
    const BraidWord d2 = BraidWord::full_twist(m);
    CHECK_FALSE(is_trivial_braid(d2));
    CHECK_FALSE(oracle::burau_trivial(m, d2.letters()));
    CHECK(quotient(d2));
    CHECK(quotient(d2.power(-3)));
    for (int trial = 0; trial < 20; ++trial) {
      const BraidWord w = random_word(rng, m, 20);
      CHECK(is_trivial_braid(w * d2 * w.inverse() * d2.inverse()));
      CHECK(quotient(w * d2) == quotient(w));
      const BraidWord u = random_word(rng, m, 10);
      CHECK(quotient(u * w * u.inverse()) == quotient(w));
      CHECK(same_mapping_class({w * d2}, {w}));
    }
  }
  // In Mod(0, 4) the word s1^2 is a point push and is not trivial.
  CHECK_FALSE(quotient(BraidWord(3, {1, 1})));
  CHECK(quotient(BraidWord(2, {1, 1})));
}

TEST_CASE("braids read from generator loops") {
  const MotionFamily w = corpus::load("winding_w").family;
  const StrandTracks t = continue_strands(w, w.domain().generators()[0]);
  // The loop passes through Re z = 0 exactly at a sample.
  CHECK_THROWS_AS(extract_braid(t, 0.0), Error);
  const ExtractedBraid b = extract_braid_generic(t, 0.0);
  CHECK(b.word.to_string() == "s1 s1");
  CHECK(b.word.exponent_sum() == 2);
  CHECK(b.crossings.size() == 2);
  CHECK(b.initial_order == b.final_order);
  const ExtractedBraid tilted = extract_braid(t, 0.2);
  CHECK(tilted.word == b.word);
  CHECK(linking_number(t, 0, 2, 0.2) == 1);
  CHECK(linking_number(t, 1, 2, 0.2) == 0);
}

TEST_CASE("pure monodromy words carry twice the total linking") {
  for (const auto& entry : corpus::families()) {
    const MotionFamily& f = entry.family;
    if (f.has_algebraic_strands()) continue;
    CAPTURE(entry.name);
    const MonodromyResult r = compute_monodromy(f);
    REQUIRE(r.generators.size() == f.domain().generators().size());
    bool all_trivial = true;
    for (std::size_t g = 0; g < r.generators.size(); ++g) {
      const Path& loop = f.domain().generators()[g];
      long linking = 0;
      bool pure = true;
      for (std::size_t i = 0; i < f.puncture_count(); ++i) {
        if (std::abs(eval_motion(f, loop.end())[i] - f.base()[i]) > 1e-9) pure = false;
        for (std::size_t j = i + 1; j < f.puncture_count(); ++j) {
          const StrandSpec a = f.strand(i), b = f.strand(j);
          linking += oracle::winding([&](double u) { return a.eval(loop.at(u)) - b.eval(loop.at(u)); }, 0.0);
        }
      }
      REQUIRE(pure);
      CHECK(r.generators[g].mapping_class.word.exponent_sum() == 2 * linking);
      all_trivial = all_trivial && r.generators[g].trivial;
    }
    CHECK(all_trivial == entry.trivial);
  }
}

TEST_CASE("monodromy of the corpus") {
  for (const auto& entry : corpus::families()) {
    CAPTURE(entry.name);
    CHECK(is_trivial_monodromy(entry.family) == entry.trivial);
    if (entry.family.domain().kind() == DomainKind::Disk) CHECK(monodromy(entry.family).empty());
  }
  const auto swap = monodromy(corpus::load("algebraic_swap").family);
  REQUIRE(swap.size() == 1);
  CHECK(swap[0].word.exponent_sum() == 3);
  const auto sq = monodromy(corpus::load("winding_squared").family);
  CHECK(sq[0].word.to_string() == "s1 s1 s1 s1");
}

TEST_CASE("projection angle avoids ties deterministically") {
  const Configuration generic = make_configuration({cplx(0.0), cplx(1.0), cplx(0.5, 0.2)});
  CHECK(choose_projection_angle(generic) == 0.0);
  const Configuration tied = make_configuration({cplx(0.0), cplx(1.0), cplx(0.0, 1.0)});
  const double a = choose_projection_angle(tied, 9);
  CHECK(a != 0.0);
  CHECK(a == choose_projection_angle(tied, 9));
  std::vector<std::size_t> order;
  CHECK(projection_order(tied.points(), a, order));
  CHECK_FALSE(projection_order(tied.points(), 0.0, order));
}
