// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "corpus.hpp"
#include "hmotion/braid.hpp"
#include "hmotion/continuation.hpp"
#include "hmotion/cover.hpp"
#include "hmotion/error.hpp"
#include "hmotion/extend.hpp"
#include "oracles.hpp"

#ifndef HMOTION_CLI
#error "HMOTION_CLI must name the command-line binary"
#endif

using namespace hmotion;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fixed(double v, int digits = 1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::vector<Path> corpus_paths(const MotionFamily& f) {
  std::vector<Path> paths = f.domain().generators();
  for (const cplx x : f.domain().sample_points(4, 0.05)) paths.push_back(f.domain().route(x, 0.02));
  return paths;
}

// Criteria 1 and 6 share the continuous-motion runs.
struct CorpusResult {
  Outcome equivalence, quality;
};

CorpusResult check_corpus() {
  CorpusResult out;
  const auto start = std::chrono::steady_clock::now();
  const auto families = corpus::families();
  int disagreements = 0, mislabeled = 0, trivial_count = 0;
  double worst_strand = 0.0, worst_jac = 1e300, worst_mu = 0.0;
  std::string failures;
  for (const auto& entry : families) {
    const bool trivial = is_trivial_monodromy(entry.family);
    bool built = false;
    try {
      const ContinuousMotionGrid g = build_continuous_motion(entry.family);
      built = true;
      worst_strand = std::max(worst_strand, g.max_strand_error());
      worst_jac = std::min(worst_jac, g.min_jacobian());
      worst_mu = std::max(worst_mu, g.max_beltrami());
      if (!(g.max_strand_error() < 1e-6 && g.min_jacobian() > 0.0 && g.max_beltrami() < 1.0)) {
        out.quality.pass = false;
        failures += " " + entry.name;
      }
    } catch (const Error&) {
    }
    trivial_count += trivial;
    disagreements += built != trivial;
    mislabeled += trivial != entry.trivial;
  }
  const double elapsed = seconds_since(start);
  out.equivalence.pass = families.size() >= 12 && disagreements == 0 && mislabeled == 0 && elapsed < 300.0;
  out.equivalence.detail = std::to_string(families.size()) + " families (" + std::to_string(trivial_count) +
                           " trivial), " + std::to_string(disagreements) + " disagreements, " +
                           std::to_string(mislabeled) + " against known labels, " + fixed(elapsed) + " s";
  out.quality.detail = std::to_string(trivial_count) + " trivial families, strand error " + sci(worst_strand) +
                       ", min Jacobian " + fixed(worst_jac, 3) + ", max |mu| " + fixed(worst_mu, 3);
  if (!failures.empty()) out.quality.detail += "; failing:" + failures;
  out.quality.pass = out.quality.pass && trivial_count > 0;
  return out;
}

Outcome check_monodromy_oracles() {
  Outcome out;
  const MotionFamily w = corpus::load("winding_w").family;
  const MonodromyResult r = compute_monodromy(w);
  const BraidWord word = r.generators.at(0).mapping_class.word;
  const int lk = linking_number(r.generators[0].tracks, 0, 2, r.projection_angle);
  out.pass = word.free_reduced() == BraidWord(3, {1, 1}) && word.exponent_sum() == 2 && lk == 1;
  out.detail = "W: [" + word.to_string() + "] exponent sum " + std::to_string(word.exponent_sum()) + ", linking " +
               std::to_string(lk);

  const auto wiggle = monodromy(corpus::load("wiggle").family);
  const bool wiggle_empty = wiggle.size() == 1 && wiggle[0].word.free_reduced().empty();
  out.pass = out.pass && wiggle_empty;
  out.detail += std::string("; wiggle ") + (wiggle_empty ? "empty" : "[" + wiggle.at(0).word.to_string() + "]");

  int disks = 0;
  for (const auto& entry : corpus::families()) {
    if (entry.family.domain().kind() != DomainKind::Disk) continue;
    ++disks;
    out.pass = out.pass && monodromy(entry.family).empty();
  }
  out.pass = out.pass && disks > 0;
  out.detail += "; " + std::to_string(disks) + " disk families without generators";
  return out;
}

Outcome check_word_problem() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  int failures = 0;
  auto random_word = [&](std::size_t m) {
    std::uniform_int_distribution<std::size_t> len(0, 20);
    std::uniform_int_distribution<int> gen(1, static_cast<int>(m) - 1);
    std::vector<int> letters(len(rng));
    for (int& l : letters) l = gen(rng) * (rng() % 2 ? 1 : -1);
    return BraidWord(m, letters);
  };
  auto quotient = [](const BraidWord& w) { return is_trivial_mapping_class({w}); };
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(trial % 5);
    const BraidWord w = random_word(m), u = random_word(m);
    const BraidWord d2 = BraidWord::full_twist(m);
    bool ok = is_trivial_braid(w * w.inverse());
    ok = ok && is_trivial_braid(w) == oracle::burau_trivial(m, w.letters());
    if (m >= 3) {
      const int i = 1 + static_cast<int>(rng() % (m - 2));
      const BraidWord rel(m, {i, i + 1, i, -(i + 1), -i, -(i + 1)});
      ok = ok && is_trivial_braid(u * rel * u.inverse());
      if (m >= 4) {
        const int j = i + 2 <= static_cast<int>(m) - 1 ? i + 2 : i - 2;
        if (j >= 1) ok = ok && is_trivial_braid(u * BraidWord(m, {i, j, -i, -j}) * u.inverse());
      }
    }
    ok = ok && quotient(d2) && !is_trivial_braid(d2);
    const bool verdict = quotient(w);
    ok = ok && verdict == oracle::quotient_trivial(m, w.letters());
    ok = ok && quotient(u * w * u.inverse()) == verdict;
    ok = ok && quotient(w * d2) == verdict && quotient(d2.inverse() * w) == verdict;
    failures += !ok;
  }
  const double elapsed = seconds_since(start);
  out.pass = failures == 0 && elapsed < 60.0;
  out.detail = "1000 words, " + std::to_string(failures) + " failures, " + fixed(elapsed, 2) + " s";
  return out;
}

Outcome check_cover_identities() {
  Outcome out;
  int violations = 0, endpoint_checks = 0, pair_checks = 0, forget_checks = 0;
  double worst = 0.0;
  for (const auto& entry : corpus::families()) {
    const MotionFamily& f = entry.family;
    for (const Path& p : corpus_paths(f)) {
      const CoverPoint lifted = lift_path(f, p);
      for (std::size_t i = 0; i < f.puncture_count(); ++i) {
        cplx expected;
        if (f.strand(i).is_closed_form()) {
          expected = f.strand(i).eval(p.end());
        } else {
          const Expr poly = f.strand(i).polynomial();
          expected = oracle::follow_root([&](cplx z, cplx l) { return poly.eval<cplx>(l, z); },
                                         [&](double t) { return p.at(t); }, f.base()[i]);
          // Polish the oracle root so the comparison is at the 1e-10 level.
          for (int k = 0; k < 5; ++k) {
            const Dual d = poly.eval_with_variable_slope(p.end(), expected);
            expected -= d.value / d.slope;
          }
        }
        const double err = oracle::chordal(universal_motion_eval(lifted, i).value(), expected);
        worst = std::max(worst, err);
        violations += !(err < 1e-10);
        ++endpoint_checks;
      }

      // Paired lifts at two samplings agree at every common time.
      ContinuationOptions coarse, fine;
      fine.initial_samples = 1024;
      const StrandTracks a = continue_strands(f, p, {}, coarse), b = continue_strands(f, p, {}, fine);
      std::size_t kb = 0;
      for (std::size_t ka = 0; ka < a.sample_count(); ++ka) {
        while (kb < b.sample_count() && b.times()[kb] < a.times()[ka]) ++kb;
        if (kb == b.sample_count() || b.times()[kb] != a.times()[ka]) continue;
        for (std::size_t i = 0; i < a.strand_count(); ++i) {
          violations += !(oracle::chordal(a.position(i, ka), b.position(i, kb)) < 1e-10);
        }
      }
      LiftOptions lf;
      lf.initial_samples = 1024;
      violations += !same_cover_point(lifted, lift_path(f, p, {}, lf));
      ++pair_checks;
    }
  }

  // Forgetful compatibility on extended families.
  std::vector<std::pair<MotionFamily, std::size_t>> extended;  // family, strands to forget
  const MotionFile wiggle = corpus::load("wiggle");
  const MotionFamily id = corpus::load("identity").family;
  extended.emplace_back(wiggle.family.with_strand(solve_new_strand(wiggle.family, 0.25, 2).strand, 0.25), 1);
  extended.emplace_back(id.with_strand(solve_new_strand(id, -1.0, 2).strand, -1.0), 1);
  extended.emplace_back(
      extend_motion_inductive(wiggle.family, wiggle.extend_points, wiggle.degree_schedule).family, 2);
  for (const char* name : {"disk_two", "exchange_trivial", "exchange", "algebraic_pair"}) {
    extended.emplace_back(corpus::load(name).family, 1);
  }
  for (const auto& [f, depth] : extended) {
    LiftOptions opts;
    opts.projection_angle = choose_projection_angle(f.base());
    for (std::size_t d = 1; d <= depth; ++d) {
      MotionFamily lower = f;
      for (std::size_t k = 0; k < d; ++k) lower = lower.without_last_strand();
      for (const Path& p : corpus_paths(f)) {
        CoverPoint upper = lift_path(f, p, {}, opts);
        for (std::size_t k = 0; k < d; ++k) upper = forgetful(upper);
        const CoverPoint down = lift_path(lower, p, {}, opts);
        violations += !(same_cover_point(upper, down) && upper.word == down.word);
        ++forget_checks;
      }
    }
  }
  out.pass = violations == 0;
  out.detail = std::to_string(endpoint_checks) + " endpoint checks (worst " + sci(worst) + "), " +
               std::to_string(pair_checks) + " paired lifts, " + std::to_string(forget_checks) +
               " forgetful checks, " + std::to_string(violations) + " violations";
  return out;
}

Outcome check_new_strand() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const MotionFile wiggle = corpus::load("wiggle");
  const MotionFamily& f = wiggle.family;
  const NewStrand s = solve_new_strand(f, 0.25, 2);
  const MotionFamily ext = f.with_strand(s.strand, 0.25);
  const bool mono = is_trivial_monodromy(ext);

  const LiftedMap upper = lift_map(ext);
  const LiftedMap lower = lift_map(f, {}, {.projection_angle = upper.projection_angle});
  bool projects = upper.certified() && lower.certified();
  for (const auto& probe : upper.probes) {
    projects = projects && same_cover_point(forgetful(probe.direct), lower.at(probe.parameter));
  }

  const InductiveExtension chain = extend_motion_inductive(f, wiggle.extend_points, wiggle.degree_schedule);
  bool stages = chain.stages.size() == 2;
  for (const auto& st : chain.stages) {
    stages = stages && st.validated && st.monodromy_trivial && st.forgetful_compatible;
  }
  const double elapsed = seconds_since(start);
  out.pass = s.margin >= 0.05 && s.holomorphy_residual < 1e-8 && mono && projects && stages && elapsed < 120.0;
  out.detail = "margin " + fixed(s.margin, 3) + ", holomorphy " + sci(s.holomorphy_residual) +
               ", extended monodromy " + (mono ? "trivial" : "nontrivial") + ", projection " +
               (projects ? "ok" : "fails") + ", " + std::to_string(chain.stages.size()) + " stages " +
               (stages ? "ok" : "fail") + ", " + fixed(elapsed) + " s";
  return out;
}

Outcome check_fixed_point() {
  Outcome out;
  const double tol = 1e-10;
  const cplx zeta(0.4, -0.7);
  std::vector<cplx> init(16);
  for (std::size_t k = 0; k < init.size(); ++k) init[k] = cplx(std::cos(k), std::sin(3.0 * k));

  FixedPointProblem zero{zeta, [](std::span<const cplx> g) { return std::vector<cplx>(g.size(), 0.0); }, tol};
  FixedPointProblem half{zeta,
                         [](std::span<const cplx> g) {
                           std::vector<cplx> v(g.begin(), g.end());
                           for (cplx& x : v) x *= 0.5;
                           return v;
                         },
                         tol};
  const FixedPointResult a = fixed_point_iterate(zero, init), b = fixed_point_iterate(half, init);
  double err = 0.0;
  for (const cplx v : a.values) err = std::max(err, std::abs(v - zeta));
  for (const cplx v : b.values) err = std::max(err, std::abs(v - 2.0 * zeta));
  const double spread = std::max(a.uniqueness_spread, b.uniqueness_spread);
  out.pass = err <= tol && spread <= 10.0 * tol && a.unique && b.unique;
  out.detail = "max error " + sci(err) + ", uniqueness spread " + sci(spread) + " (3 initials), iterations " +
               std::to_string(a.iterations) + "/" + std::to_string(b.iterations);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome check_determinism() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / ("hmotion_acceptance_" + std::to_string(::getpid()));
  const std::vector<std::string> runs{
      "validate --input " + corpus::motion_path("identity"),
      "monodromy --input " + corpus::motion_path("winding_w") + " --seed 7",
      "monodromy --input " + corpus::motion_path("algebraic_swap") + " --seed 7",
      "lift --input " + corpus::motion_path("wiggle") + " --seed 3",
      "extend --mode point --point 0.25 --input " + corpus::motion_path("wiggle") + " --seed 3",
      "extend --mode continuous --input " + corpus::motion_path("disk") + " --seed 3",
  };
  int compared = 0, differing = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const fs::path dirs[2] = {root / (std::to_string(r) + "a"), root / (std::to_string(r) + "b")};
    for (const auto& d : dirs) {
      const std::string cmd = std::string(HMOTION_CLI) + " " + runs[r] + " --out " + d.string() + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) == -1) ++differing;
    }
    if (!fs::exists(dirs[0] / "report.json")) {
      ++differing;
      continue;
    }
    for (const auto& file : fs::directory_iterator(dirs[0])) {
      ++compared;
      const fs::path twin = dirs[1] / file.path().filename();
      differing += !fs::exists(twin) || slurp(file.path()) != slurp(twin);
    }
  }
  fs::remove_all(root);
  out.pass = differing == 0 && compared >= static_cast<int>(runs.size());
  out.detail = std::to_string(runs.size()) + " commands run twice, " + std::to_string(compared) +
               " files compared, " + std::to_string(differing) + " differ";
  return out;
}

template <class F>
Outcome guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  CorpusResult corpus_result;
  try {
    corpus_result = check_corpus();
  } catch (const std::exception& e) {
    corpus_result.equivalence = corpus_result.quality = {false, std::string("exception: ") + e.what()};
  }
  const std::pair<const char*, Outcome> rows[] = {
      {"1 equivalence corpus", corpus_result.equivalence},
      {"2 monodromy oracles", guarded(check_monodromy_oracles)},
      {"3 word problem", guarded(check_word_problem)},
      {"4 covering identities", guarded(check_cover_identities)},
      {"5 new strand and induction", guarded(check_new_strand)},
      {"6 continuous motion quality", corpus_result.quality},
      {"7 fixed point interface", guarded(check_fixed_point)},
      {"8 determinism", guarded(check_determinism)},
  };
  bool all = true;
  for (const auto& [name, o] : rows) {
    std::printf("[%s] criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    all = all && o.pass;
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
