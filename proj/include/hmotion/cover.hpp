#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hmotion/braid.hpp"
#include "hmotion/motion.hpp"

namespace hmotion {

/// A point of the universal cover of the configuration space, given by its
/// covering data: the homotopy class (as a braid word read in a fixed
/// projection) of a path from `base` and the endpoint configuration.
struct CoverPoint {
  Configuration base;
  BraidWord word;
  Configuration end;
  double projection_angle = 0.0;
};

/// Same endpoint within tol.cover (chordal, per puncture) and words that
/// differ by a trivial class in Mod(0, n).
bool same_cover_point(const CoverPoint& a, const CoverPoint& b, const Tolerances& tol = {});

struct LiftOptions {
  std::optional<double> projection_angle;  // default: choose_projection_angle(base, seed)
  std::uint64_t seed = 0;
  std::size_t initial_samples = 256;
};

/// Lifts a path starting at the basepoint. Throws Error(InvalidArgument)
/// when it starts elsewhere; continuation errors propagate.
CoverPoint lift_path(const MotionFamily& family, const Path& path, const Tolerances& tol = {},
                     const LiftOptions& options = {});

/// Deck element of the lifted generator loop.
MappingClass deck_transform(const MotionFamily& family, std::size_t generator,
                            const Tolerances& tol = {}, const LiftOptions& options = {});

/// Forgets the last puncture: drops it from both configurations and deletes
/// its strand from the word.
CoverPoint forgetful(const CoverPoint& point);

/// Removes every letter that exchanges the strand starting at `position`
/// and reindexes the rest; the strand's position is tracked through the word.
BraidWord delete_strand(const BraidWord& word, std::size_t position);

/// Coordinate of a puncture of the endpoint; index size() is infinity.
SpherePoint universal_motion_eval(const CoverPoint& point, std::size_t index);

/// Path-independence evidence at one probe parameter.
struct ProbeCertificate {
  cplx parameter{0.0};
  CoverPoint direct;
  CoverPoint detour;
  bool agree = false;
};

/// The single-valued lift of a family with trivial monodromy.
struct LiftedMap {
  MotionFamily family;
  double projection_angle = 0.0;
  std::vector<MappingClass> deck_words;
  std::vector<ProbeCertificate> probes;

  bool certified() const;
  /// Cover point over lambda along the default route from the basepoint.
  CoverPoint at(cplx lambda, const Tolerances& tol = {}) const;
};

/// Throws NontrivialMonodromy(generator, word) for the first generator with
/// a nontrivial deck word; otherwise certifies path independence on 16
/// probe points, each reached by two homotopy-distinct paths.
LiftedMap lift_map(const MotionFamily& family, const Tolerances& tol = {},
                   const LiftOptions& options = {});

}  // namespace hmotion
