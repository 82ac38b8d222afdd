#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hmotion/continuation.hpp"
#include "hmotion/motion.hpp"
#include "hmotion/tolerances.hpp"

namespace hmotion {

/// Word in the Artin generators of the braid group on `strand_count`
/// strands. Letter +i is sigma_i, -i its inverse (1 <= i < strand_count);
/// positions count from the left of the real-part ordering.
class BraidWord {
 public:
  explicit BraidWord(std::size_t strand_count, std::vector<int> letters = {});

  /// Parses whitespace-separated tokens "s1 s2^-1 ...".
  static BraidWord parse(std::size_t strand_count, std::string_view text);
  /// The full twist Delta^2 = (s1 s2 ... s_{m-1})^m.
  static BraidWord full_twist(std::size_t strand_count);

  std::size_t strand_count() const { return strands_; }
  const std::vector<int>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  long exponent_sum() const;
  BraidWord inverse() const;
  BraidWord free_reduced() const;
  BraidWord power(int k) const;

  friend BraidWord operator*(const BraidWord& a, const BraidWord& b);
  friend bool operator==(const BraidWord& a, const BraidWord& b) = default;

  std::string to_string() const;

 private:
  std::size_t strands_;
  std::vector<int> letters_;
};

/// Dynnikov coordinates (a_1, b_1, ..., a_m, b_m) of an integral
/// lamination of the punctured disk. The braid group acts on the right by
/// piecewise-linear maps; a braid is trivial iff it fixes the base vector
/// (0, 1, 0, 1, ...).
using DynnikovCoords = std::vector<std::int64_t>;

DynnikovCoords dynnikov_base(std::size_t strand_count);
/// Applies one letter in place. Throws Error(InvalidArgument) on overflow.
void dynnikov_apply(DynnikovCoords& coords, int letter);
DynnikovCoords dynnikov_act(DynnikovCoords coords, const BraidWord& word);

/// Identity in the braid group of the disk.
bool is_trivial_braid(const BraidWord& word);

/// Element of Mod(0, m + 1): the disk braid capped at infinity. Two words
/// give the same class iff they differ by braid relations and powers of the
/// full twist.
struct MappingClass {
  BraidWord word;
  std::size_t puncture_count() const { return word.strand_count() + 1; }
};

/// Kernel test for B_m -> Mod(0, m + 1): the exponent sum must be
/// t * m(m - 1) and word * Delta^(-2t) must be a trivial disk braid.
bool is_trivial_mapping_class(const MappingClass& cls);
bool same_mapping_class(const MappingClass& a, const MappingClass& b);

struct Crossing {
  double time;
  std::size_t left, right;  // strand labels; left had the smaller projection
  int letter;               // signed generator
};

struct ExtractedBraid {
  BraidWord word;
  double projection_angle = 0.0;
  std::vector<Crossing> crossings;
  std::vector<std::size_t> initial_order;  // strand labels left to right
  std::vector<std::size_t> final_order;
};

/// Order of the points along the projection direction e^{i angle}
/// (ascending real part of z e^{-i angle}). Returns false on ties.
bool projection_order(std::span<const cplx> points, double angle,
                      std::vector<std::size_t>& order);

/// Reads the braid from the piecewise-linear interpolation of the tracks
/// projected on the direction e^{i angle}: each exchange of adjacent strands
/// is a letter, positive when the strand coming from the left passes below
/// (smaller imaginary part after rotation). Throws Error(DegenerateCrossing)
/// if the projection is not generic.
ExtractedBraid extract_braid(const StrandTracks& tracks, double angle);

/// As extract_braid, with small perturbations of `angle` (never crossing a
/// tie of the initial or final configuration) when it is degenerate.
ExtractedBraid extract_braid_generic(const StrandTracks& tracks, double angle,
                                     std::uint64_t seed = 0);

BraidWord braid_from_tracks(const StrandTracks& tracks, double angle = 0.0);

/// Default projection angle for a base configuration: 0 when the real parts
/// are distinct, otherwise a seeded random rotation.
double choose_projection_angle(const Configuration& base, std::uint64_t seed = 0);

/// Half the signed crossing count between strands i and j of closed tracks.
/// Throws Error(NotClosed) unless both strands return to their start.
int linking_number(const StrandTracks& tracks, std::size_t i, std::size_t j,
                   double angle = 0.0);

struct MonodromyOptions {
  std::uint64_t seed = 0;
  std::size_t initial_samples = 256;
};

struct GeneratorMonodromy {
  MappingClass mapping_class;
  bool trivial = false;
  StrandTracks tracks;
  std::vector<Crossing> crossings;
};

struct MonodromyResult {
  double projection_angle = 0.0;
  std::vector<GeneratorMonodromy> generators;
  bool trivial() const;
};

/// Continues the strands around every generator loop, reads the braid and
/// classifies it in Mod(0, n). Order matches domain().generators().
MonodromyResult compute_monodromy(const MotionFamily& family, const Tolerances& tol = {},
                                  const MonodromyOptions& options = {});
std::vector<MappingClass> monodromy(const MotionFamily& family, const Tolerances& tol = {},
                                    const MonodromyOptions& options = {});
bool is_trivial_monodromy(const MotionFamily& family, const Tolerances& tol = {},
                          const MonodromyOptions& options = {});

}  // namespace hmotion
