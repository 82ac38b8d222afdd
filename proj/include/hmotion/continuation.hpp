#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hmotion/domain.hpp"
#include "hmotion/motion.hpp"
#include "hmotion/sphere.hpp"
#include "hmotion/tolerances.hpp"

namespace hmotion {

struct ContinuationOptions {
  std::size_t initial_samples = 256;
};

/// Sampled positions of every puncture (0 and 1 included as constant
/// strands) along a path. Adjacent samples move each strand by less than a
/// quarter of the track's minimum separation, so the piecewise-linear
/// interpolation is isotopic to the true motion.
class StrandTracks {
 public:
  const Path& path() const { return path_; }
  const std::vector<double>& times() const { return times_; }
  std::size_t sample_count() const { return times_.size(); }
  std::size_t strand_count() const { return positions_.size(); }
  std::span<const cplx> strand(std::size_t i) const { return positions_[i]; }
  cplx position(std::size_t strand, std::size_t sample) const {
    return positions_[strand][sample];
  }
  cplx parameter(std::size_t sample) const { return path_.at(times_[sample]); }
  std::vector<cplx> snapshot(std::size_t sample) const;
  Configuration configuration(std::size_t sample) const;
  Configuration final_configuration() const { return configuration(sample_count() - 1); }
  double min_separation() const { return min_separation_; }

  /// True when the sampled parameter range starts and ends at the same point.
  bool closed() const;

  /// The first `count` samples (count >= 2). The path is kept whole; the
  /// sampled range ends at times()[count - 1].
  StrandTracks prefix(std::size_t count) const;

 private:
  friend StrandTracks continue_strands(const MotionFamily&, const Path&, const Tolerances&,
                                       const ContinuationOptions&, std::span<const cplx>);
  StrandTracks() : path_(Path::constant(0.0)) {}
  Path path_;
  std::vector<double> times_;
  std::vector<std::vector<cplx>> positions_;
  double min_separation_ = 0.0;
};

/// Continues all strands of `family` along `path`. Closed-form strands are
/// evaluated directly; algebraic strands are tracked by an Euler predictor
/// on the root ODE and a Newton corrector, halving the step until the
/// corrector provably stays on the predicted branch. Starts from `start`
/// when given (one entry per puncture), otherwise from the family's values
/// at path.start() (algebraic strands require path.start() = basepoint).
///
/// Throws CollisionError(CollisionDetected) when two strands come within
/// tol.track, Error(StepUnderflow) when steps shrink below 1e-12, and
/// Error(OutsideDomain) when the path leaves the domain.
StrandTracks continue_strands(const MotionFamily& family, const Path& path,
                              const Tolerances& tol = {},
                              const ContinuationOptions& options = {},
                              std::span<const cplx> start = {});

/// Minimum over samples of the pairwise chordal distance of all punctures,
/// infinity included.
double min_separation(const StrandTracks& tracks);

/// Winding number of one strand's (closed) track around `center`.
/// Throws Error(NotClosed) and Error(TooClose).
int winding_number(const StrandTracks& tracks, std::size_t strand,
                   const SpherePoint& center, const Tolerances& tol = {});

/// Endpoint configuration of the continuation along `path`.
Configuration eval_along(const MotionFamily& family, const Path& path,
                         const Tolerances& tol = {});

}  // namespace hmotion
