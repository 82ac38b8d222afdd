#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hmotion/braid.hpp"
#include "hmotion/motion.hpp"

namespace hmotion {

/// Rectangular grid origin + step * (i + j i), i < nx, j < ny; points are
/// stored row-major (index j * nx + i).
struct GridSpec {
  cplx origin{0.0};
  double step = 0.02;
  std::size_t nx = 0, ny = 0;

  std::size_t size() const { return nx * ny; }
  cplx point(std::size_t i, std::size_t j) const {
    return origin + step * cplx(static_cast<double>(i), static_cast<double>(j));
  }
};

/// The sphere homeomorphism at one parameter sample, restricted to the grid.
struct GridSample {
  cplx parameter{0.0};
  long parent = -1;                 // index of the tree parent, -1 at the root
  std::vector<cplx> image;          // grid map, row-major
  std::vector<float> beltrami;      // |mu| per grid point
  std::vector<cplx> punctures;      // image of the base configuration
  double jacobian_min = 1.0;        // min normalized signed area of image triangles
  double beltrami_sup = 0.0;
  double strand_error = 0.0;        // max chordal error at the punctures
};

struct ContinuousMotionGrid {
  GridSpec grid;
  cplx support_center{0.0};
  double support_radius = 0.0;      // the flow is the identity outside this disk
  double min_separation = 0.0;      // Euclidean, between flow nodes along all tree edges
  std::vector<GridSample> samples;  // samples[0] is the basepoint

  double max_strand_error() const;
  double min_jacobian() const;
  double max_beltrami() const;
  /// Largest |beltrami_sup(child) - beltrami_sup(parent)| over tree edges.
  double max_beltrami_jump() const;
};

struct ContinuousMotionOptions {
  std::size_t branch_count = 16;    // tree leaves (Halton parameter points)
  double max_edge = 0.1;            // parameter distance between tree nodes
  std::uint64_t seed = 0;
  std::size_t initial_samples = 256;
  std::optional<GridSpec> grid;     // default: box around the support, step <= 0.02
};

/// Extends a motion with trivial monodromy to the whole sphere by the flow
/// of a time-dependent vector field, evaluated on a basepoint-rooted tree of
/// parameter samples. The field blends the strand velocities with inverse
/// square distance weights, together with a ring of fixed anchors around the
/// moving strands, and is cut off smoothly outside a disk. The punctures
/// that do not move, and infinity, stay fixed.
///
/// Throws NontrivialMonodromy, Error(TubeCollapse) when the track
/// separation is below four grid steps and Error(FlowBlowup) when the
/// integrator cannot keep the grid map orientation preserving.
ContinuousMotionGrid build_continuous_motion(const MotionFamily& family, const Tolerances& tol = {},
                                             const ContinuousMotionOptions& options = {});

struct NewStrandOptions {
  std::uint64_t seed = 0;
  std::size_t starts = 16;
  std::size_t validation_samples = 192;
  std::size_t max_evaluations = 4000;
};

struct NewStrand {
  StrandSpec strand;
  int degree = 0;
  double margin = 0.0;              // chordal, over validation samples and loop tracks
  double holomorphy_residual = 0.0;
  std::vector<cplx> coefficients;   // c_1..c_d of zeta + sum c_k ((lambda - x0) / R)^k
};

/// Chordal margin of a candidate strand against the family: the minimum
/// over `parameters` of the distance from h(lambda) to every puncture and
/// to infinity. `configurations[k]` are the punctures at parameters[k].
double strand_margin(const StrandSpec& strand, std::span<const cplx> parameters,
                     std::span<const std::vector<cplx>> configurations);

/// Finds a closed-form strand through `zeta` at the basepoint avoiding every
/// existing strand by at least tol.margin_min, with trivial extended
/// monodromy. Throws Error(InvalidNewPoint), NoStrandFound,
/// Error(NontrivialExtendedMonodromy) and NontrivialMonodromy (precondition).
NewStrand solve_new_strand(const MotionFamily& family, cplx zeta, int degree,
                           const Tolerances& tol = {}, const NewStrandOptions& options = {});

/// g <- zeta + K g on a grid of sample values.
struct FixedPointProblem {
  cplx target{0.0};
  std::function<std::vector<cplx>(std::span<const cplx>)> op;
  double tolerance = 1e-10;
  int max_iterations = 1000;
};

struct FixedPointResult {
  std::vector<cplx> values;
  int iterations = 0;               // applications of K
  double residual = 0.0;            // last increment sup |g_{k+1} - g_k|
  std::vector<double> increments;   // sup |g_{k+1} - g_k| per iteration
  double uniqueness_spread = 0.0;   // sup distance between the three limits
  bool unique = true;               // spread <= 10 * tolerance
};

/// Iterates to a fixed point and repeats from two further initial functions
/// (zero and a shifted constant) to probe uniqueness. Throws Diverged.
FixedPointResult fixed_point_iterate(const FixedPointProblem& problem,
                                     std::span<const cplx> initial, bool probe_uniqueness = true);

struct StageReport {
  cplx point{0.0};
  int degree = 0;
  double margin = 0.0;
  double holomorphy_residual = 0.0;
  bool validated = false;
  bool monodromy_trivial = false;
  bool forgetful_compatible = false;
  std::string strand;
};

struct InductiveExtension {
  MotionFamily family;
  std::vector<StageReport> stages;
};

struct InductiveOptions {
  NewStrandOptions solver;
  std::size_t validation_budget = 400;
  std::size_t forgetful_probes = 4;
};

/// Adds the points one at a time; every stage is validated, its monodromy
/// rechecked and the forgetful map checked against the previous stage.
/// Throws StageFailure(stage, cause) for the first failing point.
InductiveExtension extend_motion_inductive(const MotionFamily& family,
                                           std::span<const cplx> new_points,
                                           std::span<const int> degree_schedule,
                                           const Tolerances& tol = {},
                                           const InductiveOptions& options = {});

}  // namespace hmotion
