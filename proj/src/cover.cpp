#include "hmotion/cover.hpp"

#include <algorithm>
#include <future>

#include "hmotion/continuation.hpp"
#include "hmotion/error.hpp"

namespace hmotion {

namespace {

constexpr std::size_t kProbeCount = 16;

double probe_clearance(const ParameterDomain& domain, const Tolerances& tol) {
  return std::max(tol.boundary, 0.02 * domain.outer_radius());
}

std::size_t initial_position(const CoverPoint& point, std::size_t label) {
  std::vector<std::size_t> order;
  projection_order(point.base.points(), point.projection_angle, order);
  return static_cast<std::size_t>(std::find(order.begin(), order.end(), label) - order.begin());
}

}  // namespace

bool same_cover_point(const CoverPoint& a, const CoverPoint& b, const Tolerances& tol) {
  if (a.end.size() != b.end.size() || a.word.strand_count() != b.word.strand_count()) return false;
  for (std::size_t i = 0; i < a.end.size(); ++i) {
    if (chordal_distance(a.end[i], b.end[i]) > tol.cover) return false;
  }
  return same_mapping_class(MappingClass{a.word}, MappingClass{b.word});
}

CoverPoint lift_path(const MotionFamily& family, const Path& path, const Tolerances& tol,
                     const LiftOptions& options) {
  if (std::abs(path.start() - family.domain().basepoint()) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "lifted paths must start at the basepoint");
  }
  const double angle = options.projection_angle.value_or(
      choose_projection_angle(family.base(), options.seed));
  ContinuationOptions copts;
  copts.initial_samples = options.initial_samples;
  const StrandTracks tracks = continue_strands(family, path, tol, copts);
  const ExtractedBraid braid = extract_braid_generic(tracks, angle, options.seed);
  return CoverPoint{family.base(), braid.word.free_reduced(), tracks.final_configuration(), angle};
}

MappingClass deck_transform(const MotionFamily& family, std::size_t generator,
                            const Tolerances& tol, const LiftOptions& options) {
  const auto& loops = family.domain().generators();
  if (generator >= loops.size()) {
    throw Error(ErrorKind::InvalidArgument, "generator index out of range");
  }
  return MappingClass{lift_path(family, loops[generator], tol, options).word};
}

BraidWord delete_strand(const BraidWord& word, std::size_t position) {
  if (position >= word.strand_count() || word.strand_count() < 2) {
    throw Error(ErrorKind::InvalidArgument, "deleted strand out of range");
  }
  std::vector<int> kept;
  std::size_t p = position;
  for (int letter : word.letters()) {
    const std::size_t g = static_cast<std::size_t>(std::abs(letter));  // swaps g-1 and g
    if (p == g - 1 || p == g) {
      p = p == g ? g - 1 : g;
    } else if (g - 1 > p) {
      kept.push_back(letter > 0 ? letter - 1 : letter + 1);
    } else {
      kept.push_back(letter);
    }
  }
  return BraidWord(word.strand_count() - 1, std::move(kept));
}

CoverPoint forgetful(const CoverPoint& point) {
  const std::size_t last = point.base.size() - 1;
  return CoverPoint{point.base.without_last(),
                    delete_strand(point.word, initial_position(point, last)).free_reduced(),
                    point.end.without_last(), point.projection_angle};
}

SpherePoint universal_motion_eval(const CoverPoint& point, std::size_t index) {
  if (index == point.end.size()) return SpherePoint::infinity();
  if (index > point.end.size()) {
    throw Error(ErrorKind::InvalidArgument, "puncture index out of range");
  }
  return point.end[index];
}

bool LiftedMap::certified() const {
  return std::all_of(probes.begin(), probes.end(), [](const ProbeCertificate& p) { return p.agree; });
}

CoverPoint LiftedMap::at(cplx lambda, const Tolerances& tol) const {
  LiftOptions options;
  options.projection_angle = projection_angle;
  const Path path = family.domain().route(lambda, probe_clearance(family.domain(), tol));
  return lift_path(family, path, tol, options);
}

LiftedMap lift_map(const MotionFamily& family, const Tolerances& tol, const LiftOptions& options) {
  LiftOptions fixed = options;
  fixed.projection_angle =
      options.projection_angle.value_or(choose_projection_angle(family.base(), options.seed));
  LiftedMap out{family, *fixed.projection_angle, {}, {}};

  const ParameterDomain& domain = family.domain();
  const auto& loops = domain.generators();
  for (std::size_t g = 0; g < loops.size(); ++g) {
    MappingClass cls = deck_transform(family, g, tol, fixed);
    if (!is_trivial_mapping_class(cls)) {
      throw NontrivialMonodromy(ErrorKind::NontrivialMonodromy, g, cls.word.to_string());
    }
    out.deck_words.push_back(std::move(cls));
  }

  const double clearance = probe_clearance(domain, tol);
  const std::vector<cplx> probes = domain.sample_points(kProbeCount + 1, 2.0 * clearance);
  std::vector<std::future<ProbeCertificate>> jobs;
  for (std::size_t k = 0; k < kProbeCount && k < probes.size(); ++k) {
    jobs.push_back(std::async(std::launch::async, [&, k] {
      const cplx lambda = probes[k];
      const Path direct = domain.route(lambda, clearance);
      Path detour = direct;
      if (!loops.empty()) {
        detour = loops[k % loops.size()].then(direct);
      } else {
        const cplx via = probes[(k + 1) % probes.size()];
        detour = domain.route(via, clearance).then(domain.route_between(via, lambda, clearance));
      }
      ProbeCertificate cert{lambda, lift_path(family, direct, tol, fixed),
                            lift_path(family, detour, tol, fixed), false};
      cert.agree = same_cover_point(cert.direct, cert.detour, tol);
      return cert;
    }));
  }
  for (auto& job : jobs) out.probes.push_back(job.get());
  return out;
}

}  // namespace hmotion
