#include "hmotion/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hmotion/error.hpp"

namespace hmotion {

namespace {

constexpr double kMinStep = 1e-12;

struct Closest {
  double distance;
  std::size_t i, j;  // j == size means infinity
};

Closest closest_pair(std::span<const cplx> pts) {
  Closest c{};
  c.distance = min_chordal_separation(pts, &c.i, &c.j);
  return c;
}

double min_euclidean_separation(std::span<const cplx> pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      best = std::min(best, std::abs(pts[i] - pts[j]));
    }
  }
  return best;
}

class Continuator {
 public:
  Continuator(const MotionFamily& family, const Path& path)
      : family_(family), path_(path) {
    for (std::size_t i = 0; i < family.puncture_count(); ++i) {
      strands_.push_back(family.strand(i));
    }
  }

  std::vector<cplx> start_values(std::span<const cplx> start) const {
    if (!start.empty()) {
      if (start.size() != strands_.size()) {
        throw Error(ErrorKind::InvalidArgument, "start configuration has the wrong size");
      }
      return {start.begin(), start.end()};
    }
    const cplx lambda = path_.start();
    std::vector<cplx> values(strands_.size());
    const bool at_basepoint = std::abs(lambda - family_.domain().basepoint()) <= 1e-14;
    for (std::size_t i = 0; i < strands_.size(); ++i) {
      if (strands_[i].is_closed_form()) {
        values[i] = strands_[i].eval(lambda);
      } else if (at_basepoint) {
        values[i] = family_.base()[i];
      } else {
        throw Error(ErrorKind::OffTrack,
                    "algebraic strand " + std::to_string(i) +
                        " needs a start value away from the basepoint");
      }
    }
    return values;
  }

  // Positions at time t1 given positions at time t0.
  std::vector<cplx> advance(const std::vector<cplx>& from, double t0, double t1) const {
    const cplx lambda1 = path_.at(t1);
    if (family_.domain().boundary_distance(lambda1) <= 0.0) {
      throw Error(ErrorKind::OutsideDomain, "continuation path leaves the parameter domain");
    }
    std::vector<cplx> out = from;
    bool any_algebraic = false;
    for (std::size_t i = 0; i < strands_.size(); ++i) {
      if (strands_[i].is_closed_form()) {
        out[i] = strands_[i].eval(lambda1);
      } else {
        any_algebraic = true;
      }
    }
    if (!any_algebraic) return out;

    // Sub-step the algebraic strands from t0 to t1.
    std::vector<cplx> cur = from;
    double t = t0;
    double dt = t1 - t0;
    while (t < t1) {
      dt = std::min(dt, t1 - t);
      const double tn = (t1 - t - dt) <= 1e-15 ? t1 : t + dt;
      std::vector<cplx> next;
      if (try_algebraic_step(cur, t, tn, next)) {
        // Closed-form strands at the intermediate time keep the distance
        // checks of the next sub-step honest.
        for (std::size_t i = 0; i < strands_.size(); ++i) {
          if (strands_[i].is_closed_form()) next[i] = strands_[i].eval(path_.at(tn));
        }
        cur = std::move(next);
        t = tn;
        dt *= 2.0;
      } else {
        dt *= 0.5;
        if (dt < kMinStep) {
          throw Error(ErrorKind::StepUnderflow,
                      "root tracking step underflow at t = " + std::to_string(t));
        }
      }
    }
    for (std::size_t i = 0; i < strands_.size(); ++i) {
      if (!strands_[i].is_closed_form()) out[i] = cur[i];
    }
    return out;
  }

 private:
  bool try_algebraic_step(const std::vector<cplx>& cur, double t0, double t1,
                          std::vector<cplx>& next) const {
    const cplx l0 = path_.at(t0), l1 = path_.at(t1);
    next = cur;
    for (std::size_t i = 0; i < strands_.size(); ++i) {
      if (strands_[i].is_closed_form()) continue;
      const Expr& poly = strands_[i].polynomial();
      const cplx z0 = cur[i];
      const Dual pl = poly.eval_with_parameter_slope(l0, z0);
      const Dual pz = poly.eval_with_variable_slope(l0, z0);
      if (std::abs(pz.slope) == 0.0) return false;
      const cplx predicted = z0 - pl.slope / pz.slope * (l1 - l0);

      double room = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < cur.size(); ++j) {
        if (j != i) room = std::min(room, std::abs(cur[j] - z0));
      }

      cplx z = predicted;
      double first_step = -1.0, second_step = -1.0;
      bool converged = false;
      for (int it = 0; it < 8; ++it) {
        const Dual p = poly.eval_with_variable_slope(l1, z);
        if (std::abs(p.slope) == 0.0) return false;
        const cplx delta = p.value / p.slope;
        z -= delta;
        const double step = std::abs(delta);
        if (it == 0) first_step = step;
        if (it == 1) second_step = step;
        if (step <= 1e-15 * (1.0 + std::abs(z))) {
          converged = true;
          break;
        }
      }
      if (!converged || !std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
      // Quadratic convergence from the predictor certifies the basin.
      if (second_step >= 0.0 && first_step > 1e-13 * (1.0 + std::abs(z)) &&
          second_step > 0.25 * first_step) {
        return false;
      }
      if (std::abs(z - predicted) > 0.25 * room) return false;
      if (std::abs(z - z0) > 0.25 * room) return false;
      next[i] = z;
    }
    return true;
  }

  const MotionFamily& family_;
  const Path& path_;
  std::vector<StrandSpec> strands_;
};

void check_sample(std::span<const cplx> pts, double t, cplx lambda, const Tolerances& tol) {
  const Closest c = closest_pair(pts);
  if (c.distance < tol.track) {
    throw CollisionError(ErrorKind::CollisionDetected, c.i, c.j, lambda, t, c.distance);
  }
}

}  // namespace

std::vector<cplx> StrandTracks::snapshot(std::size_t sample) const {
  std::vector<cplx> pts(positions_.size());
  for (std::size_t i = 0; i < positions_.size(); ++i) pts[i] = positions_[i][sample];
  return pts;
}

Configuration StrandTracks::configuration(std::size_t sample) const {
  const auto pts = snapshot(sample);
  return make_configuration(std::span<const cplx>(pts));
}

bool StrandTracks::closed() const {
  return std::abs(parameter(0) - parameter(sample_count() - 1)) <= 1e-12;
}

StrandTracks StrandTracks::prefix(std::size_t count) const {
  if (count < 2 || count > sample_count()) {
    throw Error(ErrorKind::InvalidArgument, "prefix length out of range");
  }
  StrandTracks out = *this;
  out.times_.resize(count);
  for (auto& p : out.positions_) p.resize(count);
  out.min_separation_ = hmotion::min_separation(out);
  return out;
}

StrandTracks continue_strands(const MotionFamily& family, const Path& path,
                              const Tolerances& tol, const ContinuationOptions& options,
                              std::span<const cplx> start) {
  Continuator runner(family, path);
  const std::size_t n = path.length() == 0.0 ? 1 : std::max<std::size_t>(1, options.initial_samples);

  std::vector<double> times(n + 1);
  for (std::size_t k = 0; k <= n; ++k) times[k] = static_cast<double>(k) / static_cast<double>(n);
  times.back() = 1.0;

  if (family.domain().boundary_distance(path.start()) <= 0.0) {
    throw Error(ErrorKind::OutsideDomain, "continuation path starts outside the domain");
  }
  std::vector<std::vector<cplx>> samples;
  samples.reserve(n + 1);
  samples.push_back(runner.start_values(start));
  check_sample(samples.back(), 0.0, path.start(), tol);
  for (std::size_t k = 1; k <= n; ++k) {
    samples.push_back(runner.advance(samples.back(), times[k - 1], times[k]));
    check_sample(samples.back(), times[k], path.at(times[k]), tol);
  }

  // Bisect every interval whose displacement is not small against the
  // separation, until the anti-crossing bound holds everywhere.
  for (;;) {
    double chordal_sep = std::numeric_limits<double>::infinity();
    double euclid_sep = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
      chordal_sep = std::min(chordal_sep, min_chordal_separation(s));
      euclid_sep = std::min(euclid_sep, min_euclidean_separation(s));
    }
    std::vector<double> new_times;
    std::vector<std::vector<cplx>> new_samples;
    new_times.reserve(times.size());
    new_samples.reserve(samples.size());
    bool refined = false;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      new_times.push_back(times[k]);
      new_samples.push_back(samples[k]);
      double chordal_step = 0.0, euclid_step = 0.0;
      for (std::size_t i = 0; i < samples[k].size(); ++i) {
        chordal_step = std::max(chordal_step, chordal_distance(samples[k][i], samples[k + 1][i]));
        euclid_step = std::max(euclid_step, std::abs(samples[k][i] - samples[k + 1][i]));
      }
      if (chordal_step < 0.25 * chordal_sep && euclid_step < 0.25 * euclid_sep) continue;
      const double mid = 0.5 * (times[k] + times[k + 1]);
      if (times[k + 1] - times[k] < kMinStep) {
        throw Error(ErrorKind::StepUnderflow,
                    "displacement bound unattainable near t = " + std::to_string(times[k]));
      }
      new_times.push_back(mid);
      new_samples.push_back(runner.advance(samples[k], times[k], mid));
      check_sample(new_samples.back(), mid, path.at(mid), tol);
      refined = true;
    }
    new_times.push_back(times.back());
    new_samples.push_back(samples.back());
    times = std::move(new_times);
    samples = std::move(new_samples);
    if (!refined) break;
  }

  StrandTracks tracks;
  tracks.path_ = path;
  tracks.times_ = std::move(times);
  const std::size_t m = samples.front().size();
  tracks.positions_.assign(m, std::vector<cplx>(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k) {
    for (std::size_t i = 0; i < m; ++i) tracks.positions_[i][k] = samples[k][i];
  }
  tracks.min_separation_ = hmotion::min_separation(tracks);
  return tracks;
}

double min_separation(const StrandTracks& tracks) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < tracks.sample_count(); ++k) {
    best = std::min(best, min_chordal_separation(tracks.snapshot(k)));
  }
  return best;
}

int winding_number(const StrandTracks& tracks, std::size_t strand, const SpherePoint& center,
                   const Tolerances& tol) {
  if (strand >= tracks.strand_count()) {
    throw Error(ErrorKind::InvalidArgument, "strand index out of range");
  }
  if (center.is_infinite()) {
    throw Error(ErrorKind::InvalidArgument, "winding number around infinity is undefined");
  }
  const auto track = tracks.strand(strand);
  if (!tracks.closed() || std::abs(track.back() - track.front()) > 1e-8 * (1.0 + std::abs(track.front()))) {
    throw Error(ErrorKind::NotClosed, "winding number of an open track");
  }
  const cplx c = center.value();
  double total = 0.0;
  for (std::size_t k = 0; k < track.size(); ++k) {
    if (chordal_distance(track[k], c) < tol.track) {
      throw Error(ErrorKind::TooClose, "track passes within tolerance of the winding center");
    }
    if (k > 0) total += std::arg((track[k] - c) / (track[k - 1] - c));
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

Configuration eval_along(const MotionFamily& family, const Path& path, const Tolerances& tol) {
  return continue_strands(family, path, tol).final_configuration();
}

}  // namespace hmotion
