#include "hmotion/extend.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "hmotion/continuation.hpp"
#include "hmotion/cover.hpp"
#include "hmotion/error.hpp"

namespace hmotion {

namespace {

double loop_clearance(const ParameterDomain& domain, const Tolerances& tol) {
  return std::max(tol.boundary, 0.02 * domain.outer_radius());
}

void require_trivial_monodromy(const MotionFamily& family, const Tolerances& tol,
                               std::uint64_t seed, std::size_t samples) {
  const MonodromyResult mono = compute_monodromy(family, tol, {seed, samples});
  for (std::size_t g = 0; g < mono.generators.size(); ++g) {
    if (!mono.generators[g].trivial) {
      throw NontrivialMonodromy(ErrorKind::NontrivialMonodromy, g,
                                mono.generators[g].mapping_class.word.to_string());
    }
  }
}

// ---------------------------------------------------------------------------
// Continuous motion

using Jac = std::array<double, 4>;  // row-major real 2x2

struct Node {
  cplx start;     // position at the start of the step
  cplx velocity;  // zero for punctures that stay put
};

// V(z, t) = chi(|z - c|) * sum_k w_k(z) v_k with w_k proportional to
// |z - p_k(t)|^-2. The weights are a smooth partition of unity that is 1 at
// its own node, so every node moves exactly with its velocity and the fixed
// nodes stay fixed. V is a convex combination of node velocities, which
// bounds the displacement of any point by the fastest strand.
struct FlowField {
  double t0 = 0.0;
  cplx center{0.0};
  double inner = 1.0, outer = 2.0;  // cutoff is 1 inside inner, 0 outside outer
  std::vector<Node> nodes;

  cplx eval(cplx z, double t, Jac* dv) const {
    if (dv) *dv = {0.0, 0.0, 0.0, 0.0};
    const cplx w = z - center;
    const double r = std::abs(w);
    if (r >= outer) return 0.0;

    thread_local std::vector<double> d2;
    thread_local std::vector<cplx> diff;
    d2.resize(nodes.size());
    diff.resize(nodes.size());
    double least = std::numeric_limits<double>::infinity();
    std::size_t nearest = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      diff[k] = z - (nodes[k].start + (t - t0) * nodes[k].velocity);
      d2[k] = std::norm(diff[k]);
      if (d2[k] < least) least = d2[k], nearest = k;
    }
    if (least < 1e-300) return r <= inner ? nodes[nearest].velocity : cutoff(r) * nodes[nearest].velocity;

    // Weights scaled by the smallest squared distance stay in (0, 1].
    double total = 0.0;
    cplx f{0.0};
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double u = least / d2[k];
      total += u;
      f += u * nodes[k].velocity;
    }
    f /= total;

    double chi = 1.0, dchi = 0.0;
    if (r > inner) {
      const double s = (r - inner) / (outer - inner);
      chi = 1.0 - s * s * (3.0 - 2.0 * s);
      dchi = -6.0 * s * (1.0 - s) / (outer - inner);
    }
    if (dv) {
      // d f / dx = sum_k du_k/dx (v_k - f) / S with du_k/dx = -2 u_k^2 x_k.
      double fxx = 0.0, fxy = 0.0, fyx = 0.0, fyy = 0.0;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double u = least / d2[k];
        const double c = -2.0 * u * u / (least * total);
        const cplx dvk = nodes[k].velocity - f;
        fxx += c * diff[k].real() * dvk.real();
        fxy += c * diff[k].imag() * dvk.real();
        fyx += c * diff[k].real() * dvk.imag();
        fyy += c * diff[k].imag() * dvk.imag();
      }
      double gx = 0.0, gy = 0.0;
      if (dchi != 0.0 && r > 0.0) gx = dchi * w.real() / r, gy = dchi * w.imag() / r;
      *dv = {chi * fxx + f.real() * gx, chi * fxy + f.real() * gy,
             chi * fyx + f.imag() * gx, chi * fyy + f.imag() * gy};
    }
    return chi * f;
  }

  double cutoff(double r) const {
    if (r <= inner) return 1.0;
    if (r >= outer) return 0.0;
    const double s = (r - inner) / (outer - inner);
    return 1.0 - s * s * (3.0 - 2.0 * s);
  }
};

Jac mul(const Jac& a, const Jac& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Jac axpy(const Jac& x, double h, const Jac& y) {
  return {x[0] + h * y[0], x[1] + h * y[1], x[2] + h * y[2], x[3] + h * y[3]};
}

double det(const Jac& j) { return j[0] * j[3] - j[1] * j[2]; }

double beltrami_modulus(const Jac& j) {
  const cplx fz(0.5 * (j[0] + j[3]), 0.5 * (j[2] - j[1]));
  const cplx fzb(0.5 * (j[0] - j[3]), 0.5 * (j[2] + j[1]));
  return std::abs(fzb) / std::abs(fz);
}

void rk4(const FlowField& f, double t, double h, cplx& z, Jac* jac) {
  Jac d1, d2, d3, d4;
  const cplx k1 = f.eval(z, t, jac ? &d1 : nullptr);
  const cplx k2 = f.eval(z + 0.5 * h * k1, t + 0.5 * h, jac ? &d2 : nullptr);
  const cplx k3 = f.eval(z + 0.5 * h * k2, t + 0.5 * h, jac ? &d3 : nullptr);
  const cplx k4 = f.eval(z + h * k3, t + h, jac ? &d4 : nullptr);
  if (jac) {
    const Jac& j = *jac;
    const Jac m1 = mul(d1, j);
    const Jac m2 = mul(d2, axpy(j, 0.5 * h, m1));
    const Jac m3 = mul(d3, axpy(j, 0.5 * h, m2));
    const Jac m4 = mul(d4, axpy(j, h, m3));
    for (int q = 0; q < 4; ++q) (*jac)[q] += h / 6.0 * (m1[q] + 2.0 * m2[q] + 2.0 * m3[q] + m4[q]);
  }
  z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double segment_distance(cplx z, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  const double s = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + s * ab));
}

// Minimum over s in [0, 1] of |d0 + s (d1 - d0)|.
double interval_gap(cplx d0, cplx d1) { return segment_distance(0.0, d0, d1); }

bool is_static(const StrandTracks& tracks, std::size_t i) {
  const auto track = tracks.strand(i);
  return std::all_of(track.begin(), track.end(), [&](cplx z) { return z == track.front(); });
}

// Track samples the flow steps through: every `keep` sample plus enough
// others that no strand moves more than `max_move` in one step.
std::vector<std::size_t> flow_schedule(const StrandTracks& tracks, std::span<const std::size_t> keep,
                                       double max_move) {
  const std::size_t m = tracks.strand_count();
  std::vector<std::size_t> out{0};
  std::size_t next_keep = 0;
  for (std::size_t k = 1; k < tracks.sample_count(); ++k) {
    while (next_keep < keep.size() && keep[next_keep] < k) ++next_keep;
    const bool last = k + 1 == tracks.sample_count();
    bool far = false;
    for (std::size_t i = 0; i < m && !far; ++i) {
      far = std::abs(tracks.position(i, k + (last ? 0 : 1)) - tracks.position(i, out.back())) > max_move;
    }
    if (last || far || (next_keep < keep.size() && keep[next_keep] == k)) out.push_back(k);
  }
  return out;
}

struct Support {
  cplx center{0.0};
  double inner = 1.0, outer = 1.5;
  std::vector<cplx> anchors;
};

// Smallest gap between flow nodes over the scheduled steps.
double schedule_gap(const StrandTracks& tracks, std::span<const std::size_t> schedule,
                    const Support& support) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t m = tracks.strand_count();
  for (std::size_t s = 0; s + 1 < schedule.size(); ++s) {
    const std::size_t a = schedule[s], b = schedule[s + 1];
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        best = std::min(best, interval_gap(tracks.position(i, a) - tracks.position(j, a),
                                           tracks.position(i, b) - tracks.position(j, b)));
      }
      for (const cplx q : support.anchors) {
        best = std::min(best, segment_distance(q, tracks.position(i, a), tracks.position(i, b)));
      }
    }
  }
  return best;
}

struct FlowState {
  std::vector<cplx> z;
  std::vector<Jac> jac;
  std::vector<cplx> marks;
};

// Flow of the grid and the marked base punctures through the scheduled
// samples of one tree branch. `visit(sample_index, state)` runs after every
// step.
template <class Visit>
void integrate_branch(const StrandTracks& tracks, std::span<const std::size_t> schedule,
                      const Support& support, const GridSpec& grid, const Configuration& base,
                      Visit&& visit) {
  FlowState state;
  state.z.resize(grid.size());
  state.jac.assign(grid.size(), Jac{1.0, 0.0, 0.0, 1.0});
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const std::size_t p = j * grid.nx + i;
      state.z[p] = grid.point(i, j);
      // The complement of the support disk is invariant.
      if (std::abs(state.z[p] - support.center) < support.outer) active.push_back(p);
    }
  }
  state.marks.assign(base.points().begin(), base.points().end());

  const std::size_t m = tracks.strand_count();
  FlowField field;
  field.center = support.center;
  field.inner = support.inner;
  field.outer = support.outer;
  std::vector<cplx> z(active.size());
  std::vector<Jac> jac(active.size());
  for (std::size_t s = 0; s + 1 < schedule.size(); ++s) {
    const std::size_t a = schedule[s], b = schedule[s + 1];
    const double t0 = tracks.times()[a], t1 = tracks.times()[b];
    field.t0 = t0;
    field.nodes.clear();
    bool moving = false;
    for (std::size_t i = 0; i < m; ++i) {
      const cplx p = tracks.position(i, a), q = tracks.position(i, b);
      field.nodes.push_back({p, (q - p) / (t1 - t0)});
      moving = moving || p != q;
    }
    for (const cplx q : support.anchors) field.nodes.push_back({q, 0.0});
    if (moving) {
      std::size_t substeps = 1;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 10) {
          throw Error(ErrorKind::FlowBlowup, "flow Jacobian lost positivity at t = " + std::to_string(t0));
        }
        bool ok = true;
        const double h = (t1 - t0) / static_cast<double>(substeps);
        for (std::size_t q = 0; q < active.size() && ok; ++q) {
          z[q] = state.z[active[q]];
          jac[q] = state.jac[active[q]];
          for (std::size_t k = 0; k < substeps; ++k) rk4(field, t0 + h * static_cast<double>(k), h, z[q], &jac[q]);
          ok = std::isfinite(z[q].real()) && std::isfinite(z[q].imag()) && det(jac[q]) > 0.0;
        }
        if (!ok) {
          substeps *= 2;
          continue;
        }
        for (std::size_t q = 0; q < active.size(); ++q) {
          state.z[active[q]] = z[q];
          state.jac[active[q]] = jac[q];
        }
        for (cplx& mark : state.marks) {
          for (std::size_t k = 0; k < substeps; ++k) rk4(field, t0 + h * static_cast<double>(k), h, mark, nullptr);
        }
        break;
      }
    }
    visit(b, state);
  }
}

double cell_jacobian_min(const std::vector<cplx>& image, const GridSpec& grid) {
  double best = std::numeric_limits<double>::infinity();
  const double ref = grid.step * grid.step;
  auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
  for (std::size_t j = 0; j + 1 < grid.ny; ++j) {
    for (std::size_t i = 0; i + 1 < grid.nx; ++i) {
      const cplx a = image[j * grid.nx + i], b = image[j * grid.nx + i + 1];
      const cplx c = image[(j + 1) * grid.nx + i + 1], d = image[(j + 1) * grid.nx + i];
      best = std::min(best, cross(b - a, c - a) / ref);
      best = std::min(best, cross(c - a, d - a) / ref);
    }
  }
  return best;
}

GridSample make_sample(const FlowState& state, const StrandTracks& tracks, std::size_t index,
                       const GridSpec& grid, long parent) {
  GridSample s;
  s.parameter = tracks.parameter(index);
  s.parent = parent;
  s.image = state.z;
  s.beltrami.resize(state.jac.size());
  for (std::size_t p = 0; p < state.jac.size(); ++p) {
    const double mu = beltrami_modulus(state.jac[p]);
    s.beltrami[p] = static_cast<float>(mu);
    s.beltrami_sup = std::max(s.beltrami_sup, mu);
  }
  s.punctures = state.marks;
  s.jacobian_min = cell_jacobian_min(state.z, grid);
  for (std::size_t i = 0; i < state.marks.size(); ++i) {
    s.strand_error = std::max(s.strand_error, chordal_distance(state.marks[i], tracks.position(i, index)));
  }
  return s;
}

std::size_t sample_index_at(const StrandTracks& tracks, double time) {
  const auto& times = tracks.times();
  const auto it = std::lower_bound(times.begin(), times.end(), time);
  if (it == times.end() || *it != time) {
    throw Error(ErrorKind::InvalidArgument, "tree node time is not a track sample");
  }
  return static_cast<std::size_t>(it - times.begin());
}

std::vector<std::size_t> node_indices(const StrandTracks& tracks, std::size_t nodes) {
  std::vector<std::size_t> out;
  for (std::size_t q = 1; q <= nodes; ++q) {
    out.push_back(sample_index_at(tracks, static_cast<double>(q) / static_cast<double>(nodes)));
  }
  return out;
}

struct BranchResult {
  std::vector<GridSample> nodes;  // parent indices relative to the branch, -1 = root
  double gap = 0.0;               // node separation over the flow schedule
};

// Tree nodes of one branch at equal path time; the spacing halves until
// beltrami_sup changes by less than 0.1 between neighbours.
BranchResult run_branch(const StrandTracks& tracks, const Support& support, double max_move,
                                   const GridSpec& grid, const Configuration& base, std::size_t coarse,
                                   double max_edge) {
  std::size_t nodes = 1;
  while (nodes < coarse && tracks.path().length() / static_cast<double>(nodes) > max_edge) nodes *= 2;
  for (;;) {
    const std::vector<std::size_t> keep = node_indices(tracks, nodes);
    const std::vector<std::size_t> schedule = flow_schedule(tracks, keep, max_move);
    BranchResult res;
    res.gap = schedule_gap(tracks, schedule, support);
    auto& out = res.nodes;
    std::size_t next = 0;
    integrate_branch(tracks, schedule, support, grid, base, [&](std::size_t index, const FlowState& state) {
      if (next < keep.size() && index == keep[next]) {
        out.push_back(make_sample(state, tracks, index, grid, static_cast<long>(out.size()) - 1));
        ++next;
      }
    });
    bool smooth = std::abs(out.front().beltrami_sup) < 0.1;
    for (std::size_t q = 1; q < out.size(); ++q) {
      smooth = smooth && std::abs(out[q].beltrami_sup - out[q - 1].beltrami_sup) < 0.1;
    }
    if (smooth || nodes >= coarse) return res;
    nodes *= 2;
  }
}

}  // namespace

double ContinuousMotionGrid::max_strand_error() const {
  double v = 0.0;
  for (const auto& s : samples) v = std::max(v, s.strand_error);
  return v;
}

double ContinuousMotionGrid::min_jacobian() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) v = std::min(v, s.jacobian_min);
  return v;
}

double ContinuousMotionGrid::max_beltrami() const {
  double v = 0.0;
  for (const auto& s : samples) v = std::max(v, s.beltrami_sup);
  return v;
}

double ContinuousMotionGrid::max_beltrami_jump() const {
  double v = 0.0;
  for (const auto& s : samples) {
    if (s.parent >= 0) {
      v = std::max(v, std::abs(s.beltrami_sup - samples[static_cast<std::size_t>(s.parent)].beltrami_sup));
    }
  }
  return v;
}

ContinuousMotionGrid build_continuous_motion(const MotionFamily& family, const Tolerances& tol,
                                             const ContinuousMotionOptions& options) {
  require_trivial_monodromy(family, tol, options.seed, options.initial_samples);
  const std::size_t coarse = options.initial_samples;
  if (coarse == 0 || (coarse & (coarse - 1)) != 0) {
    throw Error(ErrorKind::InvalidArgument, "initial sample count must be a power of two");
  }

  const ParameterDomain& domain = family.domain();
  const double clearance = loop_clearance(domain, tol);
  const std::vector<cplx> targets = domain.sample_points(options.branch_count, 2.0 * clearance);
  ContinuationOptions copts;
  copts.initial_samples = coarse;
  std::vector<StrandTracks> branches;
  for (const cplx target : targets) {
    branches.push_back(continue_strands(family, domain.route(target, clearance), tol, copts));
  }

  // Support: a disk around the moving tracks, with a ring of fixed anchors
  // between the moving strands and the cutoff.
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
  std::vector<cplx> fixed_points;
  for (const auto& b : branches) {
    for (std::size_t i = 0; i < b.strand_count(); ++i) {
      if (is_static(b, i)) {
        fixed_points.push_back(b.position(i, 0));
        continue;
      }
      for (const cplx z : b.strand(i)) {
        lo_x = std::min(lo_x, z.real());
        hi_x = std::max(hi_x, z.real());
        lo_y = std::min(lo_y, z.imag());
        hi_y = std::max(hi_y, z.imag());
      }
    }
  }
  Support support;
  double moving_radius = 0.0;
  if (lo_x <= hi_x) {
    support.center = cplx(0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y));
    moving_radius = 0.5 * std::hypot(hi_x - lo_x, hi_y - lo_y);
  } else {
    support.center = 0.5;
  }
  support.inner = 2.0 * moving_radius + 1.0;
  support.outer = 2.0 * moving_radius + 1.5;
  const double ring = 1.75 * moving_radius + 0.75;
  for (int k = 0; k < 24; ++k) {
    const cplx q = support.center + std::polar(ring, 2.0 * std::numbers::pi * k / 24.0);
    if (std::all_of(fixed_points.begin(), fixed_points.end(), [&](cplx p) { return std::abs(p - q) > 0.25; })) {
      support.anchors.push_back(q);
    }
  }

  double track_gap = std::numeric_limits<double>::infinity();
  for (const auto& b : branches) {
    std::vector<std::size_t> all(b.sample_count());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    track_gap = std::min(track_gap, schedule_gap(b, all, support));
  }
  if (branches.empty()) track_gap = min_chordal_separation(family.base().points());
  const double max_move = track_gap / 8.0;

  ContinuousMotionGrid out;
  out.support_center = support.center;
  out.support_radius = support.outer;
  if (options.grid) {
    out.grid = *options.grid;
  } else {
    // Step at most tube / 5 and an eighth of the gap, coarsened to keep the
    // grid below 150 x 150 points.
    const double side = 2.0 * support.outer;
    out.grid.step = std::max(std::min(0.2 * tol.tube, track_gap / 8.0), side / 149.0);
    const std::size_t n = static_cast<std::size_t>(std::ceil(side / out.grid.step)) + 1;
    const double half = 0.5 * out.grid.step * static_cast<double>(n - 1);
    out.grid.origin = support.center - cplx(half, half);
    out.grid.nx = out.grid.ny = n;
  }

  out.min_separation = track_gap;
  if (track_gap < 4.0 * out.grid.step || out.grid.size() > 4'000'000) {
    throw Error(ErrorKind::TubeCollapse,
                "track separation " + std::to_string(track_gap) + " below four grid steps");
  }

  GridSample root;
  root.parameter = domain.basepoint();
  root.image.resize(out.grid.size());
  for (std::size_t j = 0; j < out.grid.ny; ++j) {
    for (std::size_t i = 0; i < out.grid.nx; ++i) root.image[j * out.grid.nx + i] = out.grid.point(i, j);
  }
  root.beltrami.assign(out.grid.size(), 0.0f);
  root.punctures.assign(family.base().points().begin(), family.base().points().end());
  root.jacobian_min = cell_jacobian_min(root.image, out.grid);
  out.samples.push_back(std::move(root));

  // Branches share only the root, so they integrate concurrently, a few at a
  // time to bound memory; results are merged in branch order.
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<BranchResult> results;
  for (std::size_t first = 0; first < branches.size(); first += workers) {
    std::vector<std::future<BranchResult>> jobs;
    for (std::size_t k = first; k < std::min(branches.size(), first + workers); ++k) {
      jobs.push_back(std::async(std::launch::async, [&, k] {
        return run_branch(branches[k], support, max_move, out.grid, family.base(), coarse, options.max_edge);
      }));
    }
    for (auto& job : jobs) results.push_back(job.get());
  }
  for (BranchResult& r : results) {
    out.min_separation = std::min(out.min_separation, r.gap);
    std::vector<GridSample>& nodes = r.nodes;
    const long offset = static_cast<long>(out.samples.size());
    for (auto& node : nodes) {
      node.parent = node.parent < 0 ? 0 : node.parent + offset;
      out.samples.push_back(std::move(node));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// New strand

double strand_margin(const StrandSpec& strand, std::span<const cplx> parameters,
                     std::span<const std::vector<cplx>> configurations) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    const cplx h = strand.eval(parameters[k]);
    best = std::min(best, chordal_to_infinity(h));
    for (const cplx p : configurations[k]) best = std::min(best, chordal_distance(h, p));
  }
  return best;
}

namespace {

struct AvoidanceSet {
  std::vector<cplx> parameters;
  std::vector<std::vector<cplx>> configurations;
};

AvoidanceSet avoidance_set(const MotionFamily& family, const Tolerances& tol, std::size_t count) {
  const ParameterDomain& domain = family.domain();
  const double clearance = loop_clearance(domain, tol);
  AvoidanceSet set;
  for (const cplx lambda : domain.sample_points(count, clearance)) {
    set.parameters.push_back(lambda);
    if (family.has_algebraic_strands()) {
      const Configuration c = eval_along(family, domain.route(lambda, clearance), tol);
      set.configurations.emplace_back(c.points().begin(), c.points().end());
    } else {
      const Configuration c = eval_motion(family, lambda, tol);
      set.configurations.emplace_back(c.points().begin(), c.points().end());
    }
  }
  for (const Path& loop : domain.generators()) {
    const StrandTracks tracks = continue_strands(family, loop, tol);
    const std::size_t stride = std::max<std::size_t>(1, tracks.sample_count() / 256);
    for (std::size_t k = 0; k < tracks.sample_count(); k += stride) {
      set.parameters.push_back(tracks.parameter(k));
      set.configurations.push_back(tracks.snapshot(k));
    }
  }
  return set;
}

struct AnsatzObjective {
  const AvoidanceSet* set;
  cplx zeta;
  int degree;
  double margin_min;
  std::vector<std::vector<cplx>> powers;  // powers[k][s] = w_s^(s+1)

  double operator()(const double* x, std::vector<double>& scratch) const {
    constexpr double beta = 40.0, kappa = 100.0;
    scratch.clear();
    for (std::size_t s = 0; s < set->parameters.size(); ++s) {
      cplx h = zeta;
      for (int k = 0; k < degree; ++k) h += cplx(x[2 * k], x[2 * k + 1]) * powers[s][static_cast<std::size_t>(k)];
      if (!std::isfinite(h.real()) || !std::isfinite(h.imag())) return 1e6;
      scratch.push_back(chordal_to_infinity(h));
      for (const cplx p : set->configurations[s]) scratch.push_back(chordal_distance(h, p));
    }
    const double dmin = *std::min_element(scratch.begin(), scratch.end());
    double sum = 0.0, penalty = 0.0;
    for (const double d : scratch) {
      sum += std::exp(-beta * (d - dmin));
      const double x_pen = kappa * (margin_min - d);
      penalty += (x_pen > 30.0 ? x_pen : std::log1p(std::exp(x_pen))) / kappa;
    }
    const double softmin = dmin - std::log(sum) / beta;
    return -softmin + penalty;
  }
};

struct GslContext {
  const AnsatzObjective* objective;
  std::vector<double> scratch;
};

double gsl_objective(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<GslContext*>(params);
  return (*ctx->objective)(gsl_vector_const_ptr(v, 0), ctx->scratch);
}

std::vector<double> minimize(const AnsatzObjective& objective, std::vector<double> start,
                             std::size_t max_iterations) {
  const std::size_t n = start.size();
  GslContext ctx{&objective, {}};
  gsl_multimin_function fn{&gsl_objective, n, &ctx};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t q = 0; q < n; ++q) gsl_vector_set(x, q, start[q]);
  gsl_vector_set_all(step, 0.1);
  gsl_multimin_fminimizer* solver = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(solver, &fn, x, step);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(solver) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), 1e-9) == GSL_SUCCESS) break;
  }
  std::vector<double> best(n);
  for (std::size_t q = 0; q < n; ++q) best[q] = gsl_vector_get(solver->x, q);
  gsl_multimin_fminimizer_free(solver);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return best;
}

StrandSpec ansatz_strand(cplx zeta, cplx x0, double scale, const std::vector<cplx>& coefficients) {
  Expr h = Expr::constant(zeta);
  const Expr w = (Expr::parameter() - Expr::constant(x0)) / Expr::constant(scale);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (coefficients[k] == cplx(0.0)) continue;
    h = h + Expr::constant(coefficients[k]) * w.pow(static_cast<int>(k) + 1);
  }
  return StrandSpec::closed_form(h);
}

double circle_mean_residual(const StrandSpec& strand, const ParameterDomain& domain,
                            const Tolerances& tol) {
  double worst = 0.0;
  for (const cplx lambda : domain.sample_points(16, 4.0 * tol.boundary)) {
    const double r = std::min(tol.circle_radius, domain.boundary_distance(lambda) / 4.0);
    cplx mean{0.0};
    for (int k = 0; k < 32; ++k) {
      mean += strand.eval(lambda + std::polar(r, 2.0 * std::numbers::pi * k / 32.0));
    }
    worst = std::max(worst, std::abs(mean / 32.0 - strand.eval(lambda)));
  }
  return worst;
}

void check_new_point(const MotionFamily& family, cplx zeta, const Tolerances& tol) {
  if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag())) {
    throw Error(ErrorKind::InvalidNewPoint, "new point must be finite");
  }
  for (std::size_t i = 0; i < family.base().size(); ++i) {
    if (chordal_distance(zeta, family.base()[i]) <= tol.sep) {
      throw Error(ErrorKind::InvalidNewPoint,
                  "new point coincides with base puncture " + std::to_string(i));
    }
  }
}

}  // namespace

NewStrand solve_new_strand(const MotionFamily& family, cplx zeta, int degree, const Tolerances& tol,
                           const NewStrandOptions& options) {
  check_new_point(family, zeta, tol);
  if (degree < 0) throw Error(ErrorKind::InvalidArgument, "ansatz degree must be non-negative");
  require_trivial_monodromy(family, tol, options.seed, 256);

  const ParameterDomain& domain = family.domain();
  const cplx x0 = domain.basepoint();
  const double scale = domain.outer_radius();
  const AvoidanceSet set = avoidance_set(family, tol, options.validation_samples);

  AnsatzObjective objective{&set, zeta, degree, tol.margin_min, {}};
  for (const cplx lambda : set.parameters) {
    std::vector<cplx> p(static_cast<std::size_t>(degree));
    cplx w = (lambda - x0) / scale, acc = 1.0;
    for (auto& entry : p) entry = acc *= w;
    objective.powers.push_back(std::move(p));
  }

  struct Candidate {
    std::vector<cplx> coefficients;
    double margin;
  };
  auto evaluate = [&](const std::vector<double>& x) {
    std::vector<cplx> c(static_cast<std::size_t>(degree));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = cplx(x[2 * k], x[2 * k + 1]);
    return Candidate{c, strand_margin(ansatz_strand(zeta, x0, scale, c), set.parameters, set.configurations)};
  };

  const std::size_t dim = 2 * static_cast<std::size_t>(degree);
  double best_margin = -1.0;
  for (int round = 0; round < 2; ++round) {
    std::vector<std::future<Candidate>> jobs;
    for (std::size_t s = 0; s < std::max<std::size_t>(1, options.starts); ++s) {
      std::vector<double> start(dim, 0.0);
      if (s > 0 || round > 0) {
        std::mt19937_64 rng(options.seed * 1000003ULL + static_cast<std::uint64_t>(round) * 7919ULL + s);
        std::normal_distribution<double> normal(0.0, 0.25);
        for (double& v : start) v = normal(rng);
      }
      jobs.push_back(std::async(std::launch::async, [&, start] {
        return dim == 0 ? evaluate(start) : evaluate(minimize(objective, start, options.max_evaluations));
      }));
    }
    std::vector<Candidate> candidates;
    if (round == 0) candidates.push_back(evaluate(std::vector<double>(dim, 0.0)));  // constant strand
    for (auto& job : jobs) candidates.push_back(job.get());
    // Best margin first; the constant strand wins ties.
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return a.margin > b.margin + 1e-9;
    });
    for (const Candidate& c : candidates) {
      best_margin = std::max(best_margin, c.margin);
      if (c.margin < tol.margin_min) break;
      const StrandSpec strand = ansatz_strand(zeta, x0, scale, c.coefficients);
      const MotionFamily extended = family.with_strand(strand, zeta, tol);
      if (!is_trivial_monodromy(extended, tol, {options.seed, 256})) continue;
      return NewStrand{strand, degree, c.margin, circle_mean_residual(strand, domain, tol), c.coefficients};
    }
    if (best_margin < tol.margin_min) throw NoStrandFound(degree, best_margin);
  }
  throw Error(ErrorKind::NontrivialExtendedMonodromy,
              "every candidate strand of degree " + std::to_string(degree) +
                  " has nontrivial extended monodromy");
}

// ---------------------------------------------------------------------------
// Fixed point

namespace {

double sup_distance(std::span<const cplx> a, std::span<const cplx> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

// Stops when the a-posteriori bound q / (1 - q) * |g_{k+1} - g_k| on the
// distance to the fixed point drops below the tolerance, with the
// contraction factor q estimated from consecutive increments.
FixedPointResult iterate_once(const FixedPointProblem& problem, std::span<const cplx> initial) {
  FixedPointResult out;
  std::vector<cplx> g(initial.begin(), initial.end());
  for (int it = 1; it <= problem.max_iterations; ++it) {
    std::vector<cplx> next = problem.op(g);
    if (next.size() != g.size()) {
      throw Error(ErrorKind::InvalidArgument, "operator changed the grid size");
    }
    for (cplx& v : next) v += problem.target;
    const double step = sup_distance(next, g);
    if (!std::isfinite(step)) throw Diverged(it);
    g = std::move(next);
    const double q = out.increments.empty() || out.increments.back() == 0.0 ? 1.0 : step / out.increments.back();
    out.increments.push_back(step);
    if (step == 0.0 || (q < 1.0 && step < problem.tolerance && q / (1.0 - q) * step < problem.tolerance)) {
      out.values = std::move(g);
      // An unchanged iterate only confirms the previous one.
      out.iterations = step == 0.0 ? it - 1 : it;
      out.residual = step;
      return out;
    }
  }
  throw Diverged(problem.max_iterations);
}

}  // namespace

FixedPointResult fixed_point_iterate(const FixedPointProblem& problem, std::span<const cplx> initial,
                                     bool probe_uniqueness) {
  if (!problem.op) throw Error(ErrorKind::InvalidArgument, "fixed-point operator missing");
  FixedPointResult out = iterate_once(problem, initial);
  if (!probe_uniqueness) return out;
  const std::vector<cplx> zero(initial.size(), cplx(0.0));
  const std::vector<cplx> shifted(initial.size(), problem.target + cplx(1.0, 1.0));
  for (const auto* start : {&zero, &shifted}) {
    const FixedPointResult other = iterate_once(problem, *start);
    out.uniqueness_spread = std::max(out.uniqueness_spread, sup_distance(out.values, other.values));
  }
  out.unique = out.uniqueness_spread <= 10.0 * problem.tolerance;
  return out;
}

// ---------------------------------------------------------------------------
// Inductive driver

namespace {

bool forgetful_compatible(const MotionFamily& previous, const MotionFamily& extended,
                          const Tolerances& tol, std::size_t probes, std::uint64_t seed) {
  const ParameterDomain& domain = extended.domain();
  LiftOptions lift;
  lift.seed = seed;
  lift.projection_angle = choose_projection_angle(extended.base(), seed);
  std::vector<Path> paths = domain.generators();
  const double clearance = loop_clearance(domain, tol);
  for (const cplx lambda : domain.sample_points(probes, 2.0 * clearance)) {
    paths.push_back(domain.route(lambda, clearance));
  }
  for (const Path& path : paths) {
    const CoverPoint upper = forgetful(lift_path(extended, path, tol, lift));
    const CoverPoint lower = lift_path(previous, path, tol, lift);
    if (!same_cover_point(upper, lower, tol) || !(upper.word == lower.word)) return false;
  }
  return true;
}

}  // namespace

InductiveExtension extend_motion_inductive(const MotionFamily& family, std::span<const cplx> new_points,
                                           std::span<const int> degree_schedule, const Tolerances& tol,
                                           const InductiveOptions& options) {
  InductiveExtension out{family, {}};
  if (new_points.empty()) return out;
  if (degree_schedule.empty()) throw Error(ErrorKind::InvalidArgument, "empty degree schedule");
  require_trivial_monodromy(family, tol, options.solver.seed, 256);

  for (std::size_t stage = 0; stage < new_points.size(); ++stage) {
    const cplx zeta = new_points[stage];
    std::optional<NewStrand> found;
    try {
      for (std::size_t d = 0; d < degree_schedule.size() && !found; ++d) {
        try {
          found = solve_new_strand(out.family, zeta, degree_schedule[d], tol, options.solver);
        } catch (const NoStrandFound&) {
          if (d + 1 == degree_schedule.size()) throw;
        }
      }
    } catch (const Error& e) {
      throw StageFailure(stage, e.kind(), e.what());
    }

    StageReport report;
    report.point = zeta;
    report.degree = found->degree;
    report.margin = found->margin;
    report.holomorphy_residual = found->holomorphy_residual;
    report.strand = found->strand.describe();

    MotionFamily extended = out.family.with_strand(found->strand, zeta, tol);
    const ValidationReport validation = check_motion(extended, options.validation_budget, tol);
    report.validated = validation.passed;
    if (!validation.passed) {
      throw StageFailure(stage, ErrorKind::ValidationFailure,
                         validation.failed_axiom + ": " + validation.failure_detail);
    }
    report.monodromy_trivial = is_trivial_monodromy(extended, tol, {options.solver.seed, 256});
    if (!report.monodromy_trivial) {
      throw StageFailure(stage, ErrorKind::NontrivialExtendedMonodromy, "extended monodromy is nontrivial");
    }
    report.forgetful_compatible =
        forgetful_compatible(out.family, extended, tol, options.forgetful_probes, options.solver.seed);
    if (!report.forgetful_compatible) {
      throw StageFailure(stage, ErrorKind::ValidationFailure, "forgetful map disagrees with the previous stage");
    }
    out.family = std::move(extended);
    out.stages.push_back(std::move(report));
  }
  return out;
}

}  // namespace hmotion
