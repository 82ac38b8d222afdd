#include "hmotion/braid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "hmotion/error.hpp"

namespace hmotion {

BraidWord::BraidWord(std::size_t strand_count, std::vector<int> letters)
    : strands_(strand_count), letters_(std::move(letters)) {
  if (strand_count == 0) throw Error(ErrorKind::InvalidArgument, "braid on zero strands");
  for (int l : letters_) {
    const std::size_t g = static_cast<std::size_t>(std::abs(l));
    if (l == 0 || g >= strand_count) {
      throw Error(ErrorKind::InvalidArgument,
                  "generator index " + std::to_string(l) + " out of range for " +
                      std::to_string(strand_count) + " strands");
    }
  }
}

BraidWord BraidWord::parse(std::size_t strand_count, std::string_view text) {
  std::vector<int> letters;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    int sign = 1;
    std::string body = token;
    const auto caret = token.find('^');
    if (caret != std::string::npos) {
      const std::string exp = token.substr(caret + 1);
      if (exp != "-1" && exp != "1") {
        throw Error(ErrorKind::InvalidArgument, "bad braid token '" + token + "'");
      }
      sign = exp == "-1" ? -1 : 1;
      body = token.substr(0, caret);
    }
    if (body.size() < 2 || body[0] != 's' ||
        body.find_first_not_of("0123456789", 1) != std::string::npos || body.size() > 6) {
      throw Error(ErrorKind::InvalidArgument, "bad braid token '" + token + "'");
    }
    letters.push_back(sign * std::stoi(body.substr(1)));
  }
  return BraidWord(strand_count, std::move(letters));
}

BraidWord BraidWord::full_twist(std::size_t strand_count) {
  std::vector<int> letters;
  for (std::size_t r = 0; r < strand_count; ++r) {
    for (std::size_t i = 1; i < strand_count; ++i) letters.push_back(static_cast<int>(i));
  }
  return BraidWord(strand_count, std::move(letters));
}

long BraidWord::exponent_sum() const {
  long e = 0;
  for (int l : letters_) e += l > 0 ? 1 : -1;
  return e;
}

BraidWord BraidWord::inverse() const {
  std::vector<int> inv(letters_.rbegin(), letters_.rend());
  for (int& l : inv) l = -l;
  return BraidWord(strands_, std::move(inv));
}

BraidWord BraidWord::free_reduced() const {
  std::vector<int> out;
  for (int l : letters_) {
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return BraidWord(strands_, std::move(out));
}

BraidWord BraidWord::power(int k) const {
  const BraidWord base = k < 0 ? inverse() : *this;
  std::vector<int> letters;
  for (int r = 0; r < std::abs(k); ++r) {
    letters.insert(letters.end(), base.letters_.begin(), base.letters_.end());
  }
  return BraidWord(strands_, std::move(letters));
}

BraidWord operator*(const BraidWord& a, const BraidWord& b) {
  if (a.strands_ != b.strands_) {
    throw Error(ErrorKind::InvalidArgument, "product of braids on different strand counts");
  }
  std::vector<int> letters = a.letters_;
  letters.insert(letters.end(), b.letters_.begin(), b.letters_.end());
  return BraidWord(a.strands_, std::move(letters));
}

std::string BraidWord::to_string() const {
  std::string out;
  for (int l : letters_) {
    if (!out.empty()) out += ' ';
    out += 's' + std::to_string(std::abs(l));
    if (l < 0) out += "^-1";
  }
  return out;
}

DynnikovCoords dynnikov_base(std::size_t strand_count) {
  DynnikovCoords c(2 * strand_count, 0);
  for (std::size_t k = 0; k < strand_count; ++k) c[2 * k + 1] = 1;
  return c;
}

namespace {

using Wide = __int128;

Wide pos(Wide x) { return x > 0 ? x : 0; }
Wide neg(Wide x) { return x < 0 ? x : 0; }

std::int64_t narrow(Wide x) {
  if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min()) {
    throw Error(ErrorKind::InvalidArgument, "Dynnikov coordinate overflow");
  }
  return static_cast<std::int64_t>(x);
}

}  // namespace

void dynnikov_apply(DynnikovCoords& v, int letter) {
  const std::size_t i = static_cast<std::size_t>(std::abs(letter)) - 1;
  if (letter == 0 || 2 * i + 3 >= v.size()) {
    throw Error(ErrorKind::InvalidArgument, "letter out of range for Dynnikov coordinates");
  }
  const Wide a1 = v[2 * i], b1 = v[2 * i + 1], a2 = v[2 * i + 2], b2 = v[2 * i + 3];
  Wide na1, nb1, na2, nb2;
  if (letter > 0) {
    const Wide e = a1 - neg(b1) - a2 + pos(b2);
    na1 = a1 + pos(b1) + pos(pos(b2) - e);
    nb1 = b2 - pos(e);
    na2 = a2 + neg(b2) + neg(neg(b1) + e);
    nb2 = b1 + pos(e);
  } else {
    const Wide f = a1 + neg(b1) - a2 - pos(b2);
    na1 = a1 - pos(b1) - pos(pos(b2) + f);
    nb1 = b2 + neg(f);
    na2 = a2 - neg(b2) - neg(neg(b1) - f);
    nb2 = b1 - neg(f);
  }
  v[2 * i] = narrow(na1);
  v[2 * i + 1] = narrow(nb1);
  v[2 * i + 2] = narrow(na2);
  v[2 * i + 3] = narrow(nb2);
}

DynnikovCoords dynnikov_act(DynnikovCoords coords, const BraidWord& word) {
  for (int l : word.letters()) dynnikov_apply(coords, l);
  return coords;
}

bool is_trivial_braid(const BraidWord& word) {
  const BraidWord w = word.free_reduced();
  if (w.empty()) return true;
  const std::size_t m = w.strand_count();
  const DynnikovCoords base = dynnikov_base(m);
  if (dynnikov_act(base, w) != base) return false;
  // Probe laminations; the base vector already decides, the probes guard
  // the implementation.
  for (std::size_t k = 0; k < m; ++k) {
    DynnikovCoords probe = base;
    probe[2 * k] += static_cast<std::int64_t>(k) + 1;
    probe[2 * k + 1] -= 2;
    if (dynnikov_act(probe, w) != probe) return false;
  }
  return true;
}

bool is_trivial_mapping_class(const MappingClass& cls) {
  const BraidWord& w = cls.word;
  const long m = static_cast<long>(w.strand_count());
  if (m <= 1) return true;
  const long period = m * (m - 1);
  const long e = w.exponent_sum();
  if (e % period != 0) return false;
  const long t = e / period;
  const BraidWord residual = w * BraidWord::full_twist(w.strand_count()).power(static_cast<int>(-t));
  return is_trivial_braid(residual);
}

bool same_mapping_class(const MappingClass& a, const MappingClass& b) {
  return is_trivial_mapping_class(MappingClass{a.word * b.word.inverse()});
}

namespace {

// Projection frame: rotate by -angle, then shear x += a2 y^2 + a3 y^3. The
// shear is isotopic to the identity and breaks symmetric configurations
// (such as z, -z and 0) that stay collinear for every rotation.
struct Frame {
  double angle = 0.0;
  double a2 = 0.0, a3 = 0.0;

  cplx map(cplx z) const {
    const cplx w = z * std::polar(1.0, -angle);
    const double y = w.imag();
    return {w.real() + (a2 + a3 * y) * y * y, y};
  }
};

bool frame_order(std::span<const cplx> points, const Frame& frame, std::vector<std::size_t>& order) {
  std::vector<double> key(points.size());
  double scale = 1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    key[i] = frame.map(points[i]).real();
    scale = std::max(scale, std::abs(points[i]));
  }
  order.resize(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (key[order[k]] - key[order[k - 1]] <= 1e-13 * scale) return false;
  }
  return true;
}

ExtractedBraid extract_in_frame(const StrandTracks& tracks, const Frame& frame) {
  const std::size_t m = tracks.strand_count();
  const std::size_t n = tracks.sample_count();
  ExtractedBraid out{BraidWord(m), frame.angle, {}, {}, {}};
  if (!frame_order(tracks.snapshot(0), frame, out.initial_order)) {
    throw Error(ErrorKind::DegenerateCrossing, "initial configuration has tied projections");
  }
  std::vector<std::size_t> position(m);
  for (std::size_t p = 0; p < m; ++p) position[out.initial_order[p]] = p;
  std::vector<std::size_t> order = out.initial_order;

  double scale = 1.0;
  std::vector<std::vector<cplx>> w(m, std::vector<cplx>(n));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      scale = std::max(scale, std::abs(tracks.position(i, k)));
      w[i][k] = frame.map(tracks.position(i, k));
    }
  }
  const double tie = 1e-13 * scale;

  struct Event {
    double s;
    std::size_t a, b;
  };
  std::vector<int> letters;
  std::vector<Event> events;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    events.clear();
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        const double d0 = w[a][k].real() - w[b][k].real();
        const double d1 = w[a][k + 1].real() - w[b][k + 1].real();
        if (std::abs(d1) <= tie) {
          throw Error(ErrorKind::DegenerateCrossing, "strands tie in projection at a sample");
        }
        if ((d0 < 0) != (d1 < 0)) events.push_back({d0 / (d0 - d1), a, b});
      }
    }
    std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.s < y.s; });
    for (std::size_t e = 0; e < events.size(); ++e) {
      const Event& ev = events[e];
      if (e + 1 < events.size() && events[e + 1].s - ev.s <= 1e-12) {
        const Event& nx = events[e + 1];
        if (nx.a == ev.a || nx.a == ev.b || nx.b == ev.a || nx.b == ev.b) {
          throw Error(ErrorKind::DegenerateCrossing, "simultaneous crossings share a strand");
        }
      }
      const std::size_t pa = position[ev.a], pb = position[ev.b];
      if ((pa > pb ? pa - pb : pb - pa) != 1) {
        throw Error(ErrorKind::DegenerateCrossing, "crossing of non-adjacent strands");
      }
      const std::size_t left = pa < pb ? ev.a : ev.b;
      const std::size_t right = pa < pb ? ev.b : ev.a;
      auto im_at = [&](std::size_t s) { return (w[s][k] + ev.s * (w[s][k + 1] - w[s][k])).imag(); };
      const double gap = im_at(right) - im_at(left);
      if (std::abs(gap) <= tie) {
        throw Error(ErrorKind::DegenerateCrossing, "strands meet at a crossing");
      }
      const int generator = static_cast<int>(std::min(pa, pb)) + 1;
      const int letter = gap > 0 ? generator : -generator;
      letters.push_back(letter);
      const double t = tracks.times()[k] + ev.s * (tracks.times()[k + 1] - tracks.times()[k]);
      out.crossings.push_back({t, left, right, letter});
      std::swap(position[ev.a], position[ev.b]);
      std::swap(order[pa], order[pb]);
    }
  }
  out.final_order = order;
  out.word = BraidWord(m, std::move(letters));
  return out;
}

}  // namespace

bool projection_order(std::span<const cplx> points, double angle, std::vector<std::size_t>& order) {
  return frame_order(points, Frame{angle}, order);
}

ExtractedBraid extract_braid(const StrandTracks& tracks, double angle) {
  return extract_in_frame(tracks, Frame{angle});
}

ExtractedBraid extract_braid_generic(const StrandTracks& tracks, double angle, std::uint64_t seed) {
  try {
    return extract_braid(tracks, angle);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateCrossing) throw;
  }
  const auto first = tracks.snapshot(0);
  const auto last = tracks.snapshot(tracks.sample_count() - 1);
  std::vector<std::size_t> first_ref, last_ref;
  const bool have_first = projection_order(first, angle, first_ref);
  const bool have_last = projection_order(last, angle, last_ref);
  double scale = 1.0;
  for (std::size_t i = 0; i < tracks.strand_count(); ++i) {
    for (const cplx z : tracks.strand(i)) scale = std::max(scale, std::abs(z));
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::size_t> order;
  for (int attempt = 1; attempt <= 64; ++attempt) {
    Frame frame{angle + unit(rng) * 1e-7 * attempt};
    if (attempt > 24) {
      // Rotations alone did not help; shear as well.
      const double size = 1e-6 * (attempt - 24);
      frame.a2 = unit(rng) * size / scale;
      frame.a3 = unit(rng) * size / (scale * scale);
    }
    if (have_first && (!frame_order(first, frame, order) || order != first_ref)) continue;
    if (have_last && (!frame_order(last, frame, order) || order != last_ref)) continue;
    try {
      return extract_in_frame(tracks, frame);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateCrossing) throw;
    }
  }
  throw Error(ErrorKind::DegenerateCrossing, "no generic projection near the requested angle");
}

BraidWord braid_from_tracks(const StrandTracks& tracks, double angle) {
  return extract_braid_generic(tracks, angle).word.free_reduced();
}

double choose_projection_angle(const Configuration& base, std::uint64_t seed) {
  std::vector<std::size_t> order;
  auto gap_ok = [&](double angle, double gap) {
    if (!projection_order(base.points(), angle, order)) return false;
    const cplx rot = std::polar(1.0, -angle);
    for (std::size_t k = 1; k < order.size(); ++k) {
      if ((base[order[k]] * rot).real() - (base[order[k - 1]] * rot).real() < gap) return false;
    }
    return true;
  };
  if (gap_ok(0.0, 1e-9)) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double angle = uniform(rng);
    if (gap_ok(angle, 1e-6)) return angle;
  }
  throw Error(ErrorKind::DegenerateCrossing, "no generic projection for the base configuration");
}

int linking_number(const StrandTracks& tracks, std::size_t i, std::size_t j, double angle) {
  if (i >= tracks.strand_count() || j >= tracks.strand_count() || i == j) {
    throw Error(ErrorKind::InvalidArgument, "linking number needs two distinct strands");
  }
  auto returns = [&](std::size_t s) {
    const auto track = tracks.strand(s);
    return std::abs(track.back() - track.front()) <= 1e-8 * (1.0 + std::abs(track.front()));
  };
  if (!tracks.closed() || !returns(i) || !returns(j)) {
    throw Error(ErrorKind::NotClosed, "linking number of open tracks");
  }
  const ExtractedBraid braid = extract_braid_generic(tracks, angle);
  int signed_count = 0;
  for (const Crossing& c : braid.crossings) {
    if ((c.left == i && c.right == j) || (c.left == j && c.right == i)) {
      signed_count += c.letter > 0 ? 1 : -1;
    }
  }
  return signed_count / 2;
}

bool MonodromyResult::trivial() const {
  return std::all_of(generators.begin(), generators.end(),
                     [](const GeneratorMonodromy& g) { return g.trivial; });
}

MonodromyResult compute_monodromy(const MotionFamily& family, const Tolerances& tol,
                                  const MonodromyOptions& options) {
  MonodromyResult result;
  result.projection_angle = choose_projection_angle(family.base(), options.seed);
  ContinuationOptions copts;
  copts.initial_samples = options.initial_samples;
  const auto& loops = family.domain().generators();
  for (std::size_t g = 0; g < loops.size(); ++g) {
    StrandTracks tracks = continue_strands(family, loops[g], tol, copts);
    ExtractedBraid braid = extract_braid_generic(tracks, result.projection_angle, options.seed + g + 1);
    MappingClass cls{braid.word.free_reduced()};
    const bool trivial = is_trivial_mapping_class(cls);
    result.generators.push_back({std::move(cls), trivial, std::move(tracks), std::move(braid.crossings)});
  }
  return result;
}

std::vector<MappingClass> monodromy(const MotionFamily& family, const Tolerances& tol,
                                    const MonodromyOptions& options) {
  std::vector<MappingClass> classes;
  for (auto& g : compute_monodromy(family, tol, options).generators) {
    classes.push_back(std::move(g.mapping_class));
  }
  return classes;
}

bool is_trivial_monodromy(const MotionFamily& family, const Tolerances& tol,
                          const MonodromyOptions& options) {
  return compute_monodromy(family, tol, options).trivial();
}

}  // namespace hmotion
