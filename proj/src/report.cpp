#include "hmotion/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hmotion/continuation.hpp"

namespace hmotion {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const Tolerances& tol) {
  json out = json::object();
  for (const auto& [key, value] : tol.entries()) out[key] = value;
  return out;
}

json to_json(const ValidationReport& r) {
  json out{{"passed", r.passed},
           {"basepoint_residual", r.basepoint_residual},
           {"injectivity_margin", r.injectivity_margin},
           {"holomorphy_residual", r.holomorphy_residual},
           {"parameter_samples", r.parameter_samples},
           {"loop_samples", r.loop_samples},
           {"holomorphy_samples", r.holomorphy_samples},
           {"circle_radius", r.circle_radius},
           {"sampling", r.sampling}};
  if (!r.passed) {
    out["failed_axiom"] = r.failed_axiom;
    out["witness"] = to_json(r.witness);
    out["failure_detail"] = r.failure_detail;
  }
  return out;
}

json to_json(const CoverPoint& p) {
  json end = json::array();
  for (const cplx z : p.end.points()) end.push_back(to_json(z));
  return json{{"word", p.word.to_string()}, {"end", end}};
}

json to_json(const StageReport& s) {
  return json{{"point", to_json(s.point)},
              {"degree", s.degree},
              {"margin", s.margin},
              {"holomorphy_residual", s.holomorphy_residual},
              {"validated", s.validated},
              {"monodromy_trivial", s.monodromy_trivial},
              {"forgetful_compatible", s.forgetful_compatible},
              {"strand", s.strand}};
}

json grid_to_json(const ContinuousMotionGrid& grid, std::size_t max_side) {
  const GridSpec& g = grid.grid;
  std::size_t stride = 1;
  if (max_side > 1) {
    const std::size_t side = std::max(g.nx, g.ny);
    stride = std::max<std::size_t>(1, (side - 1 + max_side - 2) / (max_side - 1));
  }
  const std::size_t nx = g.nx == 0 ? 0 : (g.nx - 1) / stride + 1;
  const std::size_t ny = g.ny == 0 ? 0 : (g.ny - 1) / stride + 1;
  json samples = json::array();
  for (const GridSample& s : grid.samples) {
    json image = json::array();
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) image.push_back(to_json(s.image[j * stride * g.nx + i * stride]));
    }
    json punctures = json::array();
    for (const cplx z : s.punctures) punctures.push_back(to_json(z));
    samples.push_back(json{{"parameter", to_json(s.parameter)},
                           {"parent", s.parent},
                           {"image", std::move(image)},
                           {"punctures", std::move(punctures)},
                           {"jacobian_min", s.jacobian_min},
                           {"beltrami_sup", s.beltrami_sup},
                           {"strand_error", s.strand_error}});
  }
  return json{{"grid",
               {{"origin", to_json(g.origin)},
                {"step", g.step * static_cast<double>(stride)},
                {"shape", json::array({nx, ny})}}},
              {"support_center", to_json(grid.support_center)}, {"support_radius", grid.support_radius},
              {"min_separation", grid.min_separation},
              {"samples", std::move(samples)}};
}

std::string braid_svg(const StrandTracks& tracks, const std::vector<Crossing>& crossings,
                      double projection_angle, const std::string& title) {
  const double width = 640, height = 360, pad = 40;
  const cplx rot = std::polar(1.0, -projection_angle);
  double lo = 0.0, hi = 1.0;
  for (std::size_t i = 0; i < tracks.strand_count(); ++i) {
    for (const cplx z : tracks.strand(i)) {
      lo = std::min(lo, (z * rot).real());
      hi = std::max(hi, (z * rot).real());
    }
  }
  const double span = std::max(hi - lo, 1e-9);
  auto x_of = [&](double t) { return pad + t * (width - 2 * pad); };
  auto y_of = [&](double v) { return height - pad - (v - lo) / span * (height - 2 * pad); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
                    fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(pad) + "\" y=\"20\" font-family=\"monospace\" font-size=\"13\">" + title + "</text>\n";
  svg += "<line x1=\"" + fmt(pad) + "\" y1=\"" + fmt(height - pad) + "\" x2=\"" + fmt(width - pad) + "\" y2=\"" +
         fmt(height - pad) + "\" stroke=\"#888\"/>\n";
  for (std::size_t i = 0; i < tracks.strand_count(); ++i) {
    svg += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + std::string(kPalette[i % 10]) + "\" points=\"";
    const std::size_t stride = std::max<std::size_t>(1, tracks.sample_count() / 512);
    for (std::size_t k = 0; k < tracks.sample_count(); k += stride) {
      svg += fmt(x_of(tracks.times()[k])) + "," + fmt(y_of((tracks.position(i, k) * rot).real())) + " ";
    }
    const std::size_t last = tracks.sample_count() - 1;
    svg += fmt(x_of(tracks.times()[last])) + "," + fmt(y_of((tracks.position(i, last) * rot).real()));
    svg += "\"/>\n";
  }
  for (const Crossing& c : crossings) {
    // Locate the crossing height on the left strand's track.
    const auto& times = tracks.times();
    const std::size_t k = static_cast<std::size_t>(
        std::clamp<long>(std::upper_bound(times.begin(), times.end(), c.time) - times.begin() - 1, 0,
                         static_cast<long>(times.size()) - 2));
    const double s = (c.time - times[k]) / (times[k + 1] - times[k]);
    const cplx z = tracks.position(c.left, k) + s * (tracks.position(c.left, k + 1) - tracks.position(c.left, k));
    svg += "<circle cx=\"" + fmt(x_of(c.time)) + "\" cy=\"" + fmt(y_of((z * rot).real())) + "\" r=\"4\" fill=\"" +
           (c.letter > 0 ? "black" : "none") + "\" stroke=\"black\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string beltrami_svg(const ContinuousMotionGrid& grid, std::size_t sample) {
  const GridSample& s = grid.samples.at(sample);
  const double cell = std::max(2.0, std::min(8.0, 640.0 / static_cast<double>(std::max(grid.grid.nx, grid.grid.ny))));
  const double width = cell * static_cast<double>(grid.grid.nx);
  const double height = cell * static_cast<double>(grid.grid.ny) + 24;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
                    fmt(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"4\" y=\"16\" font-family=\"monospace\" font-size=\"12\">|mu| sup " + fmt(s.beltrami_sup) +
         " at parameter " + fmt(s.parameter.real()) + (s.parameter.imag() < 0 ? "" : "+") +
         fmt(s.parameter.imag()) + "i</text>\n";
  for (std::size_t j = 0; j < grid.grid.ny; ++j) {
    for (std::size_t i = 0; i < grid.grid.nx; ++i) {
      const double mu = s.beltrami[j * grid.grid.nx + i];
      if (mu < 1e-6) continue;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - std::min(1.0, mu))));
      char color[16];
      std::snprintf(color, sizeof color, "#ff%02x%02x", shade, shade);
      svg += "<rect x=\"" + fmt(cell * static_cast<double>(i)) + "\" y=\"" +
             fmt(24 + cell * static_cast<double>(grid.grid.ny - 1 - j)) + "\" width=\"" + fmt(cell) +
             "\" height=\"" + fmt(cell) + "\" fill=\"" + color + "\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace hmotion
