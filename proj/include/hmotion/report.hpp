#pragma once

#include <string>

#include <json.hpp>

#include "hmotion/braid.hpp"
#include "hmotion/cover.hpp"
#include "hmotion/extend.hpp"
#include "hmotion/motion.hpp"

namespace hmotion {

using json = nlohmann::json;

inline constexpr const char* kReportVersion = "1.0";

json to_json(cplx z);
json to_json(const Tolerances& tol);
json to_json(const ValidationReport& report);
json to_json(const CoverPoint& point);  // {word, end}
json to_json(const StageReport& stage);

/// Grid export: {grid: {origin, step, shape}, support_center, support_radius,
/// min_separation, samples: [{parameter, parent, image, punctures,
/// jacobian_min, beltrami_sup, strand_error}]}. A nonzero `max_side` keeps
/// every k-th grid point so that at most max_side points per side are written;
/// jacobian_min and beltrami_sup still refer to the full grid.
json grid_to_json(const ContinuousMotionGrid& grid, std::size_t max_side = 0);

/// Strand projections against path time, one polyline per strand, with a
/// marker at every crossing.
std::string braid_svg(const StrandTracks& tracks, const std::vector<Crossing>& crossings,
                      double projection_angle, const std::string& title);

/// Heat map of |mu| over the grid at one sample.
std::string beltrami_svg(const ContinuousMotionGrid& grid, std::size_t sample);

}  // namespace hmotion
