#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hmotion {

// Global tolerance table. Continuation tolerances dominate the point-level
// ones (eq < sep < track), so a configuration that survives continuation is
// always a valid Configuration.
struct Tolerances {
  double eq = 1e-12;             // SpherePoint equality (chordal)
  double sep = 1e-8;             // minimum puncture separation (chordal)
  double det = 1e-12;            // Mobius determinant floor
  double track = 1e-6;           // minimum separation along a track
  double boundary = 1e-3;        // loop clearance from the domain boundary
  double circle_radius = 1e-3;   // circle-mean holomorphy probe radius
  double holomorphy = 1e-6;      // holomorphy residual failure threshold
  double margin_min = 0.05;      // new-strand avoidance margin (chordal)
  double tube = 0.1;             // flow grid scale: default step is at most tube / 5
  double cover = 1e-10;          // endpoint agreement of cover points

  // Throws Error(InvalidArgument) on unknown keys or non-positive values.
  void set(std::string_view key, double value);
  double get(std::string_view key) const;

  std::vector<std::pair<std::string, double>> entries() const;
};

}  // namespace hmotion
