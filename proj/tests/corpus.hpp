#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hmotion/motion.hpp"

#ifndef HMOTION_MOTIONS_DIR
#error "HMOTION_MOTIONS_DIR must point at the motions/ directory"
#endif

namespace corpus {

using hmotion::cplx;
using hmotion::Expr;
using hmotion::MotionFamily;
using hmotion::ParameterDomain;

inline std::string motion_path(const std::string& name) {
  return std::string(HMOTION_MOTIONS_DIR) + "/" + name + ".motion";
}

inline hmotion::MotionFile load(const std::string& name) { return hmotion::load_motion_file(motion_path(name)); }

struct Entry {
  std::string name;
  MotionFamily family;
  bool trivial;  // monodromy known by construction
};

inline std::vector<Entry> families() {
  std::vector<Entry> out;
  const std::pair<const char*, bool> files[] = {
      {"identity", true},          {"winding_w", false},      {"wiggle", true},
      {"exchange", false},         {"exchange_trivial", true}, {"disk", true},
      {"disk_two", true},          {"algebraic_pair", true},  {"algebraic_swap", false},
      {"annulus_trivial", true},   {"annulus_winding", false}, {"far_strand", true},
      {"winding_squared", false},
  };
  for (const auto& [name, trivial] : files) out.push_back({name, load(name).family, trivial});

  const MotionFamily w = load("winding_w").family;
  const MotionFamily wiggle = load("wiggle").family;
  const double root_half = std::sqrt(0.5);
  const ParameterDomain squared = ParameterDomain::punctured_disk(0.0, 1.0, 0.0, root_half);
  const Expr lambda = Expr::parameter();
  out.push_back({"pullback_w_square", hmotion::pullback(w, squared, lambda.pow(2)), false});
  out.push_back({"pullback_wiggle_square", hmotion::pullback(wiggle, squared, lambda.pow(2)), true});
  out.push_back({"pullback_wiggle_constant",
                 hmotion::pullback(wiggle, ParameterDomain::disk(0.0, 1.0, 0.0), Expr::constant(0.5)), true});
  out.push_back({"pullback_w_disk",
                 hmotion::pullback(w, ParameterDomain::disk(0.0, 1.0, 0.0),
                                   Expr::constant(0.5) + lambda / Expr::constant(4.0)),
                 true});
  return out;
}

}  // namespace corpus
