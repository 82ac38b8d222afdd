// hmotion: validate motion definition files, decide monodromy, build
// extensions and lifts, and write JSON reports plus SVG diagrams.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "hmotion/braid.hpp"
#include "hmotion/continuation.hpp"
#include "hmotion/cover.hpp"
#include "hmotion/error.hpp"
#include "hmotion/extend.hpp"
#include "hmotion/expr.hpp"
#include "hmotion/motion.hpp"
#include "hmotion/report.hpp"

namespace fs = std::filesystem;
using namespace hmotion;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kObstruction = 3, kSolver = 4 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string out = ".";
  std::string mode = "continuous";
  std::uint64_t seed = 0;
  std::size_t samples = 400;
  std::vector<std::string> tolerance_overrides;
  std::vector<std::string> points;
  Tolerances tol;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::ParseError:
    case ErrorKind::InvalidNewPoint:
      return kUsage;
    case ErrorKind::ValidationFailure:
    case ErrorKind::CollisionAtParameter:
    case ErrorKind::SeparationViolation:
    case ErrorKind::InfinitePuncture:
    case ErrorKind::DegenerateTriple:
    case ErrorKind::OutsideDomain:
    case ErrorKind::NotBasepointPreserving:
    case ErrorKind::RangeEscape:
      return kInvalid;
    case ErrorKind::NontrivialMonodromy:
    case ErrorKind::NontrivialExtendedMonodromy:
      return kObstruction;
    default:
      return kSolver;
  }
}

class Reporter {
 public:
  explicit Reporter(const RunConfig& cfg) : cfg_(cfg) {
    doc_ = json{{"version", kReportVersion},
                {"command", cfg.command},
                {"seed", cfg.seed},
                {"tolerances", to_json(cfg.tol)},
                {"verdicts", json::array()},
                {"words", json::array()},
                {"artifacts", json::array()}};
    if (cfg.command == "extend") doc_["mode"] = cfg.mode;
  }

  json& doc() { return doc_; }

  void verdict(const std::string& name, bool passed, json detail = json::object()) {
    detail["name"] = name;
    detail["passed"] = passed;
    doc_["verdicts"].push_back(std::move(detail));
  }

  void artifact(const std::string& name, const std::string& content) {
    fs::create_directories(cfg_.out);
    std::ofstream(fs::path(cfg_.out) / name, std::ios::binary) << content;
    doc_["artifacts"].push_back(name);
  }

  void failure(const Error& e) {
    json f{{"cause", std::string(to_string(e.kind()))}, {"message", e.what()}};
    if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
      f["line"] = p->line();
      f["column"] = p->column();
    }
    if (const auto* s = dynamic_cast<const StageFailure*>(&e)) {
      f["stage"] = s->stage();
      f["stage_cause"] = std::string(to_string(s->cause()));
    }
    if (const auto* n = dynamic_cast<const NontrivialMonodromy*>(&e)) {
      f["generator"] = n->generator();
      f["word"] = n->word();
    }
    doc_["error"] = f;
  }

  void write() {
    fs::create_directories(cfg_.out);
    std::ofstream(fs::path(cfg_.out) / "report.json", std::ios::binary) << doc_.dump(2) << "\n";
  }

 private:
  const RunConfig& cfg_;
  json doc_;
};

std::vector<cplx> cli_points(const RunConfig& cfg) {
  std::vector<cplx> pts;
  for (const auto& p : cfg.points) pts.push_back(parse_constant(p));
  return pts;
}

int run_validate(const RunConfig& cfg, const MotionFile& file, Reporter& rep) {
  const ValidationReport r = check_motion(file.family, cfg.samples, cfg.tol);
  rep.doc()["validation"] = to_json(r);
  rep.verdict("motion", r.passed);
  return r.passed ? kOk : kInvalid;
}

int run_monodromy(const RunConfig& cfg, const MotionFile& file, Reporter& rep) {
  if (int code = run_validate(cfg, file, rep); code != kOk) return code;
  const MonodromyResult mono = compute_monodromy(file.family, cfg.tol, {cfg.seed, 256});
  rep.doc()["projection_angle"] = mono.projection_angle;
  for (std::size_t g = 0; g < mono.generators.size(); ++g) {
    const auto& gen = mono.generators[g];
    const std::string svg_name = "braid_generator_" + std::to_string(g) + ".svg";
    rep.doc()["words"].push_back(json{{"generator", g},
                                      {"word", gen.mapping_class.word.to_string()},
                                      {"exponent_sum", gen.mapping_class.word.exponent_sum()},
                                      {"trivial", gen.trivial}});
    rep.verdict("generator " + std::to_string(g) + " trivial", gen.trivial);
    rep.artifact(svg_name, braid_svg(gen.tracks, gen.crossings, mono.projection_angle,
                                     file.name + " generator " + std::to_string(g) + ": " +
                                         (gen.mapping_class.word.empty() ? "(empty)"
                                                                         : gen.mapping_class.word.to_string())));
  }
  rep.verdict("monodromy trivial", mono.trivial());
  return mono.trivial() ? kOk : kObstruction;
}

int run_continuous(const RunConfig& cfg, const MotionFile& file, Reporter& rep) {
  ContinuousMotionOptions opts;
  opts.seed = cfg.seed;
  const ContinuousMotionGrid grid = build_continuous_motion(file.family, cfg.tol, opts);
  std::size_t worst = 0;
  for (std::size_t k = 0; k < grid.samples.size(); ++k) {
    if (grid.samples[k].beltrami_sup > grid.samples[worst].beltrami_sup) worst = k;
  }
  rep.doc()["continuous"] = json{{"samples", grid.samples.size()},
                                 {"support_radius", grid.support_radius},
                                 {"min_separation", grid.min_separation},
                                 {"max_strand_error", grid.max_strand_error()},
                                 {"min_jacobian", grid.min_jacobian()},
                                 {"max_beltrami", grid.max_beltrami()},
                                 {"max_beltrami_jump", grid.max_beltrami_jump()}};
  const bool interp = grid.max_strand_error() < 1e-6;
  const bool homeo = grid.min_jacobian() > 0.0;
  const bool qc = grid.max_beltrami() < 1.0;
  rep.verdict("strand interpolation", interp);
  rep.verdict("orientation", homeo);
  rep.verdict("beltrami below 1", qc);
  rep.artifact("grid.json", grid_to_json(grid, 41).dump() + "\n");
  rep.artifact("beltrami.svg", beltrami_svg(grid, worst));
  return interp && homeo && qc ? kOk : kSolver;
}

MotionFile extended_file(const MotionFile& file, const MotionFamily& family) {
  return MotionFile{file.name + "-extended", family, {}, {}};
}

int run_point(const RunConfig& cfg, const MotionFile& file, Reporter& rep) {
  std::vector<cplx> pts = cli_points(cfg);
  if (pts.empty()) pts = file.extend_points;
  if (pts.empty()) throw Error(ErrorKind::InvalidArgument, "no new point given (--point or [extend] points)");
  const std::vector<int> degrees = file.degree_schedule.empty() ? std::vector<int>{2, 4, 8} : file.degree_schedule;
  NewStrandOptions opts;
  opts.seed = cfg.seed;
  for (std::size_t d = 0; d < degrees.size(); ++d) {
    try {
      const NewStrand s = solve_new_strand(file.family, pts.front(), degrees[d], cfg.tol, opts);
      rep.doc()["strand"] = json{{"point", to_json(pts.front())},
                                 {"degree", s.degree},
                                 {"margin", s.margin},
                                 {"holomorphy_residual", s.holomorphy_residual},
                                 {"expr", s.strand.describe()}};
      rep.verdict("new strand", true);
      rep.artifact("extended.motion",
                   format_motion_file(extended_file(file, file.family.with_strand(s.strand, pts.front(), cfg.tol))));
      return kOk;
    } catch (const NoStrandFound&) {
      if (d + 1 == degrees.size()) throw;
    }
  }
  return kSolver;
}

int run_inductive(const RunConfig& cfg, const MotionFile& file, Reporter& rep) {
  std::vector<cplx> pts = cli_points(cfg);
  if (pts.empty()) pts = file.extend_points;
  const std::vector<int> degrees = file.degree_schedule.empty() ? std::vector<int>{2, 4, 8} : file.degree_schedule;
  InductiveOptions opts;
  opts.solver.seed = cfg.seed;
  opts.validation_budget = cfg.samples;
  const InductiveExtension ext = extend_motion_inductive(file.family, pts, degrees, cfg.tol, opts);
  json stages = json::array();
  for (const auto& s : ext.stages) stages.push_back(to_json(s));
  rep.doc()["stages"] = stages;
  rep.verdict("inductive extension", true, json{{"stages", ext.stages.size()}});
  rep.artifact("extended.motion", format_motion_file(extended_file(file, ext.family)));
  return kOk;
}

int run_extend(const RunConfig& cfg, const MotionFile& file, Reporter& rep) {
  if (int code = run_validate(cfg, file, rep); code != kOk) return code;
  if (cfg.mode == "continuous") return run_continuous(cfg, file, rep);
  if (cfg.mode == "point") return run_point(cfg, file, rep);
  return run_inductive(cfg, file, rep);
}

int run_lift(const RunConfig& cfg, const MotionFile& file, Reporter& rep) {
  if (int code = run_validate(cfg, file, rep); code != kOk) return code;
  LiftOptions opts;
  opts.seed = cfg.seed;
  const LiftedMap lifted = lift_map(file.family, cfg.tol, opts);
  for (std::size_t g = 0; g < lifted.deck_words.size(); ++g) {
    rep.doc()["words"].push_back(json{{"generator", g}, {"word", lifted.deck_words[g].word.to_string()}, {"trivial", true}});
  }
  json probes = json::array();
  for (const auto& p : lifted.probes) {
    probes.push_back(json{{"parameter", to_json(p.parameter)},
                          {"direct", to_json(p.direct)},
                          {"detour", to_json(p.detour)},
                          {"agree", p.agree}});
  }
  rep.doc()["probes"] = probes;
  json points = json::array();
  for (const cplx lambda : cli_points(cfg)) {
    json entry = to_json(lifted.at(lambda, cfg.tol));
    entry["parameter"] = to_json(lambda);
    points.push_back(std::move(entry));
  }
  if (!points.empty()) rep.doc()["points"] = points;
  rep.verdict("path independence certificate", lifted.certified(), json{{"probes", lifted.probes.size()}});
  return lifted.certified() ? kOk : kSolver;
}

int run_report(const RunConfig& cfg, const MotionFile& file, Reporter& rep) {
  if (int code = run_monodromy(cfg, file, rep); code != kOk) return code;
  return run_continuous(cfg, file, rep);
}

int dispatch(RunConfig& cfg) {
  Reporter rep(cfg);
  int code = kOk;
  try {
    const MotionFile file = load_motion_file(cfg.input, cfg.tol);
    rep.doc()["input"] = file.name;
    if (cfg.command == "validate") {
      code = run_validate(cfg, file, rep);
    } else if (cfg.command == "monodromy") {
      code = run_monodromy(cfg, file, rep);
    } else if (cfg.command == "extend") {
      code = run_extend(cfg, file, rep);
    } else if (cfg.command == "lift") {
      code = run_lift(cfg, file, rep);
    } else {
      code = run_report(cfg, file, rep);
    }
  } catch (const Error& e) {
    rep.failure(e);
    code = exit_code_for(e.kind());
    if (const auto* s = dynamic_cast<const StageFailure*>(&e)) code = exit_code_for(s->cause());
    std::cerr << "hmotion: " << e.what() << "\n";
  }
  rep.doc()["exit_code"] = code;
  rep.write();
  std::cout << cfg.command << ": " << (code == kOk ? "ok" : "exit " + std::to_string(code)) << " ("
            << (fs::path(cfg.out) / "report.json").string() << ")\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holomorphic motions: validation, monodromy, extension and lifting"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Motion definition file")->required();
    sub->add_option("--out", cfg.out, "Output directory for report.json and artifacts");
    sub->add_option("--seed", cfg.seed, "Random seed recorded in the report");
    sub->add_option("--samples", cfg.samples, "Validation sample budget (>= 100)");
    sub->add_option("--tolerance", cfg.tolerance_overrides, "Tolerance override KEY=VAL (repeatable)");
    sub->add_option("--point", cfg.points, "New point (extend) or probe parameter (lift); repeatable");
  };
  const std::pair<const char*, const char*> commands[] = {
      {"validate", "Check the motion axioms"},
      {"monodromy", "Braid words of the generator loops and their triviality"},
      {"lift", "Lift to the configuration cover and certify path independence"},
      {"report", "Monodromy, then the continuous extension when it is trivial"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));
  CLI::App* extend = app.add_subcommand("extend", "Continuous, one-point or inductive extension");
  add_common(extend);
  extend->add_option("--mode", cfg.mode, "continuous | point | inductive");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? kOk : kUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.mode != "continuous" && cfg.mode != "point" && cfg.mode != "inductive") {
    std::cerr << "hmotion: unknown mode '" << cfg.mode << "' (expected continuous, point or inductive)\n";
    return kUsage;
  }
  try {
    for (const auto& kv : cfg.tolerance_overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "tolerance override must be KEY=VAL");
      cfg.tol.set(kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
    }
  } catch (const std::exception& e) {
    std::cerr << "hmotion: " << e.what() << "\n";
    return kUsage;
  }
  return dispatch(cfg);
}
