#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hmotion/braid.hpp"
#include "hmotion/continuation.hpp"
#include "hmotion/cover.hpp"
#include "hmotion/error.hpp"
#include "hmotion/extend.hpp"
#include "hmotion/motion.hpp"

namespace py = pybind11;
using namespace hmotion;

namespace {

Tolerances tolerances_from(const py::dict& overrides) {
  Tolerances tol;
  for (const auto& [key, value] : overrides) tol.set(py::cast<std::string>(key), py::cast<double>(value));
  return tol;
}

py::dict cover_point_dict(const CoverPoint& p) {
  py::dict d;
  d["word"] = p.word.to_string();
  d["end"] = std::vector<cplx>(p.end.points().begin(), p.end.points().end());
  d["projection_angle"] = p.projection_angle;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Holomorphic motions of finite sets: monodromy, lifts and extensions";

  static py::exception<Error> error_type(m, "HMotionError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::tuple args = py::make_tuple(std::string(to_string(e.kind())), e.what());
      PyErr_SetObject(error_type.ptr(), args.ptr());
    }
  });

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init<>())
      .def("get", &Tolerances::get)
      .def("set", &Tolerances::set)
      .def("entries", &Tolerances::entries);

  py::class_<MotionFamily>(m, "MotionFamily")
      .def_property_readonly("puncture_count", &MotionFamily::puncture_count)
      .def_property_readonly("base",
                             [](const MotionFamily& f) {
                               return std::vector<cplx>(f.base().points().begin(), f.base().points().end());
                             })
      .def_property_readonly("basepoint", [](const MotionFamily& f) { return f.domain().basepoint(); })
      .def_property_readonly("domain_kind",
                             [](const MotionFamily& f) { return std::string(to_string(f.domain().kind())); })
      .def_property_readonly("generator_count",
                             [](const MotionFamily& f) { return f.domain().generators().size(); })
      .def(
          "eval",
          [](const MotionFamily& f, cplx lambda) {
            const Configuration c = eval_motion(f, lambda);
            return std::vector<cplx>(c.points().begin(), c.points().end());
          },
          py::arg("parameter"))
      .def("without_last_strand", &MotionFamily::without_last_strand);

  m.def(
      "load_motion",
      [](const std::string& path) {
        MotionFile file = load_motion_file(path);
        return py::make_tuple(file.family, file.extend_points, file.degree_schedule);
      },
      py::arg("path"), "Parses a motion file: (family, extend points, degree schedule).");
  m.def(
      "parse_motion", [](const std::string& text) { return parse_motion_file(text).family; }, py::arg("text"));

  m.def(
      "check_motion",
      [](const MotionFamily& f, std::size_t budget, const py::dict& tol) {
        const ValidationReport r = check_motion(f, budget, tolerances_from(tol));
        py::dict d;
        d["passed"] = r.passed;
        d["failed_axiom"] = r.failed_axiom;
        d["basepoint_residual"] = r.basepoint_residual;
        d["injectivity_margin"] = r.injectivity_margin;
        d["holomorphy_residual"] = r.holomorphy_residual;
        return d;
      },
      py::arg("family"), py::arg("budget") = 400, py::arg("tolerances") = py::dict());

  m.def(
      "monodromy",
      [](const MotionFamily& f, std::uint64_t seed) {
        const MonodromyResult r = compute_monodromy(f, {}, {seed, 256});
        py::list out;
        for (const auto& g : r.generators) {
          py::dict d;
          d["word"] = g.mapping_class.word.to_string();
          d["exponent_sum"] = g.mapping_class.word.exponent_sum();
          d["trivial"] = g.trivial;
          out.append(d);
        }
        return out;
      },
      py::arg("family"), py::arg("seed") = 0);
  m.def(
      "is_trivial_monodromy",
      [](const MotionFamily& f, std::uint64_t seed) { return is_trivial_monodromy(f, {}, {seed, 256}); },
      py::arg("family"), py::arg("seed") = 0);

  m.def(
      "is_trivial_braid",
      [](std::size_t strands, const std::string& word) { return is_trivial_braid(BraidWord::parse(strands, word)); },
      py::arg("strands"), py::arg("word"));
  m.def(
      "is_trivial_mapping_class",
      [](std::size_t strands, const std::string& word) {
        return is_trivial_mapping_class({BraidWord::parse(strands, word)});
      },
      py::arg("strands"), py::arg("word"));
  m.def(
      "full_twist", [](std::size_t strands) { return BraidWord::full_twist(strands).to_string(); },
      py::arg("strands"));

  m.def(
      "lift",
      [](const MotionFamily& f, cplx target) {
        const double clearance = std::max(1e-3, 0.02 * f.domain().outer_radius());
        return cover_point_dict(lift_path(f, f.domain().route(target, clearance)));
      },
      py::arg("family"), py::arg("target"), "Lift of the default route from the basepoint to target.");
  m.def(
      "lift_loop",
      [](const MotionFamily& f, std::size_t generator) {
        return cover_point_dict(lift_path(f, f.domain().generators().at(generator)));
      },
      py::arg("family"), py::arg("generator"));

  m.def(
      "solve_new_strand",
      [](const MotionFamily& f, cplx zeta, int degree, std::uint64_t seed) {
        NewStrandOptions opts;
        opts.seed = seed;
        const NewStrand s = solve_new_strand(f, zeta, degree, {}, opts);
        py::dict d;
        d["margin"] = s.margin;
        d["holomorphy_residual"] = s.holomorphy_residual;
        d["degree"] = s.degree;
        d["coefficients"] = s.coefficients;
        d["strand"] = s.strand.describe();
        d["family"] = f.with_strand(s.strand, zeta);
        return d;
      },
      py::arg("family"), py::arg("zeta"), py::arg("degree") = 2, py::arg("seed") = 0);

  m.def(
      "extend_inductive",
      [](const MotionFamily& f, const std::vector<cplx>& points, const std::vector<int>& degrees) {
        const InductiveExtension ext = extend_motion_inductive(f, points, degrees);
        py::list stages;
        for (const auto& s : ext.stages) {
          py::dict d;
          d["point"] = s.point;
          d["degree"] = s.degree;
          d["margin"] = s.margin;
          d["validated"] = s.validated;
          d["monodromy_trivial"] = s.monodromy_trivial;
          d["forgetful_compatible"] = s.forgetful_compatible;
          stages.append(d);
        }
        return py::make_tuple(ext.family, stages);
      },
      py::arg("family"), py::arg("points"), py::arg("degrees") = std::vector<int>{2, 4, 8});

  m.def(
      "continuous_motion",
      [](const MotionFamily& f, std::size_t branch_count, std::uint64_t seed) {
        ContinuousMotionOptions opts;
        opts.branch_count = branch_count;
        opts.seed = seed;
        const ContinuousMotionGrid g = build_continuous_motion(f, {}, opts);
        py::dict d;
        d["samples"] = g.samples.size();
        d["grid_shape"] = py::make_tuple(g.grid.nx, g.grid.ny);
        d["max_strand_error"] = g.max_strand_error();
        d["min_jacobian"] = g.min_jacobian();
        d["max_beltrami"] = g.max_beltrami();
        d["max_beltrami_jump"] = g.max_beltrami_jump();
        return d;
      },
      py::arg("family"), py::arg("branch_count") = 16, py::arg("seed") = 0,
      "Grid diagnostics of the continuous extension.");

  m.def(
      "fixed_point",
      [](cplx target, std::function<std::vector<cplx>(std::vector<cplx>)> op, std::vector<cplx> initial,
         double tolerance) {
        FixedPointProblem p;
        p.target = target;
        p.tolerance = tolerance;
        p.op = [op](std::span<const cplx> g) { return op(std::vector<cplx>(g.begin(), g.end())); };
        const FixedPointResult r = fixed_point_iterate(p, initial);
        py::dict d;
        d["values"] = r.values;
        d["iterations"] = r.iterations;
        d["residual"] = r.residual;
        d["uniqueness_spread"] = r.uniqueness_spread;
        d["unique"] = r.unique;
        return d;
      },
      py::arg("target"), py::arg("op"), py::arg("initial"), py::arg("tolerance") = 1e-10);
}
