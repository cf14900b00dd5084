#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "geomorse/fermi.hpp"
#include "geomorse/flow.hpp"
#include "geomorse/metrics.hpp"
#include "geomorse/minmax.hpp"
#include "geomorse/report.hpp"
#include "geomorse/spectrum.hpp"

namespace py = pybind11;
using namespace geomorse;

PYBIND11_MODULE(_geomorse, m) {
  m.doc() = "Closed geodesics on Riemannian 2-spheres: curve-shortening "
            "min-max, stability spectra, Fermi charts and Morse inequalities.";

  py::register_exception<Error>(m, "GeomorseError");

  // ---- surfaces ----------------------------------------------------------
  py::class_<ConformalBump, std::shared_ptr<ConformalBump>>(m, "ConformalBump");

  py::class_<MetricSurface>(m, "MetricSurface")
      .def_static("round_sphere", &MetricSurface::round_sphere, py::arg("radius"))
      .def_static("ellipsoid", &MetricSurface::ellipsoid, py::arg("a"),
                  py::arg("b"), py::arg("c"))
      .def_static("from_json_string", &MetricSurface::from_json_string)
      .def("to_json_string", &MetricSurface::to_json_string)
      .def("with_overlay",
           [](const MetricSurface& s, std::shared_ptr<ConformalBump> b) {
             return s.with_overlay(b);
           })
      .def("base_surface", &MetricSurface::base_surface)
      .def_property_readonly("is_round", &MetricSurface::is_round)
      .def_property_readonly("semi_axes", &MetricSurface::semi_axes)
      .def_property_readonly("is_bumpy_candidate",
                             &MetricSurface::is_bumpy_candidate)
      .def("project", &MetricSurface::project)
      .def("normal", &MetricSurface::normal)
      .def("gaussian_curvature", &MetricSurface::gaussian_curvature)
      .def("base_gaussian_curvature", &MetricSurface::base_gaussian_curvature)
      .def("phi", &MetricSurface::phi)
      .def("length_weight", &MetricSurface::length_weight)
      .def("distance", &MetricSurface::distance)
      .def("distance_upper", &MetricSurface::distance_upper);

  // ---- curves and varifolds ----------------------------------------------
  py::class_<DiscreteCurve>(m, "DiscreteCurve")
      .def(py::init<std::vector<Vec3>>(), py::arg("vertices"))
      .def_static("point_curve", &DiscreteCurve::point_curve)
      .def_property_readonly("vertices", &DiscreteCurve::vertices)
      .def_property_readonly("resolution", &DiscreteCurve::resolution)
      .def_property_readonly("is_point", &DiscreteCurve::is_point)
      .def("vertex", [](const DiscreteCurve& c, int i) { return c.vertex(i); })
      .def("centroid", &DiscreteCurve::centroid)
      .def("canonical", &DiscreteCurve::canonical)
      .def("reversed", &DiscreteCurve::reversed);

  py::class_<VarifoldAtom>(m, "VarifoldAtom")
      .def_readonly("point", &VarifoldAtom::point)
      .def_readonly("line", &VarifoldAtom::line)
      .def_readonly("weight", &VarifoldAtom::weight);

  py::class_<VarifoldSample>(m, "VarifoldSample")
      .def_readonly("atoms", &VarifoldSample::atoms)
      .def("total_mass", &VarifoldSample::total_mass);

  m.def("length", &length);
  m.def("chord_length", &chord_length);
  m.def("segment_lengths", &segment_lengths);
  m.def("geodesic_curvature", &geodesic_curvature);
  m.def("is_embedded", &is_embedded);
  m.def("resample", &resample);
  m.def("to_varifold", &to_varifold);

  // ---- distances ---------------------------------------------------------
  py::class_<FBracket>(m, "FBracket")
      .def_readonly("lower", &FBracket::lower)
      .def_readonly("upper", &FBracket::upper)
      .def_readonly("method", &FBracket::method)
      .def_readonly("atoms_v", &FBracket::atoms_v)
      .def_readonly("atoms_w", &FBracket::atoms_w)
      .def("to_json_string", &FBracket::to_json_string);

  m.def("hausdorff_distance", &hausdorff_distance);
  m.def("f_distance", &f_distance);
  m.def("check_f_to_hausdorff", &check_f_to_hausdorff);
  m.def("grassmann_distance", &grassmann_distance);

  // ---- curve-shortening flow ---------------------------------------------
  py::enum_<FlowStatus>(m, "FlowStatus")
      .value("running", FlowStatus::running)
      .value("converged_geodesic", FlowStatus::converged_geodesic)
      .value("converged_point", FlowStatus::converged_point)
      .value("step_limit", FlowStatus::step_limit);

  py::class_<FlowState>(m, "FlowState")
      .def_readonly("curve", &FlowState::curve)
      .def_readonly("time", &FlowState::time)
      .def_readonly("step_count", &FlowState::step_count)
      .def_readonly("length_history", &FlowState::length_history)
      .def_readonly("status", &FlowState::status)
      .def_readonly("max_curvature", &FlowState::max_curvature);

  py::class_<FlowBudget>(m, "FlowBudget")
      .def(py::init<>())
      .def_readwrite("dt", &FlowBudget::dt)
      .def_readwrite("t_max", &FlowBudget::t_max)
      .def_readwrite("max_steps", &FlowBudget::max_steps);

  m.def("make_flow_state", &make_flow_state);
  m.def("csf_step", &csf_step);
  m.def("evolve", &evolve, py::arg("curve"), py::arg("surface"),
        py::arg("budget") = FlowBudget{});
  m.def("tighten_family", &tighten_family);
  m.def("principal_ellipses", &principal_ellipses);

  // ---- Fermi charts and conformal bumps ----------------------------------
  py::class_<FermiChart, std::shared_ptr<FermiChart>>(m, "FermiChart")
      .def_property_readonly("L", &FermiChart::L)
      .def_property_readonly("h", &FermiChart::h)
      .def_property_readonly("nx", &FermiChart::nx)
      .def_property_readonly("ny", &FermiChart::ny)
      .def_property_readonly("xs", &FermiChart::xs)
      .def_property_readonly("ys", &FermiChart::ys)
      .def_property_readonly("J", &FermiChart::J,
                             py::return_value_policy::copy)
      .def_property_readonly("K_table", &FermiChart::K_table,
                             py::return_value_policy::copy)
      .def("core", &FermiChart::core)
      .def("to_surface", &FermiChart::to_surface)
      .def("chart_coords", &FermiChart::chart_coords)
      .def("in_tube", &FermiChart::in_tube)
      .def("J_at", &FermiChart::J_at)
      .def("level_curvature_at", &FermiChart::level_curvature_at)
      .def("to_json_string", &FermiChart::to_json_string);

  m.def("build_chart",
        [](const DiscreteCurve& geodesic, const MetricSurface& surface,
           double h, int nx, int ny) {
          return std::make_shared<FermiChart>(
              build_chart(geodesic, surface, h, nx, ny));
        },
        py::arg("geodesic"), py::arg("surface"), py::arg("h"), py::arg("nx"),
        py::arg("ny"));

  py::class_<BumpFunction, ConformalBump, std::shared_ptr<BumpFunction>>(
      m, "BumpFunction")
      .def_property_readonly("M", &BumpFunction::M)
      .def_property_readonly("beta", &BumpFunction::beta)
      .def_property_readonly("eps", &BumpFunction::eps)
      .def_property_readonly("A", &BumpFunction::A)
      .def_property_readonly("B", &BumpFunction::B)
      .def_property_readonly("h", &BumpFunction::h)
      .def_property_readonly("phi_core", &BumpFunction::phi_core)
      .def("phi_of_y", &BumpFunction::phi_of_y);

  m.def("make_bump",
        [](std::shared_ptr<FermiChart> chart, double M, double beta) {
          return make_bump(chart, M, beta);
        },
        py::arg("chart"), py::arg("M"), py::arg("beta"));

  py::class_<JacobianBounds>(m, "JacobianBounds")
      .def_readonly("sup_jac", &JacobianBounds::sup_jac)
      .def_readonly("lip_bound", &JacobianBounds::lip_bound);
  m.def("jacobian_bounds", &jacobian_bounds);

  py::class_<GraphCurve>(m, "GraphCurve")
      .def(py::init<>())
      .def_readwrite("heights", &GraphCurve::heights)
      .def("to_curve", &GraphCurve::to_curve);

  py::class_<TotalAngle>(m, "TotalAngle")
      .def_readonly("angle_integral", &TotalAngle::angle_integral)
      .def_readonly("cos_defect", &TotalAngle::cos_defect);

  m.def("level_curvature", &level_curvature);
  m.def("is_mean_convex", &is_mean_convex);
  m.def("winding_number", &winding_number);
  m.def("horizontal_width", &horizontal_width);
  m.def("is_graphical", &is_graphical);
  m.def("squeeze_homotopy", &squeeze_homotopy);
  m.def("total_angle", &total_angle);
  m.def("chart_length", &chart_length);

  // ---- stability spectra and local families ------------------------------
  py::class_<JacobiSpectrum>(m, "JacobiSpectrum")
      .def_readonly("eigenvalues", &JacobiSpectrum::eigenvalues)
      .def_readonly("eigenfunctions", &JacobiSpectrum::eigenfunctions)
      .def_readonly("index", &JacobiSpectrum::index)
      .def_readonly("nullity", &JacobiSpectrum::nullity)
      .def_readonly("tol", &JacobiSpectrum::tol)
      .def_readonly("n", &JacobiSpectrum::n)
      .def_readonly("length", &JacobiSpectrum::length)
      .def("to_json_string", &JacobiSpectrum::to_json_string);

  m.def("stability_spectrum", &stability_spectrum, py::arg("geodesic"),
        py::arg("surface"), py::arg("m"));

  py::class_<LocalMinMaxFamily>(m, "LocalMinMaxFamily")
      .def_property_readonly("k", &LocalMinMaxFamily::k)
      .def_property_readonly("delta_prime", &LocalMinMaxFamily::delta_prime)
      .def_property_readonly("lambda1", &LocalMinMaxFamily::lambda1)
      .def_property_readonly("boundary_drop", &LocalMinMaxFamily::boundary_drop)
      .def_property_readonly("core_length", &LocalMinMaxFamily::core_length)
      .def("core", &LocalMinMaxFamily::core)
      .def("apply", &LocalMinMaxFamily::apply)
      .def("apply_to", &LocalMinMaxFamily::apply_to)
      .def("length_of", &LocalMinMaxFamily::length_of)
      .def("grad_length", &LocalMinMaxFamily::grad_length)
      .def("hessian_length", &LocalMinMaxFamily::hessian_length);

  m.def("build_local_minmax", &build_local_minmax, py::arg("geodesic"),
        py::arg("surface"), py::arg("spectrum"), py::arg("half_width") = 0.0);
  m.def("l_star", &l_star);
  m.def("boundary_escape_flow", &boundary_escape_flow);

  // ---- sweepouts and widths ----------------------------------------------
  py::class_<Sweepout>(m, "Sweepout")
      .def_property_readonly("mode", &Sweepout::mode)
      .def_property_readonly("dims", &Sweepout::dims)
      .def_property_readonly("member_count", &Sweepout::member_count)
      .def_property_readonly("descriptor", &Sweepout::descriptor)
      .def("member", &Sweepout::member)
      .def("member_length", &Sweepout::member_length);

  m.def("plane_sweepout", &plane_sweepout, py::arg("surface"), py::arg("mode"),
        py::arg("resolution"), py::arg("curve_resolution"));

  py::class_<WidthBudget>(m, "WidthBudget")
      .def(py::init<>())
      .def_readwrite("flow", &WidthBudget::flow)
      .def_readwrite("t_target", &WidthBudget::t_target)
      .def_readwrite("window", &WidthBudget::window)
      .def_readwrite("max_checked_slices", &WidthBudget::max_checked_slices)
      .def_readwrite("refine_resolution", &WidthBudget::refine_resolution);

  py::class_<WidthEstimate>(m, "WidthEstimate")
      .def_readonly("value", &WidthEstimate::value)
      .def_readonly("parameter", &WidthEstimate::parameter)
      .def_readonly("tightening_time", &WidthEstimate::tightening_time)
      .def_readonly("limit_curve", &WidthEstimate::limit_curve)
      .def_readonly("limit_status", &WidthEstimate::limit_status)
      .def_readonly("history", &WidthEstimate::history)
      .def_readonly("window", &WidthEstimate::window)
      .def_readonly("f_radius", &WidthEstimate::f_radius)
      .def_readonly("checked_slices", &WidthEstimate::checked_slices)
      .def_readonly("concentrated", &WidthEstimate::concentrated)
      .def_readonly("flowed_members", &WidthEstimate::flowed_members)
      .def_readonly("pruned_members", &WidthEstimate::pruned_members)
      .def("to_json_string", &WidthEstimate::to_json_string);

  m.def("width_estimate", &width_estimate, py::arg("sweepout"),
        py::arg("surface"), py::arg("budget") = WidthBudget{});
  m.def("minmax_geodesic", &minmax_geodesic, py::arg("sweepout"),
        py::arg("surface"), py::arg("budget") = WidthBudget{});

  // ---- catalog, inequalities, pipeline -----------------------------------
  py::class_<GeodesicRun>(m, "GeodesicRun")
      .def(py::init<>())
      .def_readwrite("curve", &GeodesicRun::curve)
      .def_readwrite("spectrum", &GeodesicRun::spectrum)
      .def_readwrite("provenance", &GeodesicRun::provenance);

  py::class_<CatalogEntry>(m, "CatalogEntry")
      .def_readonly("curve", &CatalogEntry::curve)
      .def_readonly("length", &CatalogEntry::length)
      .def_readonly("index", &CatalogEntry::index)
      .def_readonly("nullity", &CatalogEntry::nullity)
      .def_readonly("provenance", &CatalogEntry::provenance);

  py::class_<GeodesicCatalog>(m, "GeodesicCatalog")
      .def_readonly("entries", &GeodesicCatalog::entries)
      .def_readonly("cutoff", &GeodesicCatalog::cutoff)
      .def("to_csv", &GeodesicCatalog::to_csv);

  m.def("make_catalog", &make_catalog, py::arg("surface"), py::arg("runs"),
        py::arg("cutoff"), py::arg("threshold") = 1e-2);
  m.def("morse_counts", &morse_counts);

  py::class_<MorseReport>(m, "MorseReport")
      .def_readonly("counts", &MorseReport::counts)
      .def_readonly("betti", &MorseReport::betti)
      .def_readonly("strong_pass", &MorseReport::strong_pass)
      .def_readonly("weak_pass", &MorseReport::weak_pass)
      .def("all_pass", &MorseReport::all_pass)
      .def("to_json_string", &MorseReport::to_json_string);

  m.def("check_inequalities", &check_inequalities);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("surface", &PipelineConfig::surface)
      .def_readwrite("lattice", &PipelineConfig::lattice)
      .def_readwrite("curve_resolution", &PipelineConfig::curve_resolution)
      .def_readwrite("refine_resolution", &PipelineConfig::refine_resolution)
      .def_readwrite("t_target", &PipelineConfig::t_target)
      .def_readwrite("random_seeds", &PipelineConfig::random_seeds)
      .def_readwrite("seed", &PipelineConfig::seed)
      .def_readwrite("betti", &PipelineConfig::betti)
      .def_readwrite("cutoff", &PipelineConfig::cutoff)
      .def_readwrite("dedup_threshold", &PipelineConfig::dedup_threshold)
      .def_static("from_json_string", &PipelineConfig::from_json_string)
      .def("to_json_string", &PipelineConfig::to_json_string);

  py::class_<PipelineResult>(m, "PipelineResult")
      .def_readonly("catalog", &PipelineResult::catalog)
      .def_readonly("report", &PipelineResult::report)
      .def_readonly("widths", &PipelineResult::widths)
      .def_readonly("non_bumpy", &PipelineResult::non_bumpy)
      .def_readonly("warnings", &PipelineResult::warnings)
      .def("to_json_string", &PipelineResult::to_json_string);

  m.def("run_morse_pipeline", &run_morse_pipeline, py::arg("config"),
        py::arg("out_dir") = std::string());
}
