#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "geomorse/curve.hpp"
#include "geomorse/fermi.hpp"
#include "geomorse/flow.hpp"
#include "geomorse/minmax.hpp"
#include "geomorse/report.hpp"
#include "geomorse/spectrum.hpp"
#include "geomorse/surface.hpp"

namespace gm = geomorse;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

gm::MetricSurface load_surface(const std::string& path) {
  return gm::MetricSurface::from_json_string(slurp(path));
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

int run_flow(const std::string& surface_path, const std::string& curve_path,
             double dt, double t_max, const std::string& out,
             const std::string& final_curve) {
  gm::MetricSurface surface = load_surface(surface_path);
  gm::DiscreteCurve c = gm::read_curve_csv(curve_path);
  gm::FlowState st = gm::make_flow_state(c, surface);
  double spacing = gm::length(c, surface) / c.resolution();
  double step = dt > 0 ? dt : 0.35 * spacing * spacing;
  std::ostringstream trace;
  trace << "time,length,max_curvature\n";
  char row[128];
  gm::FlowBudget budget;
  budget.t_max = t_max;
  long steps = 0;
  while (st.status == gm::FlowStatus::running && st.time < t_max &&
         steps < budget.max_steps) {
    st = gm::csf_step(st, surface, step);
    ++steps;
    std::snprintf(row, sizeof row, "%.10g,%.17g,%.10g\n", st.time,
                  gm::length(st.curve, surface), st.max_curvature);
    trace << row;
    if (st.curve.is_point() || st.max_curvature < budget.curvature_tol) break;
  }
  spit(out, trace.str());
  if (!final_curve.empty()) gm::write_curve_csv(st.curve, final_curve);
  std::cout << "steps " << steps << "  time " << st.time << "  length "
            << gm::length(st.curve, surface) << "  max_curvature "
            << st.max_curvature << "\n";
  return 0;
}

int run_fermi(const std::string& surface_path, const std::string& geo_path,
              double half_width, int nx, int ny, const std::string& out) {
  gm::MetricSurface surface = load_surface(surface_path);
  gm::DiscreteCurve core = gm::read_curve_csv(geo_path);
  gm::FermiChart chart = gm::build_chart(core, surface, half_width, nx, ny);
  spit(out, chart.to_json_string() + "\n");
  bool convex = gm::is_mean_convex(chart);
  double jmin = chart.J().minCoeff(), jmax = chart.J().maxCoeff();
  std::cout << "chart L " << chart.L() << "  h " << chart.h() << "  grid "
            << chart.nx() << "x" << chart.ny() << "\n"
            << "J range [" << jmin << ", " << jmax << "]\n"
            << "level foliation mean convex: " << (convex ? "yes" : "no")
            << "\n";
  return 0;
}

int run_spectrum(const std::string& surface_path, const std::string& curve_path,
                 int m, const std::string& out) {
  gm::MetricSurface surface = load_surface(surface_path);
  gm::DiscreteCurve c = gm::read_curve_csv(curve_path);
  gm::JacobiSpectrum spec = gm::stability_spectrum(c, surface, m);
  std::string json = spec.to_json_string() + "\n";
  if (out.empty())
    std::cout << json;
  else {
    spit(out, json);
    std::cout << "index " << spec.index << "  nullity " << spec.nullity << "\n";
  }
  return 0;
}

int run_minmax(const std::string& surface_path, int mode, int lattice,
               double t_max, const std::string& out,
               const std::string& limit_out) {
  gm::MetricSurface surface = load_surface(surface_path);
  gm::Sweepout sw = gm::plane_sweepout(surface, mode, lattice);
  gm::WidthBudget budget;
  budget.t_target = t_max;
  gm::WidthEstimate w = gm::width_estimate(sw, surface, budget);
  spit(out, w.to_json_string() + "\n");
  if (!limit_out.empty()) gm::write_curve_csv(w.limit_curve, limit_out);
  std::cout << "tightened family width " << w.value << " at lattice ("
            << w.parameter[0] << "," << w.parameter[1] << "," << w.parameter[2]
            << "), limit " << gm::flow_status_name(w.limit_status) << "\n";
  return 0;
}

int run_morse(const std::string& config_path, const std::string& out_dir) {
  gm::PipelineConfig config =
      gm::PipelineConfig::from_json_string(slurp(config_path));
  gm::PipelineResult res = gm::run_morse_pipeline(config, out_dir);
  std::cout << "geodesics " << res.catalog.entries.size() - 1
            << " (+ point curve)\n";
  for (const auto& e : res.catalog.entries)
    std::cout << "  length " << e.length << "  index " << e.index
              << "  nullity " << e.nullity << "  [" << e.provenance << "]\n";
  std::cout << "inequalities: " << (res.report.all_pass() ? "pass" : "FAIL")
            << "\n";
  for (const auto& wmsg : res.warnings) std::cout << "warning: " << wmsg << "\n";
  return res.report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed geodesics on 2-spheres: shortening flow, Fermi charts, "
               "stability spectra, min-max widths"};
  app.require_subcommand(1);

  std::string surface_path, curve_path, out, extra, config_path, out_dir;
  double dt = 0.0, t_max = 20.0, half_width = 0.3;
  int nx = 128, ny = 33, m = 8, mode = 1, lattice = 16;

  auto* flow = app.add_subcommand("flow", "run the curve-shortening flow");
  flow->add_option("--surface", surface_path, "surface JSON")->required();
  flow->add_option("--curve", curve_path, "initial curve CSV")->required();
  flow->add_option("--dt", dt, "step size (0 = auto)");
  flow->add_option("--t-max", t_max, "flow horizon");
  flow->add_option("--out", out, "trace CSV (time,length,max_curvature)")
      ->required();
  flow->add_option("--final-curve", extra, "write the final curve CSV here");

  auto* fermi = app.add_subcommand("fermi", "build a Fermi chart");
  fermi->add_option("--surface", surface_path, "surface JSON")->required();
  fermi->add_option("--geodesic", curve_path, "core geodesic CSV")->required();
  fermi->add_option("--half-width", half_width, "tube half-width");
  fermi->add_option("--grid", [&nx, &ny](const std::vector<std::string>& v) {
      return std::sscanf(v[0].c_str(), "%d,%d", &nx, &ny) == 2;
    }, "grid as nx,ny");
  fermi->add_option("--out", out, "chart JSON path")->required();

  auto* spectrum = app.add_subcommand("spectrum", "stability spectrum");
  spectrum->add_option("--surface", surface_path, "surface JSON")->required();
  spectrum->add_option("--curve", curve_path, "geodesic CSV")->required();
  spectrum->add_option("--num-eigs", m, "eigenpairs to report");
  spectrum->add_option("--out", out, "JSON output (default stdout)");

  auto* minmax = app.add_subcommand("minmax", "sweepout width estimate");
  minmax->add_option("--surface", surface_path, "surface JSON")->required();
  minmax->add_option("--mode", mode, "sweepout mode 1..3")->required();
  minmax->add_option("--lattice", lattice, "lattice resolution");
  minmax->add_option("--t-max", t_max, "tightening horizon");
  minmax->add_option("--out", out, "width JSON path")->required();
  minmax->add_option("--limit-curve", extra, "write the limit curve CSV here");

  auto* morse = app.add_subcommand("morse", "full catalog + Morse inequalities");
  morse->add_option("--config", config_path, "pipeline config JSON")->required();
  morse->add_option("--out-dir", out_dir, "artifact directory")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*flow) return run_flow(surface_path, curve_path, dt, t_max, out, extra);
    if (*fermi) return run_fermi(surface_path, curve_path, half_width, nx, ny, out);
    if (*spectrum) return run_spectrum(surface_path, curve_path, m, out);
    if (*minmax) return run_minmax(surface_path, mode, lattice, t_max, out, extra);
    if (*morse) return run_morse(config_path, out_dir);
  } catch (const gm::Error& e) {
    std::cerr << "error [" << e.kind() << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
