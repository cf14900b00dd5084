#include "geomorse/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "geomorse/flow.hpp"
#include "geomorse/metrics.hpp"

namespace geomorse {

namespace {

int count_at(const std::map<int, int>& counts, int k) {
  auto it = counts.find(k);
  return it == counts.end() ? 0 : it->second;
}

// Plane section n.p = d through the ellipsoid, sampled as a closed curve
// (same scaled-space construction the sweepouts use).
DiscreteCurve plane_section(const MetricSurface& s, const Vec3& normal,
                            double frac, int n) {
  const Vec3& ax = s.semi_axes();
  Vec3 m(ax.x() * normal.x(), ax.y() * normal.y(), ax.z() * normal.z());
  double mu = m.norm();
  double rho = std::sqrt(std::max(0.0, 1.0 - frac * frac));
  Vec3 center = m * (frac / mu);
  Vec3 e1 = m.unitOrthogonal();
  Vec3 e2 = m.normalized().cross(e1);
  std::vector<Vec3> v(n);
  for (int t = 0; t < n; ++t) {
    double th = 2.0 * kPi * t / n;
    Vec3 u = center + rho * (std::cos(th) * e1 + std::sin(th) * e2);
    v[t] = s.project(Vec3(ax.x() * u.x(), ax.y() * u.y(), ax.z() * u.z()));
  }
  return resample(DiscreteCurve(std::move(v)), s, n);
}

}  // namespace

std::string GeodesicCatalog::to_csv() const {
  std::ostringstream os;
  os << "length,index,nullity,provenance\n";
  char buf[64];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, "%.17g", e.length);
    os << buf << "," << e.index << "," << e.nullity << "," << e.provenance
       << "\n";
  }
  return os.str();
}

GeodesicCatalog make_catalog(const MetricSurface& surface,
                             const std::vector<GeodesicRun>& runs, double a,
                             double threshold) {
  GeodesicCatalog cat;
  cat.cutoff = a;
  cat.dedup_threshold = threshold;

  struct Cand {
    CatalogEntry entry;
    VarifoldSample vf;  // coarse resample for dedup comparisons
  };
  std::vector<Cand> cands;
  for (size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    if (r.curve.is_point()) continue;  // folded into the canonical point entry
    auto kap = geodesic_curvature(r.curve, surface);
    double sup = 0.0;
    for (double k : kap) sup = std::max(sup, std::abs(k));
    if (sup > 1e-6)
      fail("core-not-geodesic",
           "catalog run " + std::to_string(i) + " is not a geodesic (sup " +
               std::to_string(sup) + ")");
    double len = length(r.curve, surface);
    if (len >= a) continue;
    Cand c;
    c.entry = {r.curve.canonical(surface), len, r.spectrum.index,
               r.spectrum.nullity, r.provenance};
    c.vf = to_varifold(resample(r.curve, surface, 64), surface);
    cands.push_back(std::move(c));
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    return x.entry.length < y.entry.length;
  });

  // Ascending-length greedy dedup: a candidate within threshold (in F-upper)
  // of an accepted entry is a duplicate of it, and the accepted one is the
  // shorter representative. The mass gap lower-bounds F, so candidates whose
  // lengths differ by at least the threshold are distinct without an
  // F evaluation.
  std::vector<Cand> kept;
  for (auto& c : cands) {
    bool dup = false;
    for (const auto& k : kept) {
      if (c.entry.length - k.entry.length >= threshold) continue;
      FBracket f = f_distance(c.vf, k.vf, surface);
      if (f.upper < threshold) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(std::move(c));
  }

  CatalogEntry point;
  point.curve = DiscreteCurve::point_curve(
      surface.project(Vec3(surface.semi_axes().x(), 0, 0)));
  point.length = 0.0;
  point.index = 0;
  point.nullity = 0;
  point.provenance = "point";
  cat.entries.push_back(std::move(point));
  for (auto& k : kept) cat.entries.push_back(std::move(k.entry));
  return cat;
}

std::map<int, int> morse_counts(const GeodesicCatalog& cat) {
  std::map<int, int> counts;
  for (const auto& e : cat.entries) ++counts[e.index];
  return counts;
}

bool MorseReport::all_pass() const {
  for (int r = 0; r < 4; ++r)
    if (!strong_pass[r] || !weak_pass[r]) return false;
  return true;
}

std::string MorseReport::to_json_string() const {
  nlohmann::json j;
  nlohmann::json c = nlohmann::json::object();
  for (const auto& [k, v] : counts) c[std::to_string(k)] = v;
  j["counts"] = c;
  j["betti"] = betti;
  j["strong_pass"] = strong_pass;
  j["weak_pass"] = weak_pass;
  j["all_pass"] = all_pass();
  return j.dump();
}

MorseReport check_inequalities(const std::map<int, int>& counts,
                               const std::array<int, 4>& betti) {
  MorseReport rep;
  rep.counts = counts;
  rep.betti = betti;
  for (int r = 0; r < 4; ++r) {
    int sc = 0, sb = 0, sign = 1;
    for (int k = r; k >= 0; --k) {
      sc += sign * count_at(counts, k);
      sb += sign * betti[k];
      sign = -sign;
    }
    rep.strong_pass[r] = sc >= sb;
    rep.weak_pass[r] = count_at(counts, r) >= betti[r];
  }
  return rep;
}

PipelineConfig PipelineConfig::from_json_string(const std::string& s) {
  nlohmann::json j = nlohmann::json::parse(s);
  PipelineConfig c;
  if (j.contains("surface"))
    c.surface = MetricSurface::from_json_string(j["surface"].dump());
  c.lattice = j.value("lattice", c.lattice);
  c.curve_resolution = j.value("curve_resolution", c.curve_resolution);
  c.refine_resolution = j.value("refine_resolution", c.refine_resolution);
  c.t_target = j.value("t_target", c.t_target);
  c.random_seeds = j.value("random_seeds", c.random_seeds);
  c.seed = j.value("seed", c.seed);
  if (j.contains("betti")) {
    auto b = j["betti"].get<std::vector<int>>();
    if (b.size() != 4) fail("constraint-violation", "betti must have 4 entries");
    std::copy(b.begin(), b.end(), c.betti.begin());
  }
  c.cutoff = j.value("cutoff", c.cutoff);
  c.dedup_threshold = j.value("dedup_threshold", c.dedup_threshold);
  return c;
}

std::string PipelineConfig::to_json_string() const {
  nlohmann::json j;
  j["surface"] = nlohmann::json::parse(surface.to_json_string());
  j["lattice"] = lattice;
  j["curve_resolution"] = curve_resolution;
  j["refine_resolution"] = refine_resolution;
  j["t_target"] = t_target;
  j["random_seeds"] = random_seeds;
  j["seed"] = seed;
  j["betti"] = betti;
  j["cutoff"] = cutoff;
  j["dedup_threshold"] = dedup_threshold;
  return j.dump();
}

std::string PipelineResult::to_json_string() const {
  nlohmann::json j;
  j["report"] = nlohmann::json::parse(report.to_json_string());
  nlohmann::json ws = nlohmann::json::array();
  for (const auto& w : widths)
    ws.push_back(nlohmann::json::parse(w.to_json_string()));
  j["widths"] = ws;
  nlohmann::json es = nlohmann::json::array();
  for (const auto& e : catalog.entries) {
    nlohmann::json je;
    je["length"] = e.length;
    je["index"] = e.index;
    je["nullity"] = e.nullity;
    je["provenance"] = e.provenance;
    es.push_back(je);
  }
  j["catalog"] = es;
  j["cutoff"] = catalog.cutoff;
  j["dedup_threshold"] = catalog.dedup_threshold;
  j["non_bumpy"] = non_bumpy;
  j["warnings"] = warnings;
  return j.dump();
}

PipelineResult run_morse_pipeline(const PipelineConfig& config,
                                  const std::string& out_dir) {
  PipelineResult res;
  std::vector<GeodesicRun> runs;

  WidthBudget wb;
  wb.t_target = config.t_target;
  wb.refine_resolution = config.refine_resolution;
  for (int mode = 1; mode <= 3; ++mode) {
    std::string tag = "mode-" + std::to_string(mode);
    try {
      Sweepout sw = plane_sweepout(config.surface, mode, config.lattice,
                                   config.curve_resolution);
      WidthEstimate w = width_estimate(sw, config.surface, wb);
      res.widths.push_back(w);
      if (w.limit_status != FlowStatus::converged_geodesic) {
        res.warnings.push_back(tag + ": limit not a geodesic (" +
                               flow_status_name(w.limit_status) + ")");
        continue;
      }
      JacobiSpectrum spec = stability_spectrum(w.limit_curve, config.surface, 8);
      runs.push_back({w.limit_curve, spec, tag});
    } catch (const Error& err) {
      fail(err.kind(), tag + ": " + err.what());
    }
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> off(-0.8, 0.8);
  FlowBudget fb;
  fb.t_max = config.t_target;
  for (int i = 0; i < config.random_seeds; ++i) {
    std::string tag = "random-" + std::to_string(i);
    Vec3 n(gauss(rng), gauss(rng), gauss(rng));
    double frac = off(rng);
    if (n.norm() < 1e-6) continue;
    n.normalize();
    try {
      DiscreteCurve start =
          plane_section(config.surface, n, frac, config.curve_resolution);
      FlowState st = evolve(start, config.surface, fb);
      if (st.status != FlowStatus::converged_geodesic) continue;
      DiscreteCurve fine =
          resample(st.curve, config.surface, config.refine_resolution);
      FlowBudget polish = fb;
      polish.t_max = 2.0;
      FlowState fst = evolve(fine, config.surface, polish);
      if (fst.status != FlowStatus::converged_geodesic) continue;
      JacobiSpectrum spec = stability_spectrum(fst.curve, config.surface, 8);
      runs.push_back({fst.curve, spec, tag});
    } catch (const Error& err) {
      res.warnings.push_back(tag + ": " + std::string(err.what()));
    }
  }

  res.catalog = make_catalog(config.surface, runs, config.cutoff,
                             config.dedup_threshold);
  for (const auto& e : res.catalog.entries)
    if (e.nullity > 0) res.non_bumpy = true;
  if (res.non_bumpy)
    res.warnings.push_back(
        "surface is not bumpy: a geodesic has positive nullity, counts may "
        "collapse continuous families");
  res.report = check_inequalities(morse_counts(res.catalog), config.betti);

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    for (size_t i = 0; i < res.widths.size(); ++i) {
      std::ofstream f(fs::path(out_dir) /
                      ("width_mode" + std::to_string(i + 1) + ".json"));
      f << res.widths[i].to_json_string() << "\n";
    }
    int gi = 0;
    for (const auto& e : res.catalog.entries) {
      if (e.curve.is_point()) continue;
      write_curve_csv(e.curve,
                      (fs::path(out_dir) /
                       ("geodesic_" + std::to_string(gi++) + ".csv"))
                          .string());
    }
    {
      std::ofstream f(fs::path(out_dir) / "catalog.csv");
      f << res.catalog.to_csv();
    }
    {
      nlohmann::json j = nlohmann::json::parse(res.to_json_string());
      j["config"] = nlohmann::json::parse(config.to_json_string());
      std::ofstream f(fs::path(out_dir) / "report.json");
      f << j.dump(2) << "\n";
    }
  }
  return res;
}

}  // namespace geomorse
