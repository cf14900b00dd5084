#pragma once

#include <map>
#include <string>
#include <vector>

#include "geomorse/curve.hpp"
#include "geomorse/minmax.hpp"
#include "geomorse/spectrum.hpp"
#include "geomorse/surface.hpp"

namespace geomorse {

struct GeodesicRun {
  DiscreteCurve curve;
  JacobiSpectrum spectrum;
  std::string provenance;
};

struct CatalogEntry {
  DiscreteCurve curve;
  double length = 0.0;
  int index = 0;
  int nullity = 0;
  std::string provenance;
};

// Deduplicated list of closed geodesics below the length cutoff, plus the
// canonical point-curve entry (length 0, index 0). Distinct entries are kept
// F-upper-separated by the dedup threshold.
struct GeodesicCatalog {
  std::vector<CatalogEntry> entries;  // sorted by length, point curve first
  double cutoff = 0.0;
  double dedup_threshold = 1e-2;
  std::string to_csv() const;  // length,index,nullity,provenance
};

GeodesicCatalog make_catalog(const MetricSurface& surface,
                             const std::vector<GeodesicRun>& runs, double a,
                             double threshold = 1e-2);

// c_k(a): geodesics in the catalog with stability index k.
std::map<int, int> morse_counts(const GeodesicCatalog& cat);

struct MorseReport {
  std::map<int, int> counts;
  std::array<int, 4> betti{1, 1, 1, 1};
  std::array<bool, 4> strong_pass{};  // alternating-sum inequality at r
  std::array<bool, 4> weak_pass{};    // c_r >= b_r
  bool all_pass() const;
  std::string to_json_string() const;
};

MorseReport check_inequalities(const std::map<int, int>& counts,
                               const std::array<int, 4>& betti);

struct PipelineConfig {
  MetricSurface surface{MetricSurface::round_sphere(1.0)};
  int lattice = 16;            // plane-family lattice size per mode
  int curve_resolution = 64;   // flow resolution for family members
  int refine_resolution = 256; // final geodesic resolution
  double t_target = 30.0;
  int random_seeds = 8;        // extra random-plane flow starts
  unsigned long long seed = 1;
  std::array<int, 4> betti{1, 1, 1, 1};
  double cutoff = 10.0;
  double dedup_threshold = 1e-2;
  static PipelineConfig from_json_string(const std::string& s);
  std::string to_json_string() const;
};

struct PipelineResult {
  GeodesicCatalog catalog;
  MorseReport report;
  std::vector<WidthEstimate> widths;  // modes 1..3
  bool non_bumpy = false;             // a geodesic had positive nullity
  std::vector<std::string> warnings;
  std::string to_json_string() const;
};

// Runs plane sweepouts for modes 1-3 plus random flow starts, computes the
// spectra, assembles the catalog and the inequality report, and (when out_dir
// is nonempty) writes report.json, catalog.csv, per-geodesic curve CSVs and
// width traces. Deterministic for a fixed config.
PipelineResult run_morse_pipeline(const PipelineConfig& config,
                                  const std::string& out_dir = "");

}  // namespace geomorse
