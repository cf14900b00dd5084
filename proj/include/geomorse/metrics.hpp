#pragma once

#include <string>
#include <vector>

#include "geomorse/common.hpp"
#include "geomorse/curve.hpp"
#include "geomorse/surface.hpp"

namespace geomorse {

// Two-sided estimate of the varifold F-distance. `lower` comes from a finite
// dictionary of certified admissible test functions (|f| <= 1, Lip(f) <= 1);
// `upper` from an explicit transport coupling plus the mass gap. The exact
// value is never claimed; downstream bounds state which side they consume.
struct FBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::string method;  // "assignment" | "greedy" | "mass-gap"
  int atoms_v = 0;
  int atoms_w = 0;
  std::string to_json_string() const;
};

// Symmetric Hausdorff distance between vertex samples with intrinsic surface
// distance; accuracy bounded by the sampling density.
double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b,
                          const MetricSurface& surface);
double hausdorff_points(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                        const MetricSurface& surface);

FBracket f_distance(const VarifoldSample& v, const VarifoldSample& w,
                    const MetricSurface& surface);

// Property gate: true when (upper(F) < h^2/10 implies Hausdorff < h) holds
// for this pair; vacuously true when the premise fails. Checked, not assumed.
bool check_f_to_hausdorff(const VarifoldSample& v, const VarifoldSample& w,
                          const MetricSurface& surface, double h);

// Ground distance on the Grassmannian bundle (declared convention):
// surface distance plus the angle between m and the normal-aligned transport
// of l, angles in [0, pi/2].
double grassmann_distance(const MetricSurface& surface, const Vec3& x,
                          const Vec3& l, const Vec3& y, const Vec3& m);

}  // namespace geomorse
