#pragma once

#include <array>
#include <string>
#include <vector>

#include "geomorse/common.hpp"
#include "geomorse/surface.hpp"

namespace geomorse {

// Closed polygonal curve on a surface. Immutable value type; operations
// return new curves. A point curve (all vertices within 1e-9 of each other)
// is a first-class degenerate state with zero length.
class DiscreteCurve {
 public:
  DiscreteCurve() = default;
  explicit DiscreteCurve(std::vector<Vec3> vertices);
  static DiscreteCurve point_curve(const Vec3& p);

  const std::vector<Vec3>& vertices() const { return verts_; }
  int resolution() const { return static_cast<int>(verts_.size()); }
  bool is_point() const { return is_point_; }
  const Vec3& vertex(int i) const {
    int n = resolution();
    return verts_[((i % n) + n) % n];
  }
  Vec3 centroid() const;

  // Rotates/reverses indexing to a canonical form: lexicographically smallest
  // vertex first, orientation making the vector area lexicographically
  // positive.
  DiscreteCurve canonical(const MetricSurface& surface) const;
  DiscreteCurve reversed() const;

 private:
  std::vector<Vec3> verts_;
  bool is_point_ = false;
};

// Weighted (point, tangent line) atoms representing a curve as a 1-varifold.
struct VarifoldAtom {
  Vec3 point;
  Vec3 line;  // unit tangent direction, canonicalized modulo sign
  double weight;
};

struct VarifoldSample {
  std::vector<VarifoldAtom> atoms;
  double total_mass() const;
};

// Sum of geodesic segment lengths: chords corrected through the projected
// midpoint, weighted by the conformal factor when an overlay is present.
double length(const DiscreteCurve& c, const MetricSurface& surface);
// Plain chordal length (no surface correction).
double chord_length(const DiscreteCurve& c);

// Per-segment corrected lengths in vertex order (segment i joins vertex i to
// i+1); sums exactly to length().
std::vector<double> segment_lengths(const DiscreteCurve& c,
                                    const MetricSurface& surface);

// Signed discrete geodesic curvature per vertex, in the effective metric.
// Sign convention: positive when the curve bends toward normal x tangent.
std::vector<double> geodesic_curvature(const DiscreteCurve& c,
                                       const MetricSurface& surface);

// True iff no two non-adjacent segments come within 1e-8 of intersecting.
bool is_embedded(const DiscreteCurve& c);

// Arclength-uniform resampling to n vertices (n >= 16).
DiscreteCurve resample(const DiscreteCurve& c, const MetricSurface& surface,
                       int n);

// One atom per segment at its projected midpoint, chord direction, segment
// length as weight. Total mass equals length() exactly.
VarifoldSample to_varifold(const DiscreteCurve& c,
                           const MetricSurface& surface);

// The three coordinate-plane sections of an ellipsoid, arclength-uniform at
// resolution n, ordered by length ascending (ties by plane normal
// lexicographic order).
std::array<DiscreteCurve, 3> principal_ellipses(const MetricSurface& surface,
                                                int n);

// Curve CSV: header `idx,x,y,z`, 17 significant digits, closed implicitly.
std::string curve_to_csv(const DiscreteCurve& c);
DiscreteCurve curve_from_csv(const std::string& text);
void write_curve_csv(const DiscreteCurve& c, const std::string& path);
DiscreteCurve read_curve_csv(const std::string& path);

}  // namespace geomorse
