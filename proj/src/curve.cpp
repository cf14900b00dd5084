#include "geomorse/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace geomorse {

DiscreteCurve::DiscreteCurve(std::vector<Vec3> vertices)
    : verts_(std::move(vertices)) {
  if (verts_.empty()) fail("degenerate-curve", "curve needs vertices");
  Vec3 c = Vec3::Zero();
  for (const auto& v : verts_) c += v;
  c /= double(verts_.size());
  is_point_ = true;
  for (const auto& v : verts_) {
    if ((v - c).norm() > 1e-9) {
      is_point_ = false;
      break;
    }
  }
}

DiscreteCurve DiscreteCurve::point_curve(const Vec3& p) {
  return DiscreteCurve(std::vector<Vec3>{p});
}

Vec3 DiscreteCurve::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& v : verts_) c += v;
  return c / double(verts_.size());
}

DiscreteCurve DiscreteCurve::reversed() const {
  std::vector<Vec3> v(verts_.rbegin(), verts_.rend());
  return DiscreteCurve(std::move(v));
}

DiscreteCurve DiscreteCurve::canonical(const MetricSurface& surface) const {
  if (is_point_) return *this;
  int n = resolution();
  Vec3 area = Vec3::Zero();
  for (int i = 0; i < n; ++i) area += verts_[i].cross(vertex(i + 1));
  // Orient by the vector area's first significant component: deterministic,
  // and well defined even when the curve encircles the origin (where a
  // centroid-based rule degenerates).
  bool flip = false;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(area[k]) > 1e-12) {
      flip = area[k] < 0;
      break;
    }
  }
  DiscreteCurve oriented = flip ? reversed() : *this;
  (void)surface;
  auto lex_less = [](const Vec3& a, const Vec3& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
  };
  int start = 0;
  for (int i = 1; i < n; ++i)
    if (lex_less(oriented.verts_[i], oriented.verts_[start])) start = i;
  std::vector<Vec3> rot(n);
  for (int i = 0; i < n; ++i) rot[i] = oriented.vertex(start + i);
  return DiscreteCurve(std::move(rot));
}

double VarifoldSample::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.weight;
  return m;
}

std::vector<double> segment_lengths(const DiscreteCurve& c,
                                    const MetricSurface& surface) {
  if (c.is_point()) return {};
  int n = c.resolution();
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const Vec3& a = c.vertex(i);
    const Vec3& b = c.vertex(i + 1);
    Vec3 m = surface.project(0.5 * (a + b));
    out[i] = ((m - a).norm() + (b - m).norm()) * surface.length_weight(m);
  }
  return out;
}

double length(const DiscreteCurve& c, const MetricSurface& surface) {
  double len = 0.0;
  for (double s : segment_lengths(c, surface)) len += s;
  return len;
}

double chord_length(const DiscreteCurve& c) {
  if (c.is_point()) return 0.0;
  double len = 0.0;
  for (int i = 0; i < c.resolution(); ++i)
    len += (c.vertex(i + 1) - c.vertex(i)).norm();
  return len;
}

std::vector<double> geodesic_curvature(const DiscreteCurve& c,
                                       const MetricSurface& surface) {
  if (c.is_point()) fail("degenerate-curve", "curvature of a point curve");
  int n = c.resolution();
  if (n < 16) fail("resolution", "need at least 16 vertices");
  std::vector<double> out(n);
  const auto* bump = surface.overlay().get();
  for (int i = 0; i < n; ++i) {
    const Vec3& pm = c.vertex(i - 1);
    const Vec3& p0 = c.vertex(i);
    const Vec3& pp = c.vertex(i + 1);
    double h1 = (p0 - pm).norm();
    double h2 = (pp - p0).norm();
    if (h1 < 1e-14 || h2 < 1e-14)
      fail("degenerate-curve", "coincident consecutive vertices");
    // Second derivative with respect to arclength on a nonuniform stencil.
    Vec3 acc = 2.0 / (h1 + h2) * ((pp - p0) / h2 - (p0 - pm) / h1);
    Vec3 nrm = surface.normal(p0);
    Vec3 tan = (pp - pm).normalized();
    tan = (tan - nrm * nrm.dot(tan)).normalized();
    Vec3 conormal = nrm.cross(tan);
    double kg = acc.dot(conormal);
    if (bump && bump->contains(p0)) {
      double ph = bump->phi_at(p0);
      kg = std::exp(-ph) * (kg - bump->directional_derivative(p0, conormal));
    }
    out[i] = kg;
  }
  return out;
}

namespace {

// Minimum distance between segments [a0,a1] and [b0,b1].
double segment_distance(const Vec3& a0, const Vec3& a1, const Vec3& b0,
                        const Vec3& b1) {
  Vec3 u = a1 - a0, v = b1 - b0, w = a0 - b0;
  double A = u.dot(u), B = u.dot(v), C = v.dot(v), D = u.dot(w), E = v.dot(w);
  double den = A * C - B * B;
  double s, t;
  if (den < 1e-18 * A * C + 1e-30) {
    s = 0.0;
    t = (C > 0) ? E / C : 0.0;
  } else {
    s = (B * E - C * D) / den;
    t = (A * E - B * D) / den;
  }
  s = std::clamp(s, 0.0, 1.0);
  t = std::clamp(t, 0.0, 1.0);
  // One clamp round-trip to refine the constrained minimizer.
  if (A > 0) s = std::clamp((B * t - D) / A, 0.0, 1.0);
  if (C > 0) t = std::clamp((B * s + E) / C, 0.0, 1.0);
  return (a0 + s * u - (b0 + t * v)).norm();
}

}  // namespace

bool is_embedded(const DiscreteCurve& c) {
  if (c.is_point()) return true;
  int n = c.resolution();
  // Scale-aware touch tolerance: on a curve collapsing towards a point the
  // non-adjacent segments legitimately come within the absolute tolerance,
  // while genuine crossings sit at distance zero at every scale.
  const double tol = std::min(1e-8, 1e-3 * chord_length(c) / n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // cyclically adjacent
      double d = segment_distance(c.vertex(i), c.vertex(i + 1), c.vertex(j),
                                  c.vertex(j + 1));
      if (d < tol) return false;
    }
  }
  return true;
}

DiscreteCurve resample(const DiscreteCurve& c, const MetricSurface& surface,
                       int n) {
  if (n < 16) fail("resolution", "resample target below 16");
  if (c.is_point()) return c;
  int m = c.resolution();
  auto seg = segment_lengths(c, surface);
  std::vector<double> cum(m + 1, 0.0);
  for (int i = 0; i < m; ++i) cum[i + 1] = cum[i] + seg[i];
  double total = cum[m];
  if (total < 1e-12) return DiscreteCurve::point_curve(c.vertex(0));
  std::vector<Vec3> out(n);
  int j = 0;
  for (int i = 0; i < n; ++i) {
    double target = total * double(i) / n;
    while (j + 1 <= m && cum[j + 1] < target) ++j;
    double t = (seg[j] > 0) ? (target - cum[j]) / seg[j] : 0.0;
    if (t < 1e-15) {
      out[i] = c.vertex(j);  // exact vertex hit keeps resampling a fixed point
    } else {
      out[i] = surface.project((1.0 - t) * c.vertex(j) + t * c.vertex(j + 1));
    }
  }
  return DiscreteCurve(std::move(out));
}

VarifoldSample to_varifold(const DiscreteCurve& c,
                           const MetricSurface& surface) {
  VarifoldSample s;
  if (c.is_point()) return s;
  int n = c.resolution();
  auto seg = segment_lengths(c, surface);
  s.atoms.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Vec3& a = c.vertex(i);
    const Vec3& b = c.vertex(i + 1);
    Vec3 mid = surface.project(0.5 * (a + b));
    Vec3 dir = (b - a).normalized();
    // Canonicalize modulo sign: first nonzero coordinate positive.
    if (dir.x() < 0 || (dir.x() == 0 && (dir.y() < 0 || (dir.y() == 0 && dir.z() < 0))))
      dir = -dir;
    s.atoms.push_back({mid, dir, seg[i]});
  }
  return s;
}

std::array<DiscreteCurve, 3> principal_ellipses(const MetricSurface& surface,
                                                int n) {
  if (surface.kind() == SurfaceKind::ConformalOverlay)
    fail("unsupported-kind", "principal ellipses of an overlay surface");
  const Vec3& ax = surface.semi_axes();
  struct Section {
    Vec3 plane_normal;
    DiscreteCurve curve;
    double len;
  };
  std::vector<Section> secs;
  for (int k = 0; k < 3; ++k) {
    // Plane normal = axis k; the section uses the other two semi-axes.
    int i = (k + 1) % 3, j = (k + 2) % 3;
    std::vector<Vec3> v(n);
    for (int s = 0; s < n; ++s) {
      double th = 2.0 * kPi * s / n;
      Vec3 p = Vec3::Zero();
      p[i] = ax[i] * std::cos(th);
      p[j] = ax[j] * std::sin(th);
      v[s] = p;
    }
    DiscreteCurve c = resample(DiscreteCurve(std::move(v)), surface, n);
    Vec3 nrm = Vec3::Zero();
    nrm[k] = 1.0;
    secs.push_back({nrm, c, length(c, surface)});
  }
  std::stable_sort(secs.begin(), secs.end(), [](const Section& a,
                                                const Section& b) {
    if (std::abs(a.len - b.len) > 1e-12) return a.len < b.len;
    // Tie-break by plane normal lexicographic order.
    for (int i = 0; i < 3; ++i)
      if (a.plane_normal[i] != b.plane_normal[i])
        return a.plane_normal[i] < b.plane_normal[i];
    return false;
  });
  return {secs[0].curve, secs[1].curve, secs[2].curve};
}

std::string curve_to_csv(const DiscreteCurve& c) {
  std::ostringstream out;
  out << "idx,x,y,z\n";
  char buf[128];
  for (int i = 0; i < c.resolution(); ++i) {
    const Vec3& v = c.vertex(i);
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", i, v.x(), v.y(),
                  v.z());
    out << buf;
  }
  return out.str();
}

DiscreteCurve curve_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Vec3> verts;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("idx", 0) == 0) continue;
    }
    int idx;
    double x, y, z;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &idx, &x, &y, &z) != 4)
      fail("constraint-violation", "bad curve CSV row: " + line);
    verts.emplace_back(x, y, z);
  }
  if (verts.empty()) fail("degenerate-curve", "empty curve CSV");
  return DiscreteCurve(std::move(verts));
}

void write_curve_csv(const DiscreteCurve& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail("constraint-violation", "cannot open " + path);
  f << curve_to_csv(c);
}

DiscreteCurve read_curve_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("constraint-violation", "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return curve_from_csv(ss.str());
}

}  // namespace geomorse
