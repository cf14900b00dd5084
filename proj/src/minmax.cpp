#include "geomorse/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "geomorse/metrics.hpp"

namespace geomorse {

namespace {

// Orthonormal basis of the plane normal to m (deterministic).
void plane_basis(const Vec3& m, Vec3* e1, Vec3* e2) {
  *e1 = m.unitOrthogonal();
  *e2 = m.normalized().cross(*e1);
}

struct Section {
  bool is_point;
  Vec3 tangency;       // for point members
  Vec3 center, b1, b2; // scaled-space circle: u(t) = center + b1 cos + b2 sin
};

// Plane n.p = d meets the ellipsoid along a circle in the axis-scaled
// coordinates u = (x/a, y/b, z/c): the plane becomes m.u = d with
// m = (a n_x, b n_y, c n_z).
Section section_of_plane(const MetricSurface& s, const Vec3& normal, double d) {
  const Vec3& ax = s.semi_axes();
  Vec3 m(ax.x() * normal.x(), ax.y() * normal.y(), ax.z() * normal.z());
  double mu = m.norm();
  double frac = d / mu;
  Section out;
  if (std::abs(frac) >= 1.0 - 1e-12) {
    out.is_point = true;
    Vec3 u = m / mu * (frac > 0 ? 1.0 : -1.0);
    out.tangency = Vec3(ax.x() * u.x(), ax.y() * u.y(), ax.z() * u.z());
    return out;
  }
  out.is_point = false;
  double rho = std::sqrt(1.0 - frac * frac);
  out.center = m * (d / (mu * mu));
  Vec3 e1, e2;
  plane_basis(m, &e1, &e2);
  out.b1 = rho * e1;
  out.b2 = rho * e2;
  return out;
}

Vec3 unscale(const MetricSurface& s, const Vec3& u) {
  const Vec3& ax = s.semi_axes();
  return Vec3(ax.x() * u.x(), ax.y() * u.y(), ax.z() * u.z());
}

}  // namespace

long Sweepout::member_count() const {
  return long(dims_[0]) * dims_[1] * dims_[2];
}

Sweepout::Plane Sweepout::plane(const std::array<int, 3>& idx) const {
  Vec3 normal;
  int oi;  // offset lattice index and its extent
  int on;
  if (mode_ == 1) {
    normal = axis3_;
    oi = idx[0];
    on = dims_[0];
  } else if (mode_ == 2) {
    double th = kPi * idx[0] / dims_[0];
    normal = std::cos(th) * axis3_ + std::sin(th) * axis2_;
    oi = idx[1];
    on = dims_[1];
  } else {
    double al = (kPi / 2) * idx[0] / (dims_[0] - 1);
    double be = kPi * idx[1] / dims_[1];
    normal = std::sin(al) * (std::cos(be) * axis1_ + std::sin(be) * axis2_) +
             std::cos(al) * axis3_;
    oi = idx[2];
    on = dims_[2];
  }
  const Vec3& ax = surface_.semi_axes();
  Vec3 m(ax.x() * normal.x(), ax.y() * normal.y(), ax.z() * normal.z());
  double frac = on > 1 ? -1.0 + 2.0 * oi / (on - 1) : 0.0;
  return {normal, frac * m.norm()};
}

DiscreteCurve Sweepout::member(const std::array<int, 3>& idx) const {
  Plane pl = plane(idx);
  Section sec = section_of_plane(surface_, pl.normal, pl.offset);
  if (sec.is_point)
    return DiscreteCurve::point_curve(surface_.project(sec.tangency));
  std::vector<Vec3> v(n_);
  for (int t = 0; t < n_; ++t) {
    double th = 2.0 * kPi * t / n_;
    Vec3 u = sec.center + std::cos(th) * sec.b1 + std::sin(th) * sec.b2;
    v[t] = surface_.project(unscale(surface_, u));
  }
  return resample(DiscreteCurve(std::move(v)), surface_, n_);
}

double Sweepout::member_length(const std::array<int, 3>& idx) const {
  Plane pl = plane(idx);
  Section sec = section_of_plane(surface_, pl.normal, pl.offset);
  if (sec.is_point) return 0.0;
  const int q = 128;
  double len = 0.0;
  for (int t = 0; t < q; ++t) {
    double th = 2.0 * kPi * (t + 0.5) / q;
    Vec3 du = -std::sin(th) * sec.b1 + std::cos(th) * sec.b2;
    len += unscale(surface_, du).norm();
  }
  return len * 2.0 * kPi / q;
}

Sweepout plane_sweepout(const MetricSurface& surface, int mode, int resolution,
                        int curve_resolution) {
  if (surface.kind() == SurfaceKind::ConformalOverlay)
    fail("unsupported-kind", "plane sweepouts need a round or ellipsoid surface");
  if (mode < 1 || mode > 3) fail("constraint-violation", "mode must be 1..3");
  if (resolution < 3) fail("resolution", "lattice too small");
  Sweepout sw;
  sw.surface_ = surface;
  sw.mode_ = mode;
  sw.n_ = curve_resolution;
  // Frame sorted by semi-axis: axis1 shortest, axis3 longest. Offsets use an
  // odd count so the central plane is an exact lattice member.
  const Vec3& ax = surface.semi_axes();
  std::array<int, 3> ord{0, 1, 2};
  std::stable_sort(ord.begin(), ord.end(),
                   [&](int a, int b) { return ax[a] < ax[b]; });
  sw.axis1_ = Vec3::Unit(ord[0]);
  sw.axis2_ = Vec3::Unit(ord[1]);
  sw.axis3_ = Vec3::Unit(ord[2]);
  int odd = resolution | 1;
  if (mode == 1) {
    sw.dims_ = {odd, 1, 1};
    sw.descriptor_ = "planes normal to the longest axis";
  } else if (mode == 2) {
    sw.dims_ = {resolution, odd, 1};
    sw.descriptor_ =
        "plane normals rotating between the longest and middle axes, with "
        "offsets";
  } else {
    sw.dims_ = {resolution | 1, resolution, odd};
    sw.descriptor_ = "all plane directions (projective lattice) with offsets";
  }
  return sw;
}

std::string WidthEstimate::to_json_string() const {
  nlohmann::json j;
  j["value"] = value;
  j["parameter"] = parameter;
  j["tightening_time"] = tightening_time;
  j["limit_status"] = flow_status_name(limit_status);
  std::vector<std::vector<double>> hist;
  for (const auto& [t, l] : history) hist.push_back({t, l});
  j["history"] = hist;
  j["window"] = window;
  j["f_radius"] = f_radius;
  j["checked_slices"] = checked_slices;
  j["concentrated"] = concentrated;
  j["flowed_members"] = flowed_members;
  j["pruned_members"] = pruned_members;
  j["label"] = "tightened family width";
  return j.dump();
}

WidthEstimate width_estimate(const Sweepout& sw, const MetricSurface& surface,
                             const WidthBudget& budget) {
  struct Entry {
    std::array<int, 3> idx;
    double len;
  };
  std::vector<Entry> entries;
  entries.reserve(sw.member_count());
  for (int i = 0; i < sw.dims()[0]; ++i)
    for (int j = 0; j < sw.dims()[1]; ++j)
      for (int k = 0; k < sw.dims()[2]; ++k) {
        double l = sw.member_length({i, j, k});
        if (l > 0) entries.push_back({{i, j, k}, l});
      }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.len > b.len; });

  WidthEstimate out;
  double best = 0.0;
  FlowState best_state;
  bool have_best = false;
  FlowBudget fb = budget.flow;
  fb.t_max = budget.t_target;
  fb.history = true;
  for (const auto& e : entries) {
    // The flow only shortens curves: members starting below the best flowed
    // limit cannot attain the sup.
    if (have_best && e.len <= best + 1e-9) {
      ++out.pruned_members;
      continue;
    }
    FlowState st;
    try {
      st = evolve(sw.member(e.idx), surface, fb);
    } catch (const Error& err) {
      fail(err.kind(), "sweepout member (" + std::to_string(e.idx[0]) + "," +
                           std::to_string(e.idx[1]) + "," +
                           std::to_string(e.idx[2]) + "): " + err.what());
    }
    ++out.flowed_members;
    double lim = st.status == FlowStatus::converged_point
                     ? 0.0
                     : st.length_history.back().second;
    if (!have_best || lim > best) {
      best = lim;
      best_state = std::move(st);
      out.parameter = e.idx;
      have_best = true;
    }
  }
  if (!have_best)
    fail("degenerate-curve", "sweepout had no non-point members");

  // Refine the achieving slice at full resolution and let it settle.
  DiscreteCurve fine =
      resample(best_state.curve, surface, budget.refine_resolution);
  FlowBudget polish = budget.flow;
  polish.t_max = 2.0;
  polish.history = false;
  FlowState fine_state = evolve(fine, surface, polish);
  out.value = fine_state.length_history.back().second;
  out.limit_curve = fine_state.curve;
  out.limit_status = fine_state.status;
  out.tightening_time = best_state.time;
  out.history = best_state.length_history;

  // Near-maximal concentration: flow slices within the window and measure
  // their F-distance upper bound to the limit geodesic.
  out.window = budget.window;
  VarifoldSample limit_v =
      to_varifold(resample(out.limit_curve, surface, sw.resolution()), surface);
  int checked = 0, attempts = 0;
  for (const auto& e : entries) {
    if (checked >= budget.max_checked_slices ||
        attempts >= 4 * budget.max_checked_slices)
      break;
    if (e.len < out.value - budget.window) break;  // sorted descending
    if (e.idx == out.parameter) continue;
    ++attempts;
    FlowState st = evolve(sw.member(e.idx), surface, fb);
    if (st.status == FlowStatus::converged_point) continue;  // left the band
    double flowed_len = st.length_history.back().second;
    if (flowed_len < out.value - budget.window) continue;  // left the band
    ++checked;
    FBracket f = f_distance(to_varifold(st.curve, surface), limit_v, surface);
    out.f_radius = std::max(out.f_radius, f.upper);
  }
  out.checked_slices = checked;
  if (out.f_radius > 0.35) out.concentrated = false;
  return out;
}

std::pair<DiscreteCurve, JacobiSpectrum> minmax_geodesic(
    const Sweepout& sw, const MetricSurface& surface,
    const WidthBudget& budget) {
  WidthEstimate w = width_estimate(sw, surface, budget);
  if (w.limit_status != FlowStatus::converged_geodesic)
    fail("constraint-violation",
         std::string("unresolved min-max limit: ") +
             flow_status_name(w.limit_status));
  if (!is_embedded(w.limit_curve))
    fail("embeddedness-loss", "min-max limit lost embeddedness");
  JacobiSpectrum spec = stability_spectrum(w.limit_curve, surface, 8);
  return {w.limit_curve, spec};
}

}  // namespace geomorse
