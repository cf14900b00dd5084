#include "geomorse/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geomorse {

const char* flow_status_name(FlowStatus s) {
  switch (s) {
    case FlowStatus::running: return "running";
    case FlowStatus::converged_geodesic: return "converged_geodesic";
    case FlowStatus::converged_point: return "converged_point";
    case FlowStatus::step_limit: return "step_limit";
  }
  return "unknown";
}

namespace {

double min_spacing(const DiscreteCurve& c) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < c.resolution(); ++i)
    m = std::min(m, (c.vertex(i + 1) - c.vertex(i)).norm());
  return m;
}

// Solves the periodic tridiagonal system M x = r where row i couples
// (i-1, i, i+1) with coefficients (a_i, b_i, c_i), via Sherman-Morrison.
void solve_periodic_tridiag(const std::vector<double>& a,
                            const std::vector<double>& b,
                            const std::vector<double>& c,
                            std::vector<double>& r) {
  int n = int(b.size());
  // Sherman-Morrison: fold the wrap-around entries a_0 (col n-1) and
  // c_{n-1} (col 0) into a rank-one correction.
  double alpha = a[0], beta = c[n - 1];
  double gamma = -b[0];
  std::vector<double> bb(b);
  bb[0] -= gamma;
  bb[n - 1] -= alpha * beta / gamma;
  std::vector<double> z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = beta;
  std::vector<double> x(r);
  auto thomas = [&](std::vector<double> bbm, std::vector<double>& y) {
    for (int i = 1; i < n; ++i) {
      double w = a[i] / bbm[i - 1];
      bbm[i] -= w * c[i - 1];
      y[i] -= w * y[i - 1];
    }
    y[n - 1] /= bbm[n - 1];
    for (int i = n - 2; i >= 0; --i) y[i] = (y[i] - c[i] * y[i + 1]) / bbm[i];
  };
  thomas(bb, x);
  thomas(bb, z);
  double vx = x[0] + alpha / gamma * x[n - 1];
  double vz = z[0] + alpha / gamma * z[n - 1];
  double factor = vx / (1.0 + vz);
  for (int i = 0; i < n; ++i) r[i] = x[i] - factor * z[i];
}

}  // namespace

FlowState make_flow_state(const DiscreteCurve& c,
                          const MetricSurface& surface) {
  FlowState s;
  s.curve = c;
  double len = length(c, surface);
  s.length_history.push_back({0.0, len});
  s.plateau_length = len;
  if (!c.is_point()) {
    auto kap = geodesic_curvature(c, surface);
    for (double k : kap) s.max_curvature = std::max(s.max_curvature, std::abs(k));
  }
  return s;
}

FlowState csf_step(const FlowState& s, const MetricSurface& surface,
                   double dt) {
  if (s.status != FlowStatus::running)
    fail("constraint-violation", "csf_step on a non-running state");
  const DiscreteCurve& c = s.curve;
  int n = c.resolution();
  double msp = min_spacing(c);
  if (dt > 0.4 * msp * msp * (1.0 + 1e-12))
    fail("step-size", "dt above the 0.4*(min spacing)^2 stability bound");

  // Backward (implicit) tangential diffusion of the ambient coordinates.
  std::vector<double> sub(n), diag(n), sup(n);
  std::vector<double> rx(n), ry(n), rz(n);
  for (int i = 0; i < n; ++i) {
    double h1 = (c.vertex(i) - c.vertex(i - 1)).norm();
    double h2 = (c.vertex(i + 1) - c.vertex(i)).norm();
    double al = 2.0 / (h1 * (h1 + h2));
    double be = 2.0 / (h2 * (h1 + h2));
    sub[i] = -dt * al;
    sup[i] = -dt * be;
    diag[i] = 1.0 + dt * (al + be);
    Vec3 v = c.vertex(i);
    // Explicit conformal correction: in the overlay metric the ambient flow
    // velocity is e^{-2phi}(kappa - dphi/dnu) nu instead of kappa nu.
    const auto* bump = surface.overlay().get();
    if (bump && bump->contains(v)) {
      Vec3 nrm = surface.normal(v);
      Vec3 tan = (c.vertex(i + 1) - c.vertex(i - 1)).normalized();
      tan = (tan - nrm * nrm.dot(tan)).normalized();
      Vec3 conormal = nrm.cross(tan);
      Vec3 acc = 2.0 / (h1 + h2) *
                 ((c.vertex(i + 1) - v) / h2 - (v - c.vertex(i - 1)) / h1);
      double kg = acc.dot(conormal);
      double ph = bump->phi_at(v);
      double dph = bump->directional_derivative(v, conormal);
      double corr = std::exp(-2.0 * ph) * (kg - dph) - kg;
      v += dt * corr * conormal;
    }
    rx[i] = v.x();
    ry[i] = v.y();
    rz[i] = v.z();
  }
  solve_periodic_tridiag(sub, diag, sup, rx);
  solve_periodic_tridiag(sub, diag, sup, ry);
  solve_periodic_tridiag(sub, diag, sup, rz);

  std::vector<Vec3> moved(n);
  for (int i = 0; i < n; ++i)
    moved[i] = surface.project(Vec3(rx[i], ry[i], rz[i]));

  FlowState out;
  out.curve = DiscreteCurve(std::move(moved));
  out.time = s.time + dt;
  out.step_count = s.step_count + 1;
  out.length_history = s.length_history;
  out.status = FlowStatus::running;

  // Resample when the spacing drifts off uniform.
  {
    double mean = chord_length(out.curve) / n;
    double lo = min_spacing(out.curve);
    double hi = 0.0;
    for (int i = 0; i < n; ++i)
      hi = std::max(hi, (out.curve.vertex(i + 1) - out.curve.vertex(i)).norm());
    if (lo < 0.7 * mean || hi > 1.4 * mean)
      out.curve = resample(out.curve, surface, n);
  }

  double len = length(out.curve, surface);
  out.length_history.push_back({out.time, len});
  out.max_curvature = 0.0;
  if (!out.curve.is_point()) {
    auto kap = geodesic_curvature(out.curve, surface);
    for (double k : kap)
      out.max_curvature = std::max(out.max_curvature, std::abs(k));
  }
  // Full self-intersection scans are O(n^2); run them periodically (and on
  // small curves every step).
  if ((n <= 128 || out.step_count % 100 == 0) && !is_embedded(out.curve))
    fail("embeddedness-loss",
         "discrete self-intersection after step " +
             std::to_string(out.step_count));

  double prev = s.plateau_length;
  out.plateau_length = len;
  out.plateau_steps = (std::abs(len - prev) < 1e-10) ? s.plateau_steps + 1 : 0;
  return out;
}

FlowState evolve(const DiscreteCurve& c, const MetricSurface& surface,
                 const FlowBudget& budget) {
  FlowState s = make_flow_state(c, surface);
  if (c.is_point()) {
    s.status = FlowStatus::converged_point;
    return s;
  }
  // Geodesics of positive index are unstable fixed points: curvature decays,
  // then the unstable Jacobi mode regrows from roundoff. Converge as soon as
  // the curvature sup stays below tolerance for a full window with the length
  // drifting less than plateau_tol net over that window; waiting longer loses
  // the geodesic again.
  long quiet = 0;
  double quiet_len = 0.0;
  while (s.status == FlowStatus::running) {
    double msp = min_spacing(s.curve);
    double dt = budget.dt > 0 ? std::min(budget.dt, 0.4 * msp * msp)
                              : 0.35 * msp * msp;
    FlowState next = csf_step(s, surface, dt);
    if (!budget.history && next.length_history.size() > 2) {
      // Keep first and latest entries only to bound memory on long runs.
      auto last = next.length_history.back();
      next.length_history = {next.length_history.front(), last};
    }
    s = std::move(next);
    double len = s.length_history.back().second;
    if (len < budget.point_threshold) {
      Vec3 p = surface.project(s.curve.centroid());
      s.curve = DiscreteCurve::point_curve(p);
      s.status = FlowStatus::converged_point;
      break;
    }
    if (s.max_curvature < budget.curvature_tol) {
      if (quiet == 0) quiet_len = len;
      ++quiet;
      s.plateau_steps = quiet;
      s.plateau_length = quiet_len;
      if (quiet >= budget.plateau_window &&
          std::abs(len - quiet_len) < budget.plateau_tol) {
        s.status = FlowStatus::converged_geodesic;
        break;
      }
      if (quiet >= budget.plateau_window) quiet = 0;  // drifting: rearm
    } else {
      quiet = 0;
    }
    if (s.time >= budget.t_max || s.step_count >= budget.max_steps) {
      s.status = FlowStatus::step_limit;
      break;
    }
  }
  return s;
}

std::vector<FlowState> tighten_family(const std::vector<DiscreteCurve>& family,
                                      const MetricSurface& surface,
                                      double t_target,
                                      const FlowBudget& budget) {
  std::vector<FlowState> out;
  out.reserve(family.size());
  for (size_t idx = 0; idx < family.size(); ++idx) {
    const auto& member = family[idx];
    if (member.is_point()) {
      FlowState s = make_flow_state(member, surface);
      s.status = FlowStatus::converged_point;
      out.push_back(std::move(s));
      continue;
    }
    FlowBudget b = budget;
    b.t_max = t_target;
    try {
      out.push_back(evolve(member, surface, b));
    } catch (const Error& e) {
      fail(e.kind(), "family member " + std::to_string(idx) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace geomorse
