#include "geomorse/fermi.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace geomorse {

namespace {

// State of one normal-geodesic fiber, integrated in the chart's normal
// coordinate: position/velocity of the base-embedding geodesic, the base
// normal distance y (dy/dw = e^{-phi} when an overlay rescales arclength),
// and the Jacobi width J with its derivative.
struct FiberState {
  Vec3 p, v;
  double y, J, Jy;
};

struct FiberODE {
  const MetricSurface& surface;        // effective (possibly overlay) surface
  const MetricSurface& base;           // embedding geometry
  const BumpFunction* bump = nullptr;  // non-null on overlay surfaces

  FiberState deriv(const FiberState& s) const {
    double ephi_inv = 1.0;
    if (bump) ephi_inv = std::exp(-bump->phi_of_y(s.y));
    // Geodesic of the implicit surface F = sum x_i^2/a_i^2 - 1 = 0:
    // acceleration is normal with magnitude -(v^T H v)/|grad F|^2.
    const Vec3& ax = base.semi_axes();
    Vec3 grad(2 * s.p.x() / (ax.x() * ax.x()), 2 * s.p.y() / (ax.y() * ax.y()),
              2 * s.p.z() / (ax.z() * ax.z()));
    double vhv = 2 * (s.v.x() * s.v.x() / (ax.x() * ax.x()) +
                      s.v.y() * s.v.y() / (ax.y() * ax.y()) +
                      s.v.z() * s.v.z() / (ax.z() * ax.z()));
    Vec3 acc = -(vhv / grad.squaredNorm()) * grad;
    double K = surface.gaussian_curvature(base.project(s.p));
    FiberState d;
    d.p = ephi_inv * s.v;
    d.v = ephi_inv * acc;
    d.y = ephi_inv;
    d.J = s.Jy;
    d.Jy = -K * s.J;
    return d;
  }

  FiberState rk4(const FiberState& s, double dw) const {
    auto add = [](const FiberState& a, const FiberState& b, double f) {
      FiberState r;
      r.p = a.p + f * b.p;
      r.v = a.v + f * b.v;
      r.y = a.y + f * b.y;
      r.J = a.J + f * b.J;
      r.Jy = a.Jy + f * b.Jy;
      return r;
    };
    FiberState k1 = deriv(s);
    FiberState k2 = deriv(add(s, k1, dw / 2));
    FiberState k3 = deriv(add(s, k2, dw / 2));
    FiberState k4 = deriv(add(s, k3, dw));
    FiberState r = s;
    r.p += dw / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
    r.v += dw / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
    r.y += dw / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
    r.J += dw / 6 * (k1.J + 2 * k2.J + 2 * k3.J + k4.J);
    r.Jy += dw / 6 * (k1.Jy + 2 * k2.Jy + 2 * k3.Jy + k4.Jy);
    // Keep the embedding geodesic on the surface against drift.
    r.p = base.project(r.p);
    r.v = base.tangent_project(r.p, r.v);
    r.v *= 1.0 / r.v.norm();
    return r;
  }
};

double wrap_periodic(double x, double L) {
  x = std::fmod(x, L);
  if (x < 0) x += L;
  return x;
}

}  // namespace

double FermiChart::base_y(double ytil) const {
  if (!transformed_) return ytil;
  // Monotone table lookup with linear interpolation.
  const auto& yt = ytil_dense_;
  auto it = std::lower_bound(yt.begin(), yt.end(), ytil);
  if (it == yt.begin()) return ybase_dense_.front();
  if (it == yt.end()) return ybase_dense_.back();
  size_t i = size_t(it - yt.begin());
  double t = (ytil - yt[i - 1]) / (yt[i] - yt[i - 1]);
  return ybase_dense_[i - 1] + t * (ybase_dense_[i] - ybase_dense_[i - 1]);
}

double FermiChart::ytil_of(double ybase) const {
  if (!transformed_) return ybase;
  const auto& yb = ybase_dense_;
  auto it = std::lower_bound(yb.begin(), yb.end(), ybase);
  if (it == yb.begin()) return ytil_dense_.front();
  if (it == yb.end()) return ytil_dense_.back();
  size_t i = size_t(it - yb.begin());
  double t = (ybase - yb[i - 1]) / (yb[i] - yb[i - 1]);
  return ytil_dense_[i - 1] + t * (ytil_dense_[i] - ytil_dense_[i - 1]);
}

SurfacePoint FermiChart::to_surface(double x, double y) const {
  if (std::abs(y) > h_ * (1 + 1e-9) + 1e-12)
    fail("out-of-tube", "chart y beyond the half width");
  if (analytic_) {
    // Angle as the fraction of the chart period: keeps the lattice nodes
    // to_surface(xs[i], 0) exactly on the core vertices even though the
    // discrete arclength period differs from 2 pi r in the last digits.
    double theta = wrap_periodic(x, L_) / L_ * 2 * kPi;
    double lat = base_y(y) / r_;
    Vec3 p = r_ * (std::cos(theta) * std::cos(lat) * fu_ +
                   std::sin(theta) * std::cos(lat) * fv_ + std::sin(lat) * fw_);
    return surface_.base_surface().project(p);
  }
  // Catmull-Rom interpolation of the point lattice in x (periodic) and y.
  double xn = wrap_periodic(x, L_) / (L_ / nx_);
  int i1 = int(std::floor(xn)) % nx_;
  double tx = xn - std::floor(xn);
  double dy = ys_[1] - ys_[0];
  double yn = (y - ys_.front()) / dy;
  int j1 = std::clamp(int(std::floor(yn)), 0, ny_ - 2);
  double ty = yn - j1;
  auto cr = [](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
               double t) {
    return 0.5 * ((2.0 * b) + (-a + c) * t + (2.0 * a - 5.0 * b + 4.0 * c - d) * (t * t) +
                  (-a + 3.0 * b - 3.0 * c + d) * (t * t * t));
  };
  Vec3 col[4];
  for (int k = 0; k < 4; ++k) {
    int i = ((i1 - 1 + k) % nx_ + nx_) % nx_;
    int j0 = std::clamp(j1 - 1, 0, ny_ - 1);
    int j2 = std::clamp(j1 + 1, 0, ny_ - 1);
    int j3 = std::clamp(j1 + 2, 0, ny_ - 1);
    col[k] = cr(pts_[i][j0], pts_[i][j1], pts_[i][j2], pts_[i][j3], ty);
  }
  Vec3 p = cr(col[0], col[1], col[2], col[3], tx);
  return surface_.base_surface().project(p);
}

bool FermiChart::try_chart_coords(const SurfacePoint& p, double* x,
                                  double* y) const {
  if (analytic_) {
    double lat = std::asin(std::clamp(p.dot(fw_) / r_, -1.0, 1.0)) * r_;
    double yt = ytil_of(lat);
    if (std::abs(yt) > h_ * (1 + 1e-9)) return false;
    double theta = std::atan2(p.dot(fv_), p.dot(fu_));
    if (theta < 0) theta += 2 * kPi;
    *x = theta / (2 * kPi) * L_;
    *y = yt;
    return true;
  }
  // Quick reject by chord distance to the core samples.
  const auto& cv = core_.vertices();
  int best = 0;
  double bestd = std::numeric_limits<double>::infinity();
  for (int i = 0; i < int(cv.size()); ++i) {
    double d = (p - cv[i]).squaredNorm();
    if (d < bestd) {
      bestd = d;
      best = i;
    }
  }
  if (std::sqrt(bestd) > h_ * 1.5 + 1e-6) return false;
  // Foot refinement: Newton on s -> <p - c(s,0), c_x(s,0)> with the core row
  // interpolant.
  double dx = L_ / nx_;
  double xf = xs_[best];
  for (int it = 0; it < 8; ++it) {
    double d = dx * 1e-3;
    Vec3 c0 = to_surface(xf, 0.0);
    Vec3 cp = to_surface(xf + d, 0.0);
    Vec3 cm = to_surface(xf - d, 0.0);
    Vec3 t = (cp - cm) / (2 * d);
    Vec3 tt = (cp - 2 * c0 + cm) / (d * d);
    double g = (p - c0).dot(t);
    double dg = -t.squaredNorm() + (p - c0).dot(tt);
    if (std::abs(dg) < 1e-14) break;
    double step = -g / dg;
    step = std::clamp(step, -dx, dx);
    xf += step;
    if (std::abs(step) < 1e-12) break;
  }
  xf = wrap_periodic(xf, L_);
  Vec3 foot = to_surface(xf, 0.0);
  const MetricSurface base = surface_.base_surface();
  double yb = base.distance(p, foot);
  Vec3 nu = fiber_direction(xf, 0.0);
  if ((p - foot).dot(nu) < 0) yb = -yb;
  double yt = ytil_of(yb);
  if (std::abs(yt) > h_ * (1 + 1e-9)) return false;
  *x = xf;
  *y = yt;
  return true;
}

std::pair<double, double> FermiChart::chart_coords(const SurfacePoint& p) const {
  double x, y;
  if (!try_chart_coords(p, &x, &y))
    fail("out-of-tube", "point outside the Fermi tube");
  return {x, y};
}

bool FermiChart::in_tube(const SurfacePoint& p) const {
  double x, y;
  return try_chart_coords(p, &x, &y);
}

Vec3 FermiChart::fiber_direction(double x, double y) const {
  if (analytic_) {
    double theta = wrap_periodic(x, L_) / L_ * 2 * kPi;
    double lat = base_y(y) / r_;
    return -std::cos(theta) * std::sin(lat) * fu_ -
           std::sin(theta) * std::sin(lat) * fv_ + std::cos(lat) * fw_;
  }
  double d = std::min(1e-4, h_ * 1e-2);
  double ylo = std::max(y - d, -h_), yhi = std::min(y + d, h_);
  Vec3 a = to_surface(x, ylo), b = to_surface(x, yhi);
  return (b - a).normalized();
}

double FermiChart::J_at(double x, double y) const {
  double xn = wrap_periodic(x, L_) / (L_ / nx_);
  int i1 = int(std::floor(xn)) % nx_;
  int i2 = (i1 + 1) % nx_;
  double tx = xn - std::floor(xn);
  double dy = ys_[1] - ys_[0];
  double yn = std::clamp((y - ys_.front()) / dy, 0.0, double(ny_ - 1));
  int j1 = std::clamp(int(std::floor(yn)), 0, ny_ - 2);
  double ty = yn - j1;
  return (1 - tx) * ((1 - ty) * J_(i1, j1) + ty * J_(i1, j1 + 1)) +
         tx * ((1 - ty) * J_(i2, j1) + ty * J_(i2, j1 + 1));
}

double FermiChart::level_curvature_at(double x, double t) const {
  double dy = ys_[1] - ys_[0];
  double tlo = std::max(t - dy, -h_), thi = std::min(t + dy, h_);
  double Jy = (J_at(x, thi) - J_at(x, tlo)) / (thi - tlo);
  return -Jy / J_at(x, t);
}

std::string FermiChart::to_json_string() const {
  nlohmann::json j;
  j["L"] = L_;
  j["h"] = h_;
  j["nx"] = nx_;
  j["ny"] = ny_;
  j["x"] = xs_;
  j["y"] = ys_;
  std::vector<std::vector<double>> Jt(nx_, std::vector<double>(ny_));
  for (int i = 0; i < nx_; ++i)
    for (int k = 0; k < ny_; ++k) Jt[i][k] = J_(i, k);
  j["J"] = Jt;
  j["mean_convex"] = is_mean_convex(*this);
  return j.dump();
}

FermiChart build_chart(const DiscreteCurve& geodesic,
                       const MetricSurface& surface, double h, int nx,
                       int ny) {
  if (h <= 0) fail("constraint-violation", "half width must be positive");
  if (nx < 16 || ny < 9) fail("resolution", "chart grid too coarse");
  if (ny % 2 == 0) ++ny;  // keep a y = 0 row

  const MetricSurface base = surface.base_surface();
  const BumpFunction* bump = nullptr;
  if (surface.overlay()) {
    bump = dynamic_cast<const BumpFunction*>(surface.overlay().get());
    if (!bump)
      fail("unsupported-kind", "overlay charts require a bump overlay");
  }

  DiscreteCurve core = resample(geodesic, base, nx);
  {
    auto kap = geodesic_curvature(core, surface);
    double sup = 0.0;
    for (double k : kap) sup = std::max(sup, std::abs(k));
    if (sup > 1e-6)
      fail("core-not-geodesic",
           "core curvature sup " + std::to_string(sup) + " above 1e-6");
  }

  FermiChart chart;
  chart.surface_ = surface;
  chart.core_ = core;
  chart.nx_ = nx;
  chart.ny_ = ny;
  chart.h_ = h;
  chart.phi0_ = bump ? bump->phi_core() : 0.0;
  chart.transformed_ = bump != nullptr;
  double scale = std::exp(chart.phi0_);

  auto segs = segment_lengths(core, base);
  chart.xs_.assign(nx, 0.0);
  double acc = 0.0;
  for (int i = 0; i < nx; ++i) {
    chart.xs_[i] = acc * scale;
    acc += segs[i];
  }
  chart.L_ = acc * scale;

  chart.ys_.assign(ny, 0.0);
  for (int j = 0; j < ny; ++j)
    chart.ys_[j] = -h + 2.0 * h * j / (ny - 1);

  // Analytic point maps when the core is a great circle of a round base.
  if (base.is_round()) {
    double r = base.radius();
    Vec3 w = core.vertex(0).cross(core.vertex(nx / 4));
    if (w.norm() > 1e-6) {
      w.normalize();
      bool planar = true;
      for (const auto& p : core.vertices())
        if (std::abs(p.dot(w)) > 1e-7 * r) planar = false;
      if (planar) {
        chart.analytic_ = true;
        chart.r_ = r;
        chart.fu_ = core.vertex(0).normalized();
        chart.fw_ = w;
        // Right-handed frame consistent with the traversal direction.
        if (core.vertex(1).dot(w.cross(core.vertex(0))) < 0) chart.fw_ = -w;
        chart.fv_ = chart.fw_.cross(chart.fu_);
      }
    }
  }

  // Dense base-y <-> chart-y table for overlay charts (dy~ = e^phi dy).
  if (bump) {
    int nd = 4001;
    double yb_max = bump->h();
    chart.ybase_dense_.assign(nd, 0.0);
    chart.ytil_dense_.assign(nd, 0.0);
    double dyb = 2.0 * yb_max / (nd - 1);
    for (int i = 0; i < nd; ++i)
      chart.ybase_dense_[i] = -yb_max + i * dyb;
    // Trapezoid accumulation from the center outward keeps y~(0) = 0 exact.
    int mid = (nd - 1) / 2;
    chart.ytil_dense_[mid] = 0.0;
    for (int i = mid + 1; i < nd; ++i) {
      double a = std::exp(bump->phi_of_y(chart.ybase_dense_[i - 1]));
      double b = std::exp(bump->phi_of_y(chart.ybase_dense_[i]));
      chart.ytil_dense_[i] = chart.ytil_dense_[i - 1] + 0.5 * (a + b) * dyb;
    }
    for (int i = mid - 1; i >= 0; --i) {
      double a = std::exp(bump->phi_of_y(chart.ybase_dense_[i + 1]));
      double b = std::exp(bump->phi_of_y(chart.ybase_dense_[i]));
      chart.ytil_dense_[i] = chart.ytil_dense_[i + 1] - 0.5 * (a + b) * dyb;
    }
    if (h > chart.ytil_dense_.back() - 1e-12)
      fail("tube-too-wide", "requested width beyond the bump tube");
  }

  // Shoot the normal geodesics and integrate the width ODE.
  chart.pts_.assign(nx, std::vector<Vec3>(ny));
  chart.J_.resize(nx, ny);
  chart.K_.resize(nx, ny);
  FiberODE ode{surface, base, bump};
  int jmid = (ny - 1) / 2;
  int substeps = 8;
  for (int i = 0; i < nx; ++i) {
    Vec3 p0 = core.vertex(i);
    Vec3 nrm = base.normal(p0);
    Vec3 tan = (core.vertex(i + 1) - core.vertex(i - 1)).normalized();
    tan = (tan - nrm * nrm.dot(tan)).normalized();
    Vec3 nu = nrm.cross(tan);
    for (int dir = -1; dir <= 1; dir += 2) {
      FiberState s{p0, dir * nu, 0.0, 1.0, 0.0};
      chart.pts_[i][jmid] = p0;
      chart.J_(i, jmid) = 1.0;
      chart.K_(i, jmid) = surface.gaussian_curvature(p0);
      double dw = (chart.ys_[jmid + 1] - chart.ys_[jmid]) / substeps;
      for (int j = jmid + 1; j < ny; ++j) {
        for (int k = 0; k < substeps; ++k) s = ode.rk4(s, dw);
        int row = (dir > 0) ? j : (ny - 1 - j);
        chart.pts_[i][row] = s.p;
        chart.J_(i, row) = s.J;
        chart.K_(i, row) = surface.gaussian_curvature(base.project(s.p));
        if (s.J <= 0)
          fail("tube-too-wide", "Jacobi width hit zero inside the tube");
      }
    }
  }
  return chart;
}

std::vector<double> level_curvature(const FermiChart& chart, double t) {
  if (std::abs(t) > chart.h() + 1e-12)
    fail("out-of-tube", "level beyond the half width");
  std::vector<double> out(chart.nx());
  for (int i = 0; i < chart.nx(); ++i)
    out[i] = chart.level_curvature_at(chart.xs()[i], t);
  return out;
}

bool is_mean_convex(const FermiChart& chart) {
  const auto& ys = chart.ys();
  int jmid = (chart.ny() - 1) / 2;
  for (int i = 0; i < chart.nx(); ++i) {
    for (int j = 0; j < chart.ny(); ++j) {
      if (std::abs(j - jmid) < 1) continue;  // |t| below one grid step
      // Centered J_y where possible, one-sided at the rim.
      int jl = std::max(j - 1, 0), jr = std::min(j + 1, chart.ny() - 1);
      double Jy = (chart.J()(i, jr) - chart.J()(i, jl)) / (ys[jr] - ys[jl]);
      if (Jy * ys[j] <= 0) return false;
    }
  }
  return true;
}

namespace {

// Lifted chart x-coordinates of the curve's vertices plus the closing wrap.
std::vector<std::pair<double, double>> lift_coords(const DiscreteCurve& c,
                                                   const FermiChart& chart) {
  int n = c.resolution();
  std::vector<std::pair<double, double>> out;
  out.reserve(n + 1);
  double L = chart.L();
  double prev_x = 0.0, lift = 0.0;
  for (int i = 0; i <= n; ++i) {
    auto [x, y] = chart.chart_coords(c.vertex(i % n));
    if (i == 0) {
      lift = x;
    } else {
      double dx = x - prev_x;
      dx -= L * std::round(dx / L);
      lift += dx;
    }
    prev_x = x;
    out.push_back({lift, y});
  }
  return out;
}

}  // namespace

int winding_number(const DiscreteCurve& c, const FermiChart& chart) {
  auto lc = lift_coords(c, chart);
  return int(std::llround((lc.back().first - lc.front().first) / chart.L()));
}

double horizontal_width(const DiscreteCurve& c, const FermiChart& chart) {
  auto lc = lift_coords(c, chart);
  double lo = lc.front().first, hi = lc.front().first;
  for (const auto& [x, y] : lc) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi - lo;
}

std::optional<GraphCurve> is_graphical(const DiscreteCurve& c,
                                       const FermiChart& chart) {
  int w = winding_number(c, chart);
  if (w != 1 && w != -1) return std::nullopt;
  auto lc = lift_coords(c, chart);
  if (w == -1) {
    // Re-orient so the lift increases.
    std::reverse(lc.begin(), lc.end());
    for (auto& e : lc) e.first = -e.first;
  }
  double L = chart.L();
  GraphCurve g;
  g.heights.assign(chart.nx(), 0.0);
  std::vector<int> hits(chart.nx(), 0);
  double x0 = lc.front().first;
  for (size_t s = 0; s + 1 < lc.size(); ++s) {
    double a = lc[s].first, b = lc[s + 1].first;
    double ya = lc[s].second, yb = lc[s + 1].second;
    if (a == b) continue;
    if (a > b) {
      std::swap(a, b);
      std::swap(ya, yb);
    }
    for (int i = 0; i < chart.nx(); ++i) {
      // Every lift copy of the fiber x = xs[i] crossed by [a, b).
      double xg = chart.xs()[i];
      double first = xg + L * std::ceil((a - xg) / L);
      for (double xc = first; xc < b; xc += L) {
        if (xc < a) continue;
        ++hits[i];
        double t = (xc - lc[s].first) / (lc[s + 1].first - lc[s].first);
        g.heights[i] = lc[s].second + t * (lc[s + 1].second - lc[s].second);
      }
    }
  }
  (void)x0;
  for (int i = 0; i < chart.nx(); ++i)
    if (hits[i] != 1) return std::nullopt;
  return g;
}

DiscreteCurve GraphCurve::to_curve(const FermiChart& chart) const {
  std::vector<Vec3> v(heights.size());
  for (size_t i = 0; i < heights.size(); ++i)
    v[i] = chart.to_surface(chart.xs()[i], heights[i]);
  return DiscreteCurve(std::move(v));
}

std::vector<DiscreteCurve> squeeze_homotopy(const GraphCurve& g0,
                                            const FermiChart& chart,
                                            int steps) {
  if (steps < 1) fail("constraint-violation", "squeeze needs steps >= 1");
  for (double gh : g0.heights)
    if (std::abs(gh) >= chart.h())
      fail("out-of-tube", "graph height reaches the tube boundary");
  std::vector<DiscreteCurve> out;
  out.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    double f = 1.0 - double(k) / steps;
    GraphCurve g;
    g.heights.resize(g0.heights.size());
    for (size_t i = 0; i < g0.heights.size(); ++i)
      g.heights[i] = f * g0.heights[i];
    out.push_back(g.to_curve(chart));
  }
  return out;
}

TotalAngle total_angle(const DiscreteCurve& c, const FermiChart& chart) {
  int w = winding_number(c, chart);
  if (w != 1 && w != -1)
    fail("constraint-violation", "total angle needs a core-homologous curve");
  auto lc = lift_coords(c, chart);
  if (w == -1) {
    std::reverse(lc.begin(), lc.end());
    for (auto& e : lc) e.first = -e.first;
  }
  TotalAngle out{0.0, 0.0};
  for (size_t s = 0; s + 1 < lc.size(); ++s) {
    double dx = lc[s + 1].first - lc[s].first;
    double dy = lc[s + 1].second - lc[s].second;
    double xm = 0.5 * (lc[s].first + lc[s + 1].first);
    double ym = 0.5 * (lc[s].second + lc[s + 1].second);
    double Jm = chart.J_at(xm, ym);
    double ds = std::hypot(Jm * dx, dy);
    if (ds < 1e-15) continue;
    double cth = std::clamp(Jm * dx / ds, -1.0, 1.0);
    double th = std::acos(cth);
    out.angle_integral += std::abs(th) * ds;
    out.cos_defect += (1.0 - cth) * ds;
  }
  return out;
}

double chart_length(const FermiChart& chart, const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty())
    fail("constraint-violation", "chart polyline needs matching samples");
  double len = 0.0;
  int n = int(x.size());
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    double dx = x[j] - x[i];
    dx -= chart.L() * std::round(dx / chart.L());
    double dy = y[j] - y[i];
    double Jm = chart.J_at(x[i] + dx / 2, (y[i] + y[j]) / 2);
    len += std::hypot(Jm * dx, dy);
  }
  return len;
}

BumpFunction::BumpFunction(std::shared_ptr<const FermiChart> host, double M,
                           double beta, double eps)
    : host_(std::move(host)), M_(M), beta_(beta), eps_(eps) {
  h_ = host_->h();
  B_ = h_ * h_ * h_ * h_ * M_ / eps_;
  if (B_ / (h_ * h_) > 700.0)
    fail("infeasible-bump", "amplitude too small for the requested M and h");
}

double BumpFunction::A() const {
  return eps_ / 2.0 * std::exp(B_ / (h_ * h_));
}

double BumpFunction::phi_of_y(double y) const {
  double y2 = y * y, h2 = h_ * h_;
  if (y2 >= h2) return 0.0;
  // -A e^{-B/(h^2-y^2)} in the overflow-safe form.
  return -(eps_ / 2.0) * std::exp(-B_ * y2 / (h2 * (h2 - y2)));
}

double BumpFunction::dphi_of_y(double y) const {
  double y2 = y * y, h2 = h_ * h_;
  if (y2 >= h2) return 0.0;
  double up = 2.0 * B_ * y / ((h2 - y2) * (h2 - y2));
  return -phi_of_y(y) * up;
}

double BumpFunction::d2phi_of_y(double y) const {
  double y2 = y * y, h2 = h_ * h_;
  if (y2 >= h2) return 0.0;
  double d = h2 - y2;
  double up = 2.0 * B_ * y / (d * d);
  double upp = 2.0 * B_ * (h2 + 3.0 * y2) / (d * d * d);
  return -dphi_of_y(y) * up - phi_of_y(y) * upp;
}

bool BumpFunction::contains(const Vec3& p) const {
  double x, y;
  if (!host_->try_chart_coords(p, &x, &y)) return false;
  return std::abs(y) < h_;
}

double BumpFunction::phi_at(const Vec3& p) const {
  double x, y;
  if (!host_->try_chart_coords(p, &x, &y)) return 0.0;
  return phi_of_y(y);
}

double BumpFunction::directional_derivative(const Vec3& p,
                                            const Vec3& dir) const {
  double x, y;
  if (!host_->try_chart_coords(p, &x, &y)) return 0.0;
  Vec3 e2 = host_->fiber_direction(x, y);
  return dphi_of_y(y) * e2.dot(dir);
}

double BumpFunction::laplacian(const Vec3& p) const {
  double x, y;
  if (!host_->try_chart_coords(p, &x, &y)) return 0.0;
  // phi_yy + (J_y/J) phi_y in the host chart.
  double jyj = -host_->level_curvature_at(x, y);
  return d2phi_of_y(y) + jyj * dphi_of_y(y);
}

bool BumpFunction::on_core(const Vec3& p) const {
  double x, y;
  if (!host_->try_chart_coords(p, &x, &y)) return false;
  return std::abs(y) < 1e-7;
}

std::shared_ptr<BumpFunction> make_bump(std::shared_ptr<const FermiChart> chart,
                                        double M, double beta) {
  double h = chart->h();
  double kmax = chart->K_table().maxCoeff();
  if (!(M > kmax))
    fail("constraint-violation",
         "bump height M must exceed the tube's maximum curvature");
  if (!(h < std::max(1.0 / M, 0.1) + 1e-12))
    fail("constraint-violation", "tube too wide for the bump height");
  if (!(beta > 0 && beta < 1))
    fail("constraint-violation", "beta must lie in (0,1)");
  double eps = -std::log1p(-beta) / 2.0;
  for (int attempt = 0; attempt < 60; ++attempt) {
    auto bump = std::make_shared<BumpFunction>(chart, M, beta, eps);
    // Numeric verification of the advertised properties.
    bool ok = true;
    // (iii) sup |e^{2 phi} - 1| < beta.
    double sup = 0.0;
    for (int i = 0; i <= 400; ++i) {
      double y = -h + 2.0 * h * i / 400;
      sup = std::max(sup, std::abs(std::exp(2.0 * bump->phi_of_y(y)) - 1.0));
    }
    if (sup >= beta) ok = false;
    // (v) Hessian(nu,nu) = M on the core, by finite differences. The step
    // must resolve the bump's own width h^2/sqrt(B), which shrinks as the
    // amplitude does; a fixed fraction of h is too coarse for sharp bumps.
    double d = 0.005 * h * h / std::sqrt(std::max(bump->B(), 1.0));
    double fd = (bump->phi_of_y(d) - 2.0 * bump->phi_of_y(0.0) +
                 bump->phi_of_y(-d)) /
                (d * d);
    if (std::abs(fd - M) > 1e-4 * std::max(1.0, std::abs(M))) ok = false;
    // Smooth cutoff at the rim.
    if (std::abs(bump->phi_of_y(h * (1 - 1e-9))) > 1e-10 ||
        std::abs(bump->dphi_of_y(h * (1 - 1e-9))) > 1e-10)
      ok = false;
    // (iv) conformal Jacobian at most 1 with Lipschitz proxy below 2; wide
    // amplitudes fail the gradient bound at the rim and need sharpening.
    double sup_grad = 0.0;
    for (int i = 0; i <= 400; ++i) {
      double y = -h + 2.0 * h * i / 400;
      double e = std::exp(bump->phi_of_y(y));
      if (e > 1.0 + 1e-12) ok = false;
      sup_grad = std::max(sup_grad, std::abs(bump->dphi_of_y(y)) * e);
    }
    if (1.0 + sup_grad >= 2.0) ok = false;
    if (ok) return bump;
    eps *= 0.5;
  }
  fail("infeasible-bump", "no amplitude satisfied the bump properties");
}

JacobianBounds jacobian_bounds(const BumpFunction& bump) {
  double h = bump.h();
  double sup_jac = 0.0, sup_grad = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    double y = -h + 2.0 * h * i / 4000;
    double e = std::exp(bump.phi_of_y(y));
    sup_jac = std::max(sup_jac, e);
    sup_grad = std::max(sup_grad, std::abs(bump.dphi_of_y(y)) * e);
  }
  JacobianBounds out{sup_jac, 1.0 + sup_grad};
  if (out.sup_jac > 1.0 + 1e-12)
    fail("constraint-violation", "conformal Jacobian exceeded 1");
  if (out.lip_bound >= 2.0)
    fail("constraint-violation", "Lipschitz proxy reached 2");
  return out;
}

}  // namespace geomorse
