#include "geomorse/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace geomorse {

namespace {

// Segment arclengths with one extra subdivision level and Richardson
// extrapolation. The plain corrected length is ~1e-6 short of the true
// arclength at n = 512, which alone would push the great circle's zero
// eigenvalues past the nullity tolerance; the operator's period needs the
// extra digits.
double refined_length(const DiscreteCurve& c, const MetricSurface& surface) {
  auto chordw = [&](const Vec3& a, const Vec3& b) {
    return (a - b).norm() * surface.length_weight(surface.project(0.5 * (a + b)));
  };
  double total = 0.0;
  for (int i = 0; i < c.resolution(); ++i) {
    const Vec3& a = c.vertex(i);
    const Vec3& b = c.vertex(i + 1);
    Vec3 m = surface.project(0.5 * (a + b));
    Vec3 m1 = surface.project(0.5 * (a + m));
    Vec3 m2 = surface.project(0.5 * (m + b));
    double l1 = chordw(a, m) + chordw(m, b);
    double l2 = chordw(a, m1) + chordw(m1, m) + chordw(m, m2) + chordw(m2, b);
    total += (4.0 * l2 - l1) / 3.0;
  }
  return total;
}

}  // namespace

std::string JacobiSpectrum::to_json_string() const {
  nlohmann::json j;
  j["eigenvalues"] = eigenvalues;
  j["index"] = index;
  j["nullity"] = nullity;
  j["tol"] = tol;
  j["n"] = n;
  j["length"] = length;
  return j.dump();
}

JacobiSpectrum stability_spectrum(const DiscreteCurve& geodesic,
                                  const MetricSurface& surface, int m) {
  if (geodesic.is_point())
    fail("degenerate-curve", "spectrum of a point curve");
  int n = geodesic.resolution();
  if (m > n / 4) fail("resolution", "too many eigenpairs for this grid");
  {
    auto kap = geodesic_curvature(geodesic, surface);
    double sup = 0.0;
    for (double k : kap) sup = std::max(sup, std::abs(k));
    if (sup > 1e-6)
      fail("core-not-geodesic",
           "curvature sup " + std::to_string(sup) + " above 1e-6");
  }
  DiscreteCurve c = resample(geodesic, surface, n);
  double L = refined_length(c, surface);
  double dh = L / n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  // -f'' by the fourth-order periodic five-point stencil; the extra accuracy
  // over the second-order stencil is needed to pin eigenvalues at 1e-4.
  double c0 = 30.0 / (12.0 * dh * dh);
  double c1 = -16.0 / (12.0 * dh * dh);
  double c2 = 1.0 / (12.0 * dh * dh);
  for (int i = 0; i < n; ++i) {
    A(i, i) = c0 - surface.gaussian_curvature(c.vertex(i));
    A(i, (i + 1) % n) += c1;
    A(i, (i - 1 + n) % n) += c1;
    A(i, (i + 2) % n) += c2;
    A(i, (i - 2 + n) % n) += c2;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  JacobiSpectrum out;
  out.n = n;
  out.length = L;
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
  out.eigenfunctions = es.eigenvectors().leftCols(m);
  // L^2-normalize against the arclength measure.
  out.eigenfunctions *= 1.0 / std::sqrt(dh);
  for (double lam : out.eigenvalues) {
    if (lam < -out.tol) ++out.index;
    if (std::abs(lam) <= out.tol) ++out.nullity;
  }
  return out;
}

LocalMinMaxFamily::LocalMinMaxFamily(DiscreteCurve core, MetricSurface surface,
                                     std::shared_ptr<const FermiChart> chart,
                                     Eigen::MatrixXd eigensections,
                                     double lambda1, double delta_prime,
                                     double boundary_drop)
    : core_(std::move(core)),
      surface_(std::move(surface)),
      chart_(std::move(chart)),
      X_(std::move(eigensections)),
      lambda1_(lambda1),
      delta_(delta_prime),
      drop_(boundary_drop) {
  core_length_ = length(core_, surface_);
}

double LocalMinMaxFamily::section(int i, double x) const {
  int nx = chart_->nx();
  double dx = chart_->L() / nx;
  double u = x / dx;
  u -= nx * std::floor(u / nx);
  int a = int(std::floor(u)) % nx;
  int b = (a + 1) % nx;
  double t = u - std::floor(u);
  return (1 - t) * X_(a, i) + t * X_(b, i);
}

DiscreteCurve LocalMinMaxFamily::apply(const Eigen::VectorXd& v) const {
  // The core's chart coordinates are the grid itself; skip the inversion.
  if (v.size() != k()) fail("constraint-violation", "wrong family dimension");
  int n = chart_->nx();
  std::vector<Vec3> out(n);
  for (int j = 0; j < n; ++j) {
    double shift = 0.0;
    for (int i = 0; i < k(); ++i) shift += v[i] * X_(j, i);
    if (std::abs(shift) >= chart_->h())
      fail("out-of-tube", "displacement leaves the Fermi tube");
    out[j] = chart_->to_surface(chart_->xs()[j], shift);
  }
  return DiscreteCurve(std::move(out));
}

DiscreteCurve LocalMinMaxFamily::apply_to(const DiscreteCurve& c,
                                          const Eigen::VectorXd& v) const {
  if (v.size() != k()) fail("constraint-violation", "wrong family dimension");
  std::vector<Vec3> out(c.resolution());
  for (int j = 0; j < c.resolution(); ++j) {
    auto [x, y] = chart_->chart_coords(c.vertex(j));
    double shift = 0.0;
    for (int i = 0; i < k(); ++i) shift += v[i] * section(i, x);
    double ynew = y + shift;
    if (std::abs(ynew) >= chart_->h())
      fail("out-of-tube", "displacement leaves the Fermi tube");
    out[j] = chart_->to_surface(x, ynew);
  }
  return DiscreteCurve(std::move(out));
}

double LocalMinMaxFamily::length_of(const Eigen::VectorXd& v) const {
  return length(apply(v), surface_);
}

Eigen::VectorXd LocalMinMaxFamily::grad_length(const Eigen::VectorXd& v,
                                               double fd) const {
  Eigen::VectorXd g(k());
  for (int i = 0; i < k(); ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(k());
    e[i] = fd;
    g[i] = (length_of(v + e) - length_of(v - e)) / (2 * fd);
  }
  return g;
}

Eigen::MatrixXd LocalMinMaxFamily::hessian_length(const Eigen::VectorXd& v,
                                                  double fd) const {
  int kk = k();
  Eigen::MatrixXd H(kk, kk);
  double f0 = length_of(v);
  for (int i = 0; i < kk; ++i) {
    Eigen::VectorXd ei = Eigen::VectorXd::Zero(kk);
    ei[i] = fd;
    H(i, i) = (length_of(v + ei) - 2 * f0 + length_of(v - ei)) / (fd * fd);
    for (int j = i + 1; j < kk; ++j) {
      Eigen::VectorXd ej = Eigen::VectorXd::Zero(kk);
      ej[j] = fd;
      double pp = length_of(v + ei + ej), pm = length_of(v + ei - ej);
      double mp = length_of(v - ei + ej), mm = length_of(v - ei - ej);
      H(i, j) = H(j, i) = (pp - pm - mp + mm) / (4 * fd * fd);
    }
  }
  return H;
}

double LocalMinMaxFamily::eta(int i, const SurfacePoint& p) const {
  auto [x, y] = chart_->chart_coords(p);
  return std::clamp(y * section(i, x), -1.0, 1.0);
}

LocalMinMaxFamily build_local_minmax(const DiscreteCurve& geodesic,
                                     const MetricSurface& surface,
                                     const JacobiSpectrum& spectrum,
                                     double half_width) {
  if (spectrum.index < 1)
    fail("no-unstable-direction", "index 0 geodesic has no min-max family");
  if (spectrum.nullity > 0)
    fail("degenerate-geodesic", "nullity above tolerance");
  int k = spectrum.index;
  DiscreteCurve core = resample(geodesic, surface, geodesic.resolution());
  double h = half_width > 0 ? half_width : surface.min_axis() * 0.35;
  auto chart = std::make_shared<FermiChart>(
      build_chart(core, surface, h, core.resolution(), 33));
  Eigen::MatrixXd X = spectrum.eigenfunctions.leftCols(k);
  LocalMinMaxFamily family(chart->core(), surface, chart, X,
                           spectrum.eigenvalues[0], 0.1, 0.0);
  // Shrink the ball until the length Hessian is negative-definite at the
  // center and at probe points, then record the boundary drop.
  double delta = std::min(0.2, h * std::sqrt(2.0 * kPi) * 0.5);
  double drop = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    bool ok = true;
    std::vector<Eigen::VectorXd> probes;
    probes.push_back(Eigen::VectorXd::Zero(k));
    for (int i = 0; i < k && ok; ++i) {
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
        v[i] = sgn * 0.6 * delta;
        probes.push_back(v);
      }
    }
    double fd = std::max(1e-4, delta * 1e-2);
    try {
      for (const auto& v : probes) {
        Eigen::MatrixXd H = family.hessian_length(v, fd);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        if (es.eigenvalues().maxCoeff() >= -1e-9) {
          ok = false;
          break;
        }
      }
      if (ok) {
        double L0 = family.length_of(Eigen::VectorXd::Zero(k));
        double worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i) {
          for (int sgn = -1; sgn <= 1; sgn += 2) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
            v[i] = sgn * delta;
            worst = std::max(worst, family.length_of(v));
          }
        }
        drop = L0 - worst;
        if (drop <= 0) ok = false;
      }
    } catch (const Error&) {
      ok = false;  // displacement left the tube: shrink
    }
    if (ok) break;
    delta *= 0.7;
    if (attempt == 39)
      fail("no-unstable-direction", "could not certify a concavity ball");
  }
  return LocalMinMaxFamily(chart->core(), surface, chart, X,
                           spectrum.eigenvalues[0], delta, drop);
}

double l_star(const VarifoldSample& v, const LocalMinMaxFamily& family) {
  double mass = v.total_mass();
  double penalty = 0.0;
  for (int i = 0; i < family.k(); ++i) {
    double integral = 0.0;
    for (const auto& a : v.atoms) integral += a.weight * family.eta(i, a.point);
    penalty += integral * integral;
  }
  return mass + (std::abs(family.lambda1()) + 1.0) * penalty;
}

std::vector<Eigen::VectorXd> boundary_escape_flow(
    const LocalMinMaxFamily& family, const Eigen::VectorXd& start) {
  if (start.norm() < 1e-9)
    fail("stationary-start", "escape flow started at the local max");
  double delta = family.delta_prime();
  std::vector<Eigen::VectorXd> traj{start};
  Eigen::VectorXd v = start;
  double fd = std::max(1e-5, delta * 1e-3);
  double prev = family.length_of(v);
  for (int step = 0; step < 200000; ++step) {
    double r = v.norm() / delta;
    if (r > 1.0 - 1e-3) break;
    Eigen::VectorXd g = family.grad_length(v, fd);
    double speed = (1.0 - r * r);
    double dt = 0.02 * delta / std::max(g.norm(), 1e-8);
    v = v - dt * speed * g;
    if (v.norm() / delta > 1.0 - 1e-3)
      v *= (1.0 - 1e-3) * delta / v.norm() * (1.0 + 1e-12);
    double cur = family.length_of(v);
    if (cur > prev + 1e-9)
      fail("constraint-violation", "length increased along the escape flow");
    prev = cur;
    traj.push_back(v);
  }
  return traj;
}

}  // namespace geomorse
