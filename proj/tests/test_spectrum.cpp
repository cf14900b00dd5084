#include <doctest.h>

#include <cmath>
#include <memory>

#include "geomorse/flow.hpp"
#include "geomorse/spectrum.hpp"
#include "helpers.hpp"

using namespace geomorse;
using namespace testutil;

namespace {

std::shared_ptr<const FermiChart> equator_chart_ptr(const MetricSurface& s) {
  return std::make_shared<const FermiChart>(
      build_chart(latitude_circle(s, kPi / 2, 512), s, 0.3, 64, 33));
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("great-circle stability spectrum is k^2 - 1") {
  auto s = MetricSurface::round_sphere(1.0);
  auto eq = latitude_circle(s, kPi / 2, 512);
  auto spec = stability_spectrum(eq, s, 7);
  REQUIRE(spec.eigenvalues.size() == 7);
  double want[7] = {-1, 0, 0, 3, 3, 8, 8};
  for (int i = 0; i < 7; ++i)
    CHECK(std::abs(spec.eigenvalues[i] - want[i]) < 1e-4);
  CHECK(spec.index == 1);
  CHECK(spec.nullity == 2);
  CHECK(spec.length == doctest::Approx(2 * kPi).epsilon(1e-8));

  // Columns are L^2-orthonormal against the arclength measure.
  double dh = spec.length / spec.n;
  Eigen::MatrixXd G =
      dh * spec.eigenfunctions.transpose() * spec.eigenfunctions;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      CHECK(std::abs(G(i, j) - (i == j ? 1.0 : 0.0)) < 1e-8);
  // The ground state is the constant function.
  double c0 = 1.0 / std::sqrt(2 * kPi);
  for (int i = 0; i < spec.n; ++i)
    CHECK(std::abs(std::abs(spec.eigenfunctions(i, 0)) - c0) < 1e-6);
}

TEST_CASE("eigenvalue error decays under refinement") {
  auto s = MetricSurface::round_sphere(1.0);
  auto err = [&](int n) {
    auto spec = stability_spectrum(latitude_circle(s, kPi / 2, n), s, 4);
    return std::abs(spec.eigenvalues[3] - 3.0);
  };
  double e128 = err(128), e256 = err(256);
  CHECK(e256 < e128);
  CHECK(std::log2(e128 / e256) > 1.9);
}

TEST_CASE("principal ellipses carry indices 1, 2, 3") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  int want = 1;
  for (const auto& ell : principal_ellipses(e, 256)) {
    auto core = evolve(ell, e, FlowBudget{}).curve;
    auto spec = stability_spectrum(core, e, 6);
    CHECK(spec.index == want);
    CHECK(spec.nullity == 0);
    ++want;
  }
}

TEST_CASE("bump-perturbed core is strictly stable with shifted harmonics") {
  auto s = MetricSurface::round_sphere(1.0);
  auto host = equator_chart_ptr(s);
  auto bump = make_bump(host, 2.0, 0.5);
  auto ps = s.with_overlay(bump);
  auto core = host->core();
  auto spec = stability_spectrum(core, ps, 5);
  // Curvature -1 on the core: eigenvalues (2 pi k / L)^2 + 1 with the
  // conformally shortened period.
  double Lt = spec.length;
  CHECK(Lt < 2 * kPi);  // e^{phi} < 1 inside the bump
  double w1 = std::pow(2 * kPi / Lt, 2.0);
  double want[5] = {1.0, w1 + 1, w1 + 1, 4 * w1 + 1, 4 * w1 + 1};
  for (int i = 0; i < 5; ++i)
    CHECK(spec.eigenvalues[i] == doctest::Approx(want[i]).epsilon(1e-3));
  CHECK(spec.index == 0);
  CHECK(spec.nullity == 0);
  CHECK_THROWS_WITH_AS(build_local_minmax(core, ps, spec),
                       doctest::Contains("no-unstable-direction"), Error);
}

TEST_CASE("spectrum input validation") {
  auto s = MetricSurface::round_sphere(1.0);
  CHECK_THROWS_WITH_AS(
      stability_spectrum(DiscreteCurve::point_curve(Vec3(0, 0, 1)), s, 3),
      doctest::Contains("degenerate-curve"), Error);
  CHECK_THROWS_WITH_AS(
      stability_spectrum(latitude_circle(s, kPi / 2, 64), s, 30),
      doctest::Contains("resolution"), Error);
  CHECK_THROWS_WITH_AS(stability_spectrum(latitude_circle(s, 1.0, 256), s, 3),
                       doctest::Contains("core-not-geodesic"), Error);
  // Zero modes make the round min-max family degenerate.
  auto spec = stability_spectrum(latitude_circle(s, kPi / 2, 256), s, 5);
  CHECK_THROWS_WITH_AS(
      build_local_minmax(latitude_circle(s, kPi / 2, 256), s, spec),
      doctest::Contains("degenerate-geodesic"), Error);
}

TEST_CASE("ellipse min-max families: concave center with matching index") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  for (const auto& ell : principal_ellipses(e, 256)) {
    auto core = evolve(ell, e, FlowBudget{}).curve;
    auto spec = stability_spectrum(core, e, 6);
    auto fam = build_local_minmax(core, e, spec);
    CHECK(fam.k() == spec.index);
    CHECK(fam.delta_prime() > 0);
    CHECK(fam.boundary_drop() > 0);
    // The family re-centers on the chart's resampled core.
    CHECK(fam.core_length() == doctest::Approx(length(core, e)).epsilon(1e-6));
    Eigen::MatrixXd H =
        fam.hessian_length(Eigen::VectorXd::Zero(fam.k()), 1e-3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    int neg = 0;
    for (int i = 0; i < fam.k(); ++i)
      if (es.eigenvalues()[i] < -1e-9) ++neg;
    CHECK(neg == spec.index);
    // Strict local max: every boundary probe is shorter than the center.
    double L0 = fam.length_of(Eigen::VectorXd::Zero(fam.k()));
    for (int i = 0; i < fam.k(); ++i)
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(fam.k());
        v[i] = sgn * fam.delta_prime();
        CHECK(fam.length_of(v) < L0);
      }
  }
}

TEST_CASE("manual great-circle family drops quadratically") {
  auto s = MetricSurface::round_sphere(1.0);
  auto chart = equator_chart_ptr(s);
  // Constant unit-L^2-norm section: the displacement t moves the equator to
  // the latitude circle at height t / sqrt(2 pi).
  Eigen::MatrixXd X =
      Eigen::MatrixXd::Constant(chart->nx(), 1, 1.0 / std::sqrt(2 * kPi));
  LocalMinMaxFamily fam(chart->core(), s, chart, X, -1.0, 0.1, 0.0);
  double L0 = fam.length_of(Eigen::VectorXd::Zero(1));
  for (double t : {-0.05, -0.02, 0.01, 0.03, 0.05}) {
    Eigen::VectorXd v(1);
    v[0] = t;
    double drop = L0 - fam.length_of(v);
    CHECK(drop == doctest::Approx(t * t / 2).epsilon(0.05));
  }

  // F_{-v} undoes F_v at the chart level.
  Eigen::VectorXd v(1);
  v[0] = 0.06;
  auto shifted = fam.apply(v);
  auto back = fam.apply_to(shifted, -v);
  double moved = 0.0;
  for (int i = 0; i < back.resolution(); ++i)
    moved = std::max(moved, (back.vertex(i) - chart->core().vertex(i)).norm());
  CHECK(moved < 1e-6);

  // l_star: no penalty on the core, positive penalty off it.
  auto v0 = to_varifold(chart->core(), s);
  CHECK(l_star(v0, fam) == doctest::Approx(v0.total_mass()).epsilon(1e-9));
  auto vs = to_varifold(shifted, s);
  CHECK(l_star(vs, fam) > vs.total_mass() + 1e-6);
}

TEST_CASE("boundary escape flow leaves the ball monotonically") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  auto core = evolve(principal_ellipses(e, 256)[0], e, FlowBudget{}).curve;
  auto spec = stability_spectrum(core, e, 4);
  auto fam = build_local_minmax(core, e, spec);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(fam.k());
  start[0] = 0.3 * fam.delta_prime();
  auto traj = boundary_escape_flow(fam, start);
  REQUIRE(traj.size() >= 2);
  double prev = fam.length_of(traj.front());
  for (const auto& v : traj) {
    double cur = fam.length_of(v);
    CHECK(cur <= prev + 1e-9);
    prev = cur;
  }
  CHECK(traj.back().norm() > 0.99 * fam.delta_prime() * (1.0 - 2e-3));
  CHECK_THROWS_WITH_AS(
      boundary_escape_flow(fam, Eigen::VectorXd::Zero(fam.k())),
      doctest::Contains("stationary-start"), Error);
}

TEST_CASE("spectrum json record") {
  auto s = MetricSurface::round_sphere(1.0);
  auto spec = stability_spectrum(latitude_circle(s, kPi / 2, 128), s, 3);
  auto j = spec.to_json_string();
  for (const char* key : {"\"eigenvalues\"", "\"index\"", "\"nullity\"",
                          "\"tol\"", "\"n\"", "\"length\""})
    CHECK(j.find(key) != std::string::npos);
}

}  // TEST_SUITE
