#include <doctest.h>

#include <cmath>
#include <random>

#include "geomorse/surface.hpp"

using namespace geomorse;

namespace {

// Independent curvature oracle: sample the surface as a height field over the
// tangent plane at p and evaluate K = det(II)/det(I) by central differences.
double fd_gauss_curvature(const MetricSurface& s, const Vec3& p) {
  Vec3 n = s.normal(p);
  Vec3 t1 = n.unitOrthogonal();
  Vec3 t2 = n.cross(t1);
  double d = 1e-4;
  auto q = [&](double u, double v) { return s.project(p + u * t1 + v * t2); };
  Vec3 qu = (q(d, 0) - q(-d, 0)) / (2 * d);
  Vec3 qv = (q(0, d) - q(0, -d)) / (2 * d);
  Vec3 quu = (q(d, 0) - 2 * p + q(-d, 0)) / (d * d);
  Vec3 qvv = (q(0, d) - 2 * p + q(0, -d)) / (d * d);
  Vec3 quv = (q(d, d) - q(d, -d) - q(-d, d) + q(-d, -d)) / (4 * d * d);
  double E = qu.dot(qu), F = qu.dot(qv), G = qv.dot(qv);
  double L = quu.dot(n), M = quv.dot(n), N = qvv.dot(n);
  return (L * N - M * M) / (E * G - F * F);
}

Vec3 random_ellipsoid_point(const MetricSurface& s, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 u(g(rng), g(rng), g(rng));
  u.normalize();
  const Vec3& a = s.semi_axes();
  return s.project(Vec3(a.x() * u.x(), a.y() * u.y(), a.z() * u.z()));
}

}  // namespace

TEST_SUITE("surface") {

TEST_CASE("curvature constants on round spheres") {
  auto s1 = MetricSurface::round_sphere(1.0);
  auto s2 = MetricSurface::round_sphere(2.0);
  CHECK(s1.gaussian_curvature(Vec3(0, 0, 1)) == doctest::Approx(1.0));
  CHECK(s1.gaussian_curvature(Vec3(1, 0, 0)) == doctest::Approx(1.0));
  CHECK(s2.gaussian_curvature(Vec3(0, 0, 2)) == doctest::Approx(0.25));
}

TEST_CASE("ellipsoid pole curvature is c^2/(a^2 b^2)") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  double want = (1.2 * 1.2) / (1.0 * 1.1 * 1.1);
  CHECK(e.gaussian_curvature(Vec3(0, 0, 1.2)) ==
        doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("curvature matches finite-difference fundamental forms") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    Vec3 p = random_ellipsoid_point(e, rng);
    double k = e.gaussian_curvature(p);
    double k_fd = fd_gauss_curvature(e, p);
    CHECK(std::abs(k - k_fd) / std::abs(k) < 1e-5);
  }
}

TEST_CASE("curvature rejects off-surface points") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  CHECK_THROWS_WITH_AS(e.gaussian_curvature(Vec3(1.4, 0, 0)),
                       doctest::Contains("constraint-violation"), Error);
}

TEST_CASE("projection hits the nearest point") {
  auto r = MetricSurface::round_sphere(1.0);
  CHECK((r.project(Vec3(0, 0, 2)) - Vec3(0, 0, 1)).norm() < 1e-14);
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  CHECK((e.project(Vec3(1.05, 0, 0)) - Vec3(1, 0, 0)).norm() < 1e-10);
}

TEST_CASE("projection is bitwise idempotent") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 100; ++i) {
    Vec3 p = random_ellipsoid_point(e, rng);
    Vec3 q = e.project(p + u(rng) * e.normal(p));
    Vec3 q2 = e.project(q);
    CHECK(q.x() == q2.x());
    CHECK(q.y() == q2.y());
    CHECK(q.z() == q2.z());
    CHECK(e.residual(q) <= 1e-12);
  }
}

TEST_CASE("projection far outside the tube fails") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  CHECK_THROWS_WITH_AS(e.project(Vec3(0, 0, 0)),
                       doctest::Contains("projection-ambiguity"), Error);
  CHECK_THROWS_WITH_AS(e.project(Vec3(9, 9, 9)),
                       doctest::Contains("projection-ambiguity"), Error);
}

TEST_CASE("round distances are analytic") {
  auto r = MetricSurface::round_sphere(1.0);
  CHECK(r.distance(Vec3(0, 0, 1), Vec3(0, 0, -1)) ==
        doctest::Approx(kPi).epsilon(1e-3));
  CHECK(r.distance(Vec3(1, 0, 0), Vec3(0, 1, 0)) ==
        doctest::Approx(kPi / 2).epsilon(1e-3));
  CHECK(r.distance(Vec3(1, 0, 0), Vec3(1, 0, 0)) == 0.0);
}

TEST_CASE("ellipsoid distance: symmetry, identity, triangle inequality") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 15; ++i) {
    Vec3 p = random_ellipsoid_point(e, rng);
    Vec3 q = random_ellipsoid_point(e, rng);
    Vec3 w = random_ellipsoid_point(e, rng);
    double pq = e.distance(p, q), qp = e.distance(q, p);
    CHECK(std::abs(pq - qp) <= 2e-3 * (1 + pq));
    CHECK(e.distance(p, p) == doctest::Approx(0.0).epsilon(1e-9));
    double pw = e.distance(p, w), wq = e.distance(w, q);
    CHECK(pq <= pw + wq + 2e-3 * (1 + pq));
  }
}

TEST_CASE("distance agrees with the sphere scaled as a degenerate ellipsoid") {
  // (2,2,2) ellipsoid must reproduce the analytic round distance within 0.1%.
  auto e = MetricSurface::ellipsoid(2.0, 2.0, 2.0);
  auto r = MetricSurface::round_sphere(2.0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    Vec3 p = random_ellipsoid_point(e, rng);
    Vec3 q = random_ellipsoid_point(e, rng);
    double de = e.distance(p, q);
    double dr = r.distance(p, q);
    CHECK(std::abs(de - dr) <= 1e-3 * dr + 1e-9);
  }
}

TEST_CASE("distance_upper is never below the intrinsic distance") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  std::mt19937_64 rng(13);
  for (int i = 0; i < 30; ++i) {
    Vec3 p = random_ellipsoid_point(e, rng);
    Vec3 q = random_ellipsoid_point(e, rng);
    CHECK(e.distance_upper(p, q) >= e.distance(p, q) * (1 - 1e-6));
  }
}

TEST_CASE("json round trip") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  auto e2 = MetricSurface::from_json_string(e.to_json_string());
  CHECK(e2.kind() == SurfaceKind::Ellipsoid);
  CHECK(e2.semi_axes() == e.semi_axes());
  auto r = MetricSurface::from_json_string(R"({"kind":"round","radius":2.0})");
  CHECK(r.is_round());
  CHECK(r.radius() == 2.0);
}

TEST_CASE("bumpy candidate flags") {
  CHECK(MetricSurface::ellipsoid(1.0, 1.1, 1.2).is_bumpy_candidate());
  CHECK_FALSE(MetricSurface::ellipsoid(1.0, 1.0, 1.2).is_bumpy_candidate());
  CHECK_FALSE(MetricSurface::round_sphere(1.0).is_bumpy_candidate());
}

}  // TEST_SUITE
