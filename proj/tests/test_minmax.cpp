#include <doctest.h>

#include <cmath>
#include <memory>

#include "geomorse/fermi.hpp"
#include "geomorse/metrics.hpp"
#include "geomorse/minmax.hpp"
#include "helpers.hpp"

using namespace geomorse;
using namespace testutil;

TEST_SUITE("minmax") {

TEST_CASE("round mode-1 sweepout: members, boundary points, lengths") {
  auto s = MetricSurface::round_sphere(1.0);
  auto sw = plane_sweepout(s, 1, 15, 64);
  CHECK(sw.member_count() == 15);
  CHECK(sw.dims()[0] == 15);
  CHECK_FALSE(sw.descriptor().empty());

  CHECK(sw.member({0, 0, 0}).is_point());
  CHECK(sw.member({14, 0, 0}).is_point());
  CHECK(sw.member_length({0, 0, 0}) == 0.0);

  // Central plane through the origin: a great circle.
  CHECK(sw.member_length({7, 0, 0}) == doctest::Approx(2 * kPi).epsilon(1e-10));
  auto central = sw.member({7, 0, 0});
  CHECK_FALSE(central.is_point());
  CHECK(length(central, s) == doctest::Approx(2 * kPi).epsilon(1e-3));
  // Quadrature length is an upper proxy consistent with the discrete length.
  for (int i = 1; i < 14; ++i) {
    auto m = sw.member({i, 0, 0});
    CHECK(sw.member_length({i, 0, 0}) >=
          length(m, s) * (1 - 1e-9));
    CHECK(sw.member_length({i, 0, 0}) ==
          doctest::Approx(length(m, s)).epsilon(1e-2));
  }
  // Neighboring slices stay close: the family is a genuine sweepout.
  for (int i = 1; i < 13; ++i) {
    double d = hausdorff_distance(sw.member({i, 0, 0}), sw.member({i + 1, 0, 0}), s);
    CHECK(d > 0.0);
    CHECK(d < 0.6);
  }
}

TEST_CASE("round mode-1 width is 2 pi at the central slice") {
  auto s = MetricSurface::round_sphere(1.0);
  auto sw = plane_sweepout(s, 1, 15, 64);
  WidthBudget b;
  b.refine_resolution = 256;
  auto w = width_estimate(sw, s, b);
  CHECK(w.value == doctest::Approx(2 * kPi).epsilon(5e-3));
  CHECK(w.limit_status == FlowStatus::converged_geodesic);
  CHECK(w.parameter == std::array<int, 3>{7, 0, 0});
  CHECK(w.concentrated);
  CHECK(w.flowed_members >= 1);
  CHECK(w.flowed_members + w.pruned_members == 13);  // 15 minus 2 points
  CHECK_FALSE(w.history.empty());
  auto j = w.to_json_string();
  for (const char* key :
       {"\"value\"", "\"parameter\"", "\"tightening_time\"", "\"limit_status\"",
        "\"history\"", "\"window\"", "\"f_radius\"", "\"checked_slices\"",
        "\"concentrated\"", "\"flowed_members\"", "\"pruned_members\"",
        "\"label\""})
    CHECK(j.find(key) != std::string::npos);
}

TEST_CASE("ellipsoid widths match the principal perimeters in order") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  WidthBudget b;
  b.refine_resolution = 256;
  double oracle[3] = {ellipse_perimeter(1.0, 1.1), ellipse_perimeter(1.0, 1.2),
                      ellipse_perimeter(1.1, 1.2)};
  double got[3];
  for (int mode = 1; mode <= 3; ++mode) {
    auto sw = plane_sweepout(e, mode, 16, 64);
    auto w = width_estimate(sw, e, b);
    CHECK(w.limit_status == FlowStatus::converged_geodesic);
    CHECK(w.concentrated);
    got[mode - 1] = w.value;
    CHECK(w.value == doctest::Approx(oracle[mode - 1]).epsilon(1e-3));
  }
  CHECK(got[0] <= got[1]);
  CHECK(got[1] <= got[2]);
}

TEST_CASE("the mode-1 min-max geodesic has index 1") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  WidthBudget b;
  b.refine_resolution = 256;
  auto [curve, spec] = minmax_geodesic(plane_sweepout(e, 1, 16, 64), e, b);
  CHECK(spec.index == 1);
  CHECK(spec.nullity == 0);
  CHECK(is_embedded(curve));
  CHECK(to_varifold(curve, e).total_mass() ==
        doctest::Approx(length(curve, e)).epsilon(1e-12));
  CHECK(length(curve, e) ==
        doctest::Approx(ellipse_perimeter(1.0, 1.1)).epsilon(1e-3));
}

TEST_CASE("a three-member family still carries the width") {
  auto s = MetricSurface::round_sphere(1.0);
  auto sw = plane_sweepout(s, 1, 3, 64);
  CHECK(sw.member({0, 0, 0}).is_point());
  CHECK(sw.member({2, 0, 0}).is_point());
  WidthBudget b;
  b.refine_resolution = 256;
  auto w = width_estimate(sw, s, b);
  CHECK(w.value == doctest::Approx(2 * kPi).epsilon(5e-3));
  CHECK(w.flowed_members == 1);
  CHECK(w.pruned_members == 0);
}

TEST_CASE("sweepout validation") {
  auto s = MetricSurface::round_sphere(1.0);
  CHECK_THROWS_WITH_AS(plane_sweepout(s, 0, 15, 64),
                       doctest::Contains("constraint-violation"), Error);
  CHECK_THROWS_WITH_AS(plane_sweepout(s, 4, 15, 64),
                       doctest::Contains("constraint-violation"), Error);
  CHECK_THROWS_WITH_AS(plane_sweepout(s, 1, 2, 64),
                       doctest::Contains("resolution"), Error);
  auto host = std::make_shared<const FermiChart>(
      build_chart(latitude_circle(s, kPi / 2, 512), s, 0.3, 64, 33));
  auto ps = s.with_overlay(make_bump(host, 2.0, 0.5));
  CHECK_THROWS_WITH_AS(plane_sweepout(ps, 1, 15, 64),
                       doctest::Contains("unsupported-kind"), Error);
}

}  // TEST_SUITE
