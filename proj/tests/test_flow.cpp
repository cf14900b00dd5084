#include <doctest.h>

#include <cmath>
#include <random>

#include "geomorse/flow.hpp"
#include "geomorse/metrics.hpp"
#include "helpers.hpp"

using namespace geomorse;
using namespace testutil;

TEST_SUITE("flow") {

TEST_CASE("the equator is a fixed point") {
  auto s = MetricSurface::round_sphere(1.0);
  auto eq = latitude_circle(s, kPi / 2, 256);
  auto st = evolve(eq, s, FlowBudget{});
  CHECK(st.status == FlowStatus::converged_geodesic);
  CHECK(st.max_curvature < 1e-6);
  double moved = 0.0;
  for (int i = 0; i < 256; ++i)
    moved = std::max(moved, (st.curve.vertex(i) - eq.vertex(i)).norm());
  CHECK(moved < 1e-9);
  CHECK(length(st.curve, s) ==
        doctest::Approx(length(eq, s)).epsilon(1e-12));
  CHECK(std::string(flow_status_name(st.status)) == "converged_geodesic");
}

TEST_CASE("a latitude circle collapses to a point near its pole") {
  auto s = MetricSurface::round_sphere(1.0);
  auto lat = latitude_circle(s, 0.4, 128);
  FlowBudget b;
  b.t_max = 1.0;
  auto st = evolve(lat, s, b);
  CHECK(st.status == FlowStatus::converged_point);
  CHECK(st.curve.is_point());
  CHECK((st.curve.vertex(0) - Vec3(0, 0, 1)).norm() < 0.05);
  // A round circle collapses in time -log(cos(theta0)).
  CHECK(st.time == doctest::Approx(-std::log(std::cos(0.4))).epsilon(0.05));
  // Length strictly decreases from start to finish.
  CHECK(st.length_history.back().second < st.length_history.front().second);
}

TEST_CASE("length is monotone along the flow of a perturbed equator") {
  auto s = MetricSurface::round_sphere(1.0);
  std::mt19937_64 rng(8);
  auto c = wobbled_circle(s, rng, 0.05, 128);
  auto st = make_flow_state(c, s);
  double prev = length(c, s);
  for (int k = 0; k < 500; ++k) {
    double msp = 1e9;
    for (int i = 0; i < 128; ++i)
      msp = std::min(msp, (st.curve.vertex(i + 1) - st.curve.vertex(i)).norm());
    st = csf_step(st, s, 0.35 * msp * msp);
    double len = st.length_history.back().second;
    // Occasional resampling can nudge the discrete length by a hair.
    CHECK(len <= prev + 1e-8);
    prev = len;
  }
  CHECK(prev < length(c, s));
}

TEST_CASE("principal ellipses are flow fixed points") {
  auto e = MetricSurface::ellipsoid(1.0, 1.1, 1.2);
  for (const auto& ell : principal_ellipses(e, 256)) {
    double len0 = length(ell, e);
    auto st = evolve(ell, e, FlowBudget{});
    CHECK(st.status == FlowStatus::converged_geodesic);
    CHECK(st.max_curvature < 1e-6);
    CHECK(length(st.curve, e) == doctest::Approx(len0).epsilon(1e-8));
    // Varifold mass of the limit equals its length.
    CHECK(to_varifold(st.curve, e).total_mass() ==
          doctest::Approx(length(st.curve, e)).epsilon(1e-12));
  }
}

TEST_CASE("oversized steps are rejected") {
  auto s = MetricSurface::round_sphere(1.0);
  auto st = make_flow_state(latitude_circle(s, kPi / 2, 64), s);
  CHECK_THROWS_WITH_AS(csf_step(st, s, 1.0),
                       doctest::Contains("step-size"), Error);
}

TEST_CASE("stepping a finished state is rejected") {
  auto s = MetricSurface::round_sphere(1.0);
  auto st = evolve(latitude_circle(s, kPi / 2, 64), s, FlowBudget{});
  REQUIRE(st.status == FlowStatus::converged_geodesic);
  CHECK_THROWS_WITH_AS(csf_step(st, s, 1e-6),
                       doctest::Contains("constraint-violation"), Error);
}

TEST_CASE("self-intersection is detected during the flow") {
  auto s = MetricSurface::round_sphere(1.0);
  auto eight = sampled_curve(s, 128, [](double t) {
    return Vec3(std::sin(2 * t), std::sin(t), 2.0 + std::cos(t)).normalized();
  });
  auto st = make_flow_state(eight, s);
  double msp = 1e9;
  for (int i = 0; i < 128; ++i)
    msp = std::min(msp, (st.curve.vertex(i + 1) - st.curve.vertex(i)).norm());
  CHECK_THROWS_WITH_AS(csf_step(st, s, 0.3 * msp * msp),
                       doctest::Contains("embeddedness-loss"), Error);
}

TEST_CASE("tightening a latitude family keeps its width at the equator") {
  auto s = MetricSurface::round_sphere(1.0);
  std::vector<DiscreteCurve> family;
  family.push_back(DiscreteCurve::point_curve(Vec3(0, 0, 1)));
  for (double th : {0.5, 0.9, kPi / 2, kPi - 0.9, kPi - 0.5})
    family.push_back(latitude_circle(s, th, 128));
  family.push_back(DiscreteCurve::point_curve(Vec3(0, 0, -1)));
  auto states = tighten_family(family, s, 1.2, FlowBudget{});
  REQUIRE(states.size() == family.size());
  CHECK(states.front().status == FlowStatus::converged_point);
  CHECK(states.back().status == FlowStatus::converged_point);
  double sup = 0.0;
  int arg = -1;
  for (size_t i = 0; i < states.size(); ++i) {
    double len = length(states[i].curve, s);
    if (len > sup) {
      sup = len;
      arg = int(i);
    }
  }
  CHECK(arg == 3);  // the equator member holds the sup
  CHECK(sup == doctest::Approx(2 * kPi).epsilon(1e-3));
  CHECK(states[3].status == FlowStatus::converged_geodesic);
  // Off-center members have collapsed by t = 1.2 > -log(cos 0.9).
  CHECK(states[1].status == FlowStatus::converged_point);
  CHECK(states[2].status == FlowStatus::converged_point);
}

TEST_CASE("disjoint curves stay apart under the flow") {
  auto s = MetricSurface::round_sphere(1.0);
  auto a = latitude_circle(s, 0.7, 128);
  auto b = latitude_circle(s, kPi - 0.7, 128);
  double before = 1e9;
  for (int i = 0; i < 128; ++i)
    for (int j = 0; j < 128; ++j)
      before = std::min(before, (a.vertex(i) - b.vertex(j)).norm());
  auto states = tighten_family({a, b}, s, 0.2, FlowBudget{});
  double after = 1e9;
  for (int i = 0; i < states[0].curve.resolution(); ++i)
    for (int j = 0; j < states[1].curve.resolution(); ++j)
      after = std::min(after,
                       (states[0].curve.vertex(i) - states[1].curve.vertex(j))
                           .norm());
  CHECK(after >= before - 1e-9);
}

TEST_CASE("full history is recorded on request") {
  auto s = MetricSurface::round_sphere(1.0);
  FlowBudget b;
  b.history = true;
  b.t_max = 0.05;
  auto st = evolve(latitude_circle(s, 1.0, 64), s, b);
  CHECK(long(st.length_history.size()) == st.step_count + 1);
  for (size_t i = 1; i < st.length_history.size(); ++i) {
    CHECK(st.length_history[i].first > st.length_history[i - 1].first);
    CHECK(st.length_history[i].second <=
          st.length_history[i - 1].second + 1e-8);
  }
}

}  // TEST_SUITE
