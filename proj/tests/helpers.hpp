#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "geomorse/curve.hpp"
#include "geomorse/surface.hpp"

namespace testutil {

using geomorse::DiscreteCurve;
using geomorse::MetricSurface;
using geomorse::Vec3;
using geomorse::kPi;

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12, int depth = 24) {
  double c = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fc = f(c);
  std::function<double(double, double, double, double, double, double, int)>
      rec = [&](double x0, double x2, double f0, double f1, double f2,
                double whole, int d) -> double {
    double x1l = 0.5 * (x0 + 0.5 * (x0 + x2));
    double xm = 0.5 * (x0 + x2);
    double x1r = 0.5 * (xm + x2);
    double fl = f(x1l), fr = f(x1r);
    double left = (xm - x0) / 6 * (f0 + 4 * fl + f1);
    double right = (x2 - xm) / 6 * (f1 + 4 * fr + f2);
    if (d <= 0 || std::abs(left + right - whole) < 15 * tol)
      return left + right + (left + right - whole) / 15;
    return rec(x0, xm, f0, fl, f1, left, d - 1) +
           rec(xm, x2, f1, fr, f2, right, d - 1);
  };
  double whole = (b - a) / 6 * (fa + 4 * fc + fb);
  return rec(a, b, fa, fc, fb, whole, depth);
}

// Perimeter of the planar ellipse with semi-axes (a, b).
inline double ellipse_perimeter(double a, double b) {
  return adaptive_simpson(
      [&](double t) {
        double s = std::sin(t), c = std::cos(t);
        return std::sqrt(a * a * s * s + b * b * c * c);
      },
      0.0, 2 * kPi);
}

// Closed curve sampled from a parametrization, projected to the surface.
inline DiscreteCurve sampled_curve(const MetricSurface& s, int n,
                                   const std::function<Vec3(double)>& gamma) {
  std::vector<Vec3> v(n);
  for (int i = 0; i < n; ++i) v[i] = s.project(gamma(2 * kPi * i / n));
  return DiscreteCurve(std::move(v));
}

// Latitude circle at polar angle theta0 on the round unit sphere.
inline DiscreteCurve latitude_circle(const MetricSurface& s, double theta0,
                                     int n) {
  return sampled_curve(s, n, [&](double t) {
    return Vec3(std::sin(theta0) * std::cos(t), std::sin(theta0) * std::sin(t),
                std::cos(theta0));
  });
}

// Smooth random wobble of a great circle: unit-sphere curve with a few
// Fourier modes of normal displacement, amplitude amp.
inline DiscreteCurve wobbled_circle(const MetricSurface& s, std::mt19937_64& rng,
                                    double amp, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double a2 = u(rng), b2 = u(rng), a3 = u(rng), b3 = u(rng);
  return sampled_curve(s, n, [&](double t) {
    double z = amp * (a2 * std::cos(2 * t) + b2 * std::sin(2 * t) +
                      0.5 * (a3 * std::cos(3 * t) + b3 * std::sin(3 * t)));
    return Vec3(std::cos(t), std::sin(t), z).normalized();
  });
}

}  // namespace testutil
