#pragma once

#include <memory>
#include <optional>
#include <string>

#include "geomorse/common.hpp"

namespace geomorse {

// A point constrained to the surface. Kept as a thin wrapper so call sites
// state intent; the residual tolerance is enforced where it matters.
using SurfacePoint = Vec3;

enum class SurfaceKind { Round, Ellipsoid, ConformalOverlay };

// Conformal bump attached to a host Fermi chart. Implemented by
// fermi::BumpFunction; the surface module only needs pointwise values of the
// conformal exponent phi and its chart-normal derivatives.
class ConformalBump {
 public:
  virtual ~ConformalBump() = default;
  // True when p lies inside the host tube (phi may be nonzero there).
  virtual bool contains(const Vec3& p) const = 0;
  virtual double phi_at(const Vec3& p) const = 0;
  // dphi/dy in host-chart normal coordinate, as an ambient gradient dotted
  // with a given unit direction: returns grad(phi) . dir.
  virtual double directional_derivative(const Vec3& p, const Vec3& dir) const = 0;
  // Laplace-Beltrami of phi in the base metric.
  virtual double laplacian(const Vec3& p) const = 0;
  // True when p lies on the core geodesic of the host chart (|y| below the
  // chart tolerance).
  virtual bool on_core(const Vec3& p) const = 0;
  // Hessian of phi in the doubly-normal direction on the core.
  virtual double core_hessian() const = 0;
};

// Immutable 2-sphere geometry: round sphere or triaxial ellipsoid, with an
// optional conformal overlay e^{2 phi} g supported inside a Fermi tube.
// All operations are pure; instances are safely shareable across threads.
class MetricSurface {
 public:
  static MetricSurface round_sphere(double radius);
  static MetricSurface ellipsoid(double a, double b, double c);
  // Same embedding with a conformal overlay attached.
  MetricSurface with_overlay(std::shared_ptr<const ConformalBump> bump) const;

  static MetricSurface from_json_string(const std::string& text);
  std::string to_json_string() const;

  SurfaceKind kind() const { return kind_; }
  const Vec3& semi_axes() const { return axes_; }
  double radius() const;
  bool is_round() const { return round_; }
  // Degenerate (two axes equal) ellipsoids and round spheres are non-bumpy.
  bool is_bumpy_candidate() const;
  double min_axis() const { return axes_.minCoeff(); }
  double diameter_bound() const;

  const std::shared_ptr<const ConformalBump>& overlay() const { return overlay_; }
  // The same embedding with the overlay stripped.
  MetricSurface base_surface() const;

  // |x^2/a^2 + y^2/b^2 + z^2/c^2 - 1|
  double residual(const Vec3& p) const;
  void require_on_surface(const Vec3& p, double tol = 1e-12) const;

  // Nearest-point projection; idempotent (a point already on the surface is
  // returned unchanged). Throws "projection-ambiguity" outside the tube of
  // radius min_axis()/2.
  SurfacePoint project(const Vec3& q) const;
  // Unit outward normal of the embedding.
  Vec3 normal(const SurfacePoint& p) const;
  // Projects v onto the tangent plane at p.
  Vec3 tangent_project(const SurfacePoint& p, const Vec3& v) const;

  // Gaussian curvature of the embedding (no overlay).
  double base_gaussian_curvature(const SurfacePoint& p) const;
  // Curvature of the effective metric: base K off-overlay; inside the overlay
  // the conformal formula e^{-2phi}(K - lap phi), except on the core geodesic
  // where K - M is returned exactly.
  double gaussian_curvature(const SurfacePoint& p) const;

  // Conformal exponent phi (0 without overlay / outside the tube) and the
  // metric length weight e^{phi}.
  double phi(const Vec3& p) const;
  double length_weight(const Vec3& p) const;

  // Intrinsic distance, within 0.1%. Round spheres are analytic; ellipsoids
  // use discrete geodesic relaxation with Richardson extrapolation.
  double distance(const SurfacePoint& p, const SurfacePoint& q) const;

  // Cheap certified upper bound on distance(): length of an explicit on-
  // surface path, inflated to cover the discretization error. Never below
  // the true intrinsic distance.
  double distance_upper(const SurfacePoint& p, const SurfacePoint& q) const;

 private:
  MetricSurface(SurfaceKind kind, Vec3 axes);

  SurfaceKind kind_;
  Vec3 axes_;
  bool round_ = false;
  std::shared_ptr<const ConformalBump> overlay_;
};

}  // namespace geomorse
