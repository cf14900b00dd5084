#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geomorse/curve.hpp"
#include "geomorse/surface.hpp"

namespace geomorse {

// Tubular-neighborhood coordinates around a closed geodesic: arclength x in
// [0, L) along the core, signed normal distance y in [-h, h], with the metric
// ds^2 = J(x,y)^2 dx^2 + dy^2. J is tabulated on the (x, y) lattice by
// integrating J_yy = -K J along the normal geodesics shot from each x node.
class FermiChart {
 public:
  const MetricSurface& surface() const { return surface_; }
  const DiscreteCurve& core() const { return core_; }
  double L() const { return L_; }
  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const Eigen::MatrixXd& J() const { return J_; }           // nx x ny
  const Eigen::MatrixXd& K_table() const { return K_; }      // nx x ny
  const std::vector<std::vector<Vec3>>& lattice_points() const { return pts_; }

  // Point maps. to_surface interpolates the lattice (exact closed form on
  // round-sphere charts); chart_coords inverts it. Both throw out-of-tube
  // when |y| exceeds h.
  SurfacePoint to_surface(double x, double y) const;
  std::pair<double, double> chart_coords(const SurfacePoint& p) const;
  bool try_chart_coords(const SurfacePoint& p, double* x, double* y) const;
  bool in_tube(const SurfacePoint& p) const;

  // Unit direction of the normal-geodesic fiber (d/dy) at chart point (x,y).
  Vec3 fiber_direction(double x, double y) const;

  double J_at(double x, double y) const;
  // -J_y/J at (x, t) by central differences of the J table.
  double level_curvature_at(double x, double t) const;

  std::string to_json_string() const;

 private:
  friend FermiChart build_chart(const DiscreteCurve&, const MetricSurface&,
                                double, int, int);
  MetricSurface surface_{MetricSurface::round_sphere(1.0)};
  DiscreteCurve core_;
  double L_ = 0.0, h_ = 0.0;
  int nx_ = 0, ny_ = 0;
  std::vector<double> xs_, ys_;
  Eigen::MatrixXd J_, K_;
  std::vector<std::vector<Vec3>> pts_;
  // Analytic round-sphere chart frame (exact point maps when set).
  bool analytic_ = false;
  Vec3 fu_, fv_, fw_;
  double r_ = 1.0;
  // Conformal transform data when the chart lives on an overlay surface:
  // maps between base normal distance y and overlay normal distance.
  bool transformed_ = false;
  double phi0_ = 0.0;
  std::vector<double> ybase_dense_, ytil_dense_;
  double base_y(double ytil) const;
  double ytil_of(double ybase) const;
};

// Single-valued height function over the chart's x grid; the curve
// { c(x, g(x)) }.
struct GraphCurve {
  std::vector<double> heights;  // one per chart x node
  DiscreteCurve to_curve(const FermiChart& chart) const;
};

// Conformal bump exp(2 phi) g supported in the host chart's tube, with
// phi(c(x,y)) = -A exp(-B/(h^2-y^2)). Evaluations use the overflow-safe form
// phi(y) = -(eps/2) exp(-B y^2 / (h^2 (h^2 - y^2))).
class BumpFunction : public ConformalBump,
                     public std::enable_shared_from_this<BumpFunction> {
 public:
  BumpFunction(std::shared_ptr<const FermiChart> host, double M, double beta,
               double eps);

  double A() const;
  double B() const { return B_; }
  double h() const { return h_; }
  double M() const { return M_; }
  double beta() const { return beta_; }
  double eps() const { return eps_; }
  double phi_core() const { return -eps_ / 2.0; }
  const FermiChart& host() const { return *host_; }
  std::shared_ptr<const FermiChart> host_ptr() const { return host_; }

  double phi_of_y(double y) const;
  double dphi_of_y(double y) const;
  double d2phi_of_y(double y) const;

  // ConformalBump interface.
  bool contains(const Vec3& p) const override;
  double phi_at(const Vec3& p) const override;
  double directional_derivative(const Vec3& p, const Vec3& dir) const override;
  double laplacian(const Vec3& p) const override;
  bool on_core(const Vec3& p) const override;
  double core_hessian() const override { return M_; }

 private:
  std::shared_ptr<const FermiChart> host_;
  double M_, beta_, eps_, B_, h_;
};

FermiChart build_chart(const DiscreteCurve& geodesic,
                       const MetricSurface& surface, double h, int nx, int ny);

std::vector<double> level_curvature(const FermiChart& chart, double t);
bool is_mean_convex(const FermiChart& chart);

int winding_number(const DiscreteCurve& c, const FermiChart& chart);
double horizontal_width(const DiscreteCurve& c, const FermiChart& chart);
std::optional<GraphCurve> is_graphical(const DiscreteCurve& c,
                                       const FermiChart& chart);

// Curves { c(x, (1-t_k) g(x)) } for t_k uniform in [0,1]; the last one is the
// core.
std::vector<DiscreteCurve> squeeze_homotopy(const GraphCurve& g0,
                                            const FermiChart& chart,
                                            int steps);

struct TotalAngle {
  double angle_integral;  // integral of |theta| ds
  double cos_defect;      // integral of (1 - cos theta) ds
};
TotalAngle total_angle(const DiscreteCurve& c, const FermiChart& chart);

std::shared_ptr<BumpFunction> make_bump(std::shared_ptr<const FermiChart> chart,
                                        double M, double beta);

struct JacobianBounds {
  double sup_jac;    // sup exp(phi) over the tube
  double lip_bound;  // 1 + sup |phi'(y) exp(phi)|
};
JacobianBounds jacobian_bounds(const BumpFunction& bump);

// Chart-metric length of a curve given by chart samples (sum over segments of
// sqrt((J_mid dx)^2 + dy^2)); used for exact squeeze monotonicity checks.
double chart_length(const FermiChart& chart, const std::vector<double>& x,
                    const std::vector<double>& y);

}  // namespace geomorse
