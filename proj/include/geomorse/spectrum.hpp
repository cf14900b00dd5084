#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "geomorse/curve.hpp"
#include "geomorse/fermi.hpp"
#include "geomorse/metrics.hpp"
#include "geomorse/surface.hpp"

namespace geomorse {

// Spectrum of the stability operator -f'' - K(s) f on the closed geodesic,
// discretized on the periodic arclength grid.
struct JacobiSpectrum {
  std::vector<double> eigenvalues;  // ascending, lowest m
  Eigen::MatrixXd eigenfunctions;   // n x m, L^2-orthonormal columns
  int index = 0;    // eigenvalues < -tol
  int nullity = 0;  // |eigenvalue| <= tol
  double tol = 1e-6;
  int n = 0;
  double length = 0.0;
  std::string to_json_string() const;
};

JacobiSpectrum stability_spectrum(const DiscreteCurve& geodesic,
                                  const MetricSurface& surface, int m);

// Local min-max family of normal displacements: F_v shifts the
// chart fibers by sum_i v_i Xhat_i(x), so F_{-v} inverts F_v exactly at the
// height level. L^gamma(v) = length(F_v(gamma)) has a strict local max at 0.
class LocalMinMaxFamily {
 public:
  LocalMinMaxFamily(DiscreteCurve core, MetricSurface surface,
                    std::shared_ptr<const FermiChart> chart,
                    Eigen::MatrixXd eigensections, double lambda1,
                    double delta_prime, double boundary_drop);

  int k() const { return int(X_.cols()); }
  double delta_prime() const { return delta_; }
  double lambda1() const { return lambda1_; }
  double boundary_drop() const { return drop_; }
  const DiscreteCurve& core() const { return core_; }
  const FermiChart& chart() const { return *chart_; }
  double core_length() const { return core_length_; }

  // Height of eigensection i at chart coordinate x (periodic linear
  // interpolation of the sampled eigensection).
  double section(int i, double x) const;

  DiscreteCurve apply(const Eigen::VectorXd& v) const;  // F_v(gamma)
  DiscreteCurve apply_to(const DiscreteCurve& c, const Eigen::VectorXd& v) const;
  double length_of(const Eigen::VectorXd& v) const;     // L^gamma(v)
  Eigen::VectorXd grad_length(const Eigen::VectorXd& v, double fd) const;
  Eigen::MatrixXd hessian_length(const Eigen::VectorXd& v, double fd) const;

  // eta_i(c(x,y)) = y * Xhat_i(x), clamped to [-1, 1].
  double eta(int i, const SurfacePoint& p) const;

 private:
  DiscreteCurve core_;
  MetricSurface surface_;
  std::shared_ptr<const FermiChart> chart_;
  Eigen::MatrixXd X_;  // nx x k
  double lambda1_, delta_, drop_, core_length_;
};

LocalMinMaxFamily build_local_minmax(const DiscreteCurve& geodesic,
                                     const MetricSurface& surface,
                                     const JacobiSpectrum& spectrum,
                                     double half_width = 0.0);

// L*(V) = |V| + (|lambda1|+1) sum_i (int eta_i dV)^2.
double l_star(const VarifoldSample& v, const LocalMinMaxFamily& family);

// Integrates v' = -(1-|v/delta'|^2) grad L^gamma(v) until the trajectory
// leaves the ball; L non-increasing along the way.
std::vector<Eigen::VectorXd> boundary_escape_flow(
    const LocalMinMaxFamily& family, const Eigen::VectorXd& start);

}  // namespace geomorse
