#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "geomorse/curve.hpp"
#include "geomorse/flow.hpp"
#include "geomorse/spectrum.hpp"
#include "geomorse/surface.hpp"

namespace geomorse {

// Discrete sweepout generated by a family of affine-plane sections. Members
// are produced on demand from the lattice coordinate (large mode-3 lattices
// are never materialized at once); boundary members are point curves.
class Sweepout {
 public:
  int mode() const { return mode_; }
  const std::array<int, 3>& dims() const { return dims_; }
  long member_count() const;
  DiscreteCurve member(const std::array<int, 3>& idx) const;
  // Perimeter of the member by direct quadrature of the section (no
  // projection error); cheap enough to scan the whole lattice.
  double member_length(const std::array<int, 3>& idx) const;
  const std::string& descriptor() const { return descriptor_; }
  int resolution() const { return n_; }

  // Plane of the member: unit normal and offset; nullopt for point members.
  struct Plane {
    Vec3 normal;
    double offset;
  };
  Plane plane(const std::array<int, 3>& idx) const;

 private:
  friend Sweepout plane_sweepout(const MetricSurface&, int, int, int);
  MetricSurface surface_{MetricSurface::round_sphere(1.0)};
  int mode_ = 1;
  std::array<int, 3> dims_{1, 1, 1};
  int n_ = 64;
  std::string descriptor_;
  Vec3 axis1_, axis2_, axis3_;  // lattice frame (mode-dependent roles)
};

Sweepout plane_sweepout(const MetricSurface& surface, int mode, int resolution,
                        int curve_resolution = 64);

struct WidthEstimate {
  double value = 0.0;
  std::array<int, 3> parameter{0, 0, 0};
  double tightening_time = 0.0;
  DiscreteCurve limit_curve;
  FlowStatus limit_status = FlowStatus::running;
  std::vector<std::pair<double, double>> history;  // sup length vs time
  // Near-maximal concentration report: every checked slice with length >=
  // value - window had F-upper to the limit geodesic below f_radius.
  double window = 0.0;
  double f_radius = 0.0;
  int checked_slices = 0;
  bool concentrated = true;
  long flowed_members = 0;
  long pruned_members = 0;
  std::string to_json_string() const;
};

struct WidthBudget {
  FlowBudget flow;
  double t_target = 30.0;
  double window = 0.05;       // near-maximal band to verify concentration on
  int max_checked_slices = 12;
  int refine_resolution = 512;
};

// Tightens the family and reports the plateau of the sup length. Members
// whose initial length already sits below the best flowed limit are pruned:
// the flow only shortens, so they can never attain the sup.
WidthEstimate width_estimate(const Sweepout& sw, const MetricSurface& surface,
                             const WidthBudget& budget);

std::pair<DiscreteCurve, JacobiSpectrum> minmax_geodesic(
    const Sweepout& sw, const MetricSurface& surface, const WidthBudget& budget);

}  // namespace geomorse
