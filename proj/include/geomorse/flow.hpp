#pragma once

#include <utility>
#include <vector>

#include "geomorse/curve.hpp"
#include "geomorse/surface.hpp"

namespace geomorse {

enum class FlowStatus { running, converged_geodesic, converged_point, step_limit };

const char* flow_status_name(FlowStatus s);

struct FlowState {
  DiscreteCurve curve;
  double time = 0.0;
  long step_count = 0;
  std::vector<std::pair<double, double>> length_history;  // (time, length)
  FlowStatus status = FlowStatus::running;
  double max_curvature = 0.0;
  // Steps since the length last moved by more than the plateau threshold.
  long plateau_steps = 0;
  double plateau_length = 0.0;
};

struct FlowBudget {
  double dt = 0.0;  // 0: auto, 0.35 * (min spacing)^2
  double t_max = 20.0;
  long max_steps = 2'000'000;
  long embed_check_every = 100;  // full self-intersection scan cadence
  double point_threshold = 1e-6;
  double curvature_tol = 1e-6;
  // Net length drift allowed across a full quiet window (curvature sup below
  // curvature_tol throughout) before declaring convergence.
  // (At curvature sup 1e-6 the flow itself moves the length by < 1e-11 per
  // window; the remaining drift is discrete spacing redistribution.)
  double plateau_tol = 1e-6;
  long plateau_window = 100;
  bool history = false;  // record every step's (time, length)
};

FlowState make_flow_state(const DiscreteCurve& c, const MetricSurface& surface);

// One semi-implicit curve-shortening step: backward tangential diffusion of
// the ambient coordinates, explicit conformal-overlay correction, projection,
// and resampling when the spacing drifts. Requires dt <= 0.4*(min spacing)^2.
FlowState csf_step(const FlowState& s, const MetricSurface& surface, double dt);

// Steps until convergence to a geodesic (curvature sup below tolerance and a
// length plateau) or a point, or until the budget runs out.
FlowState evolve(const DiscreteCurve& c, const MetricSurface& surface,
                 const FlowBudget& budget);

// Flows every member to the common time t_target (point curves are fixed).
std::vector<FlowState> tighten_family(const std::vector<DiscreteCurve>& family,
                                      const MetricSurface& surface,
                                      double t_target, const FlowBudget& budget);

}  // namespace geomorse
