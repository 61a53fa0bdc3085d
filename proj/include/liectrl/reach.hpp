#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "liectrl/simulator.hpp"
#include "liectrl/types.hpp"

namespace liectrl {

/// Per-channel sampling box: declared bounds for restricted systems, the
/// override when given, otherwise [-1, 1] per channel.
std::vector<std::pair<double, double>> resolve_box(
    const ControlSystem& sys,
    const std::optional<std::vector<std::pair<double, double>>>& box_override =
        std::nullopt);

struct ReachParams {
  double tau = 1.0;
  int samples = 1000;
  std::uint64_t seed = 0;
  int pieces = 8;
  std::vector<std::pair<double, double>> box;
  double dt = 1e-3;
  int threads = 0;  // 0 = hardware concurrency
};

struct EndpointCloud {
  double tau = 0.0;
  std::uint64_t seed = 0;
  std::vector<GroupElement> points;
  std::vector<std::optional<Vec>> log_chart;  // aligned with points
  int dropped_logs = 0;                       // ill-conditioned principal logs
};

/// Endpoints of `samples` trajectories from the identity under independent
/// piecewise-constant controls (values uniform in the box, durations uniform
/// on the simplex). Deterministic given the seed; worker threads merge in
/// index order.
EndpointCloud sample_reachable(const ControlSystem& sys,
                               const GroupRealization& r,
                               const ReachParams& params);

struct AccessibilityResult {
  bool pass = false;
  int dimension = 0;       // affine-hull dimension of the log chart
  double margin = 0.0;     // sampled-direction inradius estimate
  double certificate = 0.0;  // uniform convex-weight lower bound from the LP
  int usable_points = 0;
};

/// Full-dimension + strict-interior test of the origin in the log chart.
/// Interior is certified by a feasibility LP (origin as a strict convex
/// combination); the margin is the support-function minimum over sampled
/// directions. Throws InsufficientSamples when fewer than dim+1 charts are
/// usable.
AccessibilityResult local_accessibility_test(const EndpointCloud& cloud);

struct CompositionReport {
  double max_mismatch = 0.0;
  int pairs = 0;
  bool pass = false;
};

/// Samples endpoint pairs x from A_tau1 and y from A_tau2, and compares
/// x . phi_tau1(y) against the re-solved concatenated control.
CompositionReport composition_check(const ControlSystem& sys,
                                    const GroupRealization& r, double tau1,
                                    double tau2, int n, std::uint64_t seed,
                                    double dt = 1e-3, int pieces = 8);

struct ConnectParams {
  long budget = 100000;  // total trajectory evaluations
  std::uint64_t seed = 0;
  int pieces = 8;
  double dt = 5e-3;
  double residual_target = 1e-3;
  std::vector<std::pair<double, double>> box;
  double tau_min = 0.1;
  double tau_max = 4.0;
};

struct ConnectResult {
  bool found = false;
  double residual = 0.0;
  ControlSignal signal;
  double tau = 0.0;
  long trajectories_used = 0;
};

/// Random-shooting with elite refinement (cross-entropy style) plus a
/// deterministic compass polish, minimizing the endpoint distance to the
/// target. `found` iff the residual reaches the target within budget.
ConnectResult connect(const ControlSystem& sys, const GroupRealization& r,
                      const GroupElement& from, const GroupElement& to,
                      const ConnectParams& params);

}  // namespace liectrl
