#pragma once

#include <array>
#include <functional>
#include <vector>

#include "tronquee/borel.hpp"
#include "tronquee/common.hpp"
#include "tronquee/equations.hpp"
#include "tronquee/series.hpp"

namespace tronquee {

// h'' = f(w, h, h')
using SecondOrderRhs = std::function<cx(cx w, cx h, cx dh)>;

SecondOrderRhs canonical_rhs(const NormalizedForm& nf);
// v = 1/h satisfies v'' = -v^2 f(w, 1/v, -v'/v^2) + 2 v'^2 / v.
SecondOrderRhs reciprocal_rhs(SecondOrderRhs f);

struct PathSpec {
  std::vector<cx> waypoints;
  double max_step = 0.5;
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double blowup_threshold = 1e8;
  long max_steps = 200000;
};

struct TrajectoryNode {
  cx w;
  cx h;
  cx dh;
};

// Dense output of one Dormand-Prince step: w = w0 + dir * t, t in [0, length].
struct DenseStep {
  cx w0;
  cx dir;
  double length;
  std::array<std::array<cx, 5>, 2> rcont;
};

struct Trajectory {
  std::vector<TrajectoryNode> nodes;
  std::vector<DenseStep> steps;  // steps[i] joins nodes[i] and nodes[i+1]
  bool blowup = false;
  cx blowup_at{};
  long rejected_steps = 0;

  const TrajectoryNode& end() const { return nodes.back(); }
  TrajectoryNode interpolate(size_t step, double theta) const;
  // Points spaced at most `spacing` apart along the path, endpoints included.
  std::vector<TrajectoryNode> sample(double spacing) const;
};

// Adaptive Dormand-Prince 5(4) with PI step control along the polyline
// initial.w = waypoints[0] -> waypoints[1] -> ... Stops early, with
// blowup = true, once |h| exceeds the blowup threshold.
Trajectory integrate_path(const SecondOrderRhs& f, const TrajectoryNode& initial, const PathSpec& path);
Trajectory integrate_path(const NormalizedForm& nf, const TrajectoryNode& initial, const PathSpec& path);

struct SeedResult {
  TrajectoryNode node;
  double error_estimate;
  bool small_w_warning;  // |w0| below the recommended 30
};
SeedResult seed_from_borel(const TronqueeSum& sum, cx C, Side side, cx w0);
SeedResult seed_from_borel(const NormalizedForm& nf, const Transseries& ts, cx C, Side side, cx w0);

enum class RefineVariable { h, reciprocal };
const char* to_string(RefineVariable v);

struct PoleObservation {
  cx location;
  int order_estimate = 0;
  cx laurent_coeff;
  double uncertainty = 0.0;
  bool converged = false;
  RefineVariable variable = RefineVariable::reciprocal;
};

struct PoleSearchOptions {
  double sample_spacing = 0.05;
  double min_peak = 1.0;      // local maxima of |h| below this are ignored
  RefineVariable variable = RefineVariable::reciprocal;
  double tol = 1e-12;         // relative Newton step size for convergence
  int max_iter = 60;
  double max_jump = 1.0;      // longest Newton step
  double rel_tol = 1e-13;     // reintegration tolerances
  double abs_tol = 1e-15;
};

// Pole candidates are local maxima of |h| along the trajectory plus the
// blowup point. Each is refined by Newton steps w <- w + m h/h' (m = local
// order estimate), reintegrating the ODE to every new iterate.
std::vector<PoleObservation> detect_poles(const SecondOrderRhs& f, const Trajectory& traj,
                                          const PoleSearchOptions& opt = {});
std::vector<PoleObservation> detect_poles(const NormalizedForm& nf, const Trajectory& traj,
                                          const PoleSearchOptions& opt = {});

// Refine a single pole starting from a point of the solution.
PoleObservation refine_pole(const SecondOrderRhs& f, const TrajectoryNode& start, const PoleSearchOptions& opt = {});

// Merge observations closer than 3x the larger uncertainty.
std::vector<PoleObservation> cluster_poles(std::vector<PoleObservation> poles);

struct FitSample {
  cx w;
  cx h;
};

enum class FitBaseline { borel, truncated };

struct FitResult {
  cx C;
  double fit_residual;  // max relative deviation of per-sample estimates from the mean
  Side side;
  bool below_noise;
  double noise_floor;
  std::vector<cx> per_sample;
};

// C = mean_i (h_i - h0(w_i)) / (e^{-w_i} w_i^{-beta1} s1(w_i)).
FitResult fit_constant(const TronqueeSum& sum, const std::vector<FitSample>& samples, Side side,
                       FitBaseline baseline = FitBaseline::borel);

}  // namespace tronquee
