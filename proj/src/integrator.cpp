#include "tronquee/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tronquee {

SecondOrderRhs canonical_rhs(const NormalizedForm& nf) {
  return [nf](cx w, cx h, cx dh) { return nf.second_derivative(w, h, dh); };
}

SecondOrderRhs reciprocal_rhs(SecondOrderRhs f) {
  return [f = std::move(f)](cx w, cx v, cx dv) {
    return -v * v * f(w, 1.0 / v, -dv / (v * v)) + 2.0 * dv * dv / v;
  };
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

using Y = std::array<cx, 2>;

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

Y axpy(const Y& y, double h, std::initializer_list<std::pair<double, const Y*>> terms) {
  Y out = y;
  for (const auto& [c, k] : terms)
    for (int i = 0; i < 2; ++i) out[i] += h * c * (*k)[i];
  return out;
}

void check_path(const TrajectoryNode& initial, const PathSpec& path) {
  if (path.waypoints.empty()) throw Error(ErrorKind::path, "path has no waypoints");
  if (std::abs(path.waypoints.front() - initial.w) > 1e-12 * std::max(1.0, std::abs(initial.w)))
    throw Error(ErrorKind::path, "first waypoint must equal the initial point");
  for (size_t i = 1; i < path.waypoints.size(); ++i)
    if (path.waypoints[i] == path.waypoints[i - 1]) throw Error(ErrorKind::path, "consecutive waypoints coincide");
  auto bad = [](double t) { return !(t > 0.0 && t <= 1e-2); };
  if (bad(path.rel_tol) || bad(path.abs_tol)) throw Error(ErrorKind::domain, "tolerances must lie in (0, 1e-2]");
  if (!(path.max_step > 0.0)) throw Error(ErrorKind::domain, "max_step must be positive");
  if (!std::isfinite(std::abs(initial.h)) || !std::isfinite(std::abs(initial.dh)))
    throw Error(ErrorKind::domain, "initial data must be finite");
}

}  // namespace

TrajectoryNode Trajectory::interpolate(size_t step, double theta) const {
  const DenseStep& s = steps.at(step);
  TrajectoryNode n;
  n.w = s.w0 + s.dir * (theta * s.length);
  cx v[2];
  for (int i = 0; i < 2; ++i) {
    const auto& r = s.rcont[i];
    v[i] = r[0] + theta * (r[1] + (1.0 - theta) * (r[2] + theta * (r[3] + (1.0 - theta) * r[4])));
  }
  n.h = v[0];
  n.dh = v[1];
  return n;
}

std::vector<TrajectoryNode> Trajectory::sample(double spacing) const {
  std::vector<TrajectoryNode> out;
  if (nodes.empty()) return out;
  out.push_back(nodes.front());
  for (size_t i = 0; i < steps.size(); ++i) {
    const int n = std::max(1, static_cast<int>(std::ceil(steps[i].length / spacing)));
    for (int j = 1; j < n; ++j) out.push_back(interpolate(i, static_cast<double>(j) / n));
    out.push_back(nodes[i + 1]);
  }
  return out;
}

Trajectory integrate_path(const SecondOrderRhs& f, const TrajectoryNode& initial, const PathSpec& path) {
  check_path(initial, path);
  Trajectory traj;
  traj.nodes.push_back(initial);
  Y y{initial.h, initial.dh};
  double step = std::min(path.max_step, 1e-3);
  long total_steps = 0;

  for (size_t seg = 0; seg + 1 < path.waypoints.size(); ++seg) {
    const cx wa = path.waypoints[seg];
    const cx wb = path.waypoints[seg + 1];
    const double L = std::abs(wb - wa);
    const cx dir = (wb - wa) / L;
    auto deriv = [&](double t, const Y& v) -> Y {
      const cx w = wa + dir * t;
      return {dir * v[1], dir * f(w, v[0], v[1])};
    };
    double t = 0.0;
    Y k1 = deriv(0.0, y);
    double facold = 1e-4;
    bool last_rejected = false;
    while (t < L) {
      if (++total_steps > path.max_steps)
        throw Error(ErrorKind::path, "waypoint unreachable within the step budget");
      step = std::min(step, path.max_step);
      bool last = false;
      if (t + step >= L * (1.0 - 1e-14) || t + 1.01 * step >= L) {
        step = L - t;
        last = true;
      }
      const Y k2 = deriv(t + c2 * step, axpy(y, step, {{a21, &k1}}));
      const Y k3 = deriv(t + c3 * step, axpy(y, step, {{a31, &k1}, {a32, &k2}}));
      const Y k4 = deriv(t + c4 * step, axpy(y, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const Y k5 = deriv(t + c5 * step, axpy(y, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const Y k6 = deriv(t + step, axpy(y, step, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const Y ynew = axpy(y, step, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
      const double tnew = last ? L : t + step;
      const Y k7 = deriv(tnew, ynew);

      double err = 0.0;
      for (int i = 0; i < 2; ++i) {
        const cx e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = path.abs_tol + path.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err += std::norm(e) / (sc * sc);
      }
      err = std::sqrt(err / 2.0);

      if (std::isfinite(err) && err <= 1.0) {
        DenseStep ds{wa + dir * t, dir, tnew - t, {}};
        for (int i = 0; i < 2; ++i) {
          const cx ydiff = ynew[i] - y[i];
          const cx bspl = step * k1[i] - ydiff;
          ds.rcont[i] = {y[i], ydiff, bspl, ydiff - step * k7[i] - bspl,
                         step * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i])};
        }
        traj.steps.push_back(ds);
        t = tnew;
        y = ynew;
        k1 = k7;
        const cx w = last ? wb : wa + dir * t;
        traj.nodes.push_back({w, y[0], y[1]});
        if (std::abs(y[0]) > path.blowup_threshold) {
          traj.blowup = true;
          traj.blowup_at = w;
          return traj;
        }
        const double fac11 = std::pow(err, 0.17);
        double fac = fac11 / std::pow(facold, 0.04);
        fac = std::clamp(fac / 0.9, 0.1, 5.0);
        double next = step / fac;
        if (last_rejected) next = std::min(next, step);
        facold = std::max(err, 1e-4);
        last_rejected = false;
        if (!last) step = next;
      } else {
        ++traj.rejected_steps;
        const double fac11 = std::isfinite(err) ? std::pow(err, 0.17) : 10.0;
        step /= std::min(10.0, fac11 / 0.9);
        last_rejected = true;
      }
      const cx w_here = wa + dir * t;
      if (step < 1e-14 * std::max(1.0, std::abs(w_here))) {
        if (std::abs(y[0]) > 1e4) {
          traj.blowup = true;
          traj.blowup_at = w_here;
          return traj;
        }
        throw Error(ErrorKind::stiffness, "step size underflow without blowup");
      }
    }
  }
  return traj;
}

Trajectory integrate_path(const NormalizedForm& nf, const TrajectoryNode& initial, const PathSpec& path) {
  return integrate_path(canonical_rhs(nf), initial, path);
}

// ---------------------------------------------------------------------------
// Seeding

SeedResult seed_from_borel(const TronqueeSum& sum, cx C, Side side, cx w0) {
  const SolutionJet j = sum.eval(C, side, w0);
  return {{w0, j.h, j.dh}, j.error_estimate, std::abs(w0) < 30.0};
}

SeedResult seed_from_borel(const NormalizedForm& nf, const Transseries& ts, cx C, Side side, cx w0) {
  return seed_from_borel(TronqueeSum(nf, ts), C, side, w0);
}

// ---------------------------------------------------------------------------
// Poles

const char* to_string(RefineVariable v) { return v == RefineVariable::h ? "h" : "reciprocal"; }

namespace {

// Integrate from `from` to `to` in the chosen variable; returns the state at
// `to`, or at the blowup point if h became too large on the way.
TrajectoryNode advance(const SecondOrderRhs& f, const SecondOrderRhs& g, const TrajectoryNode& from, cx to,
                       RefineVariable var, const PoleSearchOptions& opt) {
  PathSpec ps;
  ps.waypoints = {from.w, to};
  ps.rel_tol = opt.rel_tol;
  ps.abs_tol = opt.abs_tol;
  ps.max_step = 0.25;
  ps.max_steps = 20000;
  if (var == RefineVariable::reciprocal && from.h != 0.0) {
    ps.blowup_threshold = 1e300;
    const TrajectoryNode v0{from.w, 1.0 / from.h, -from.dh / (from.h * from.h)};
    try {
      const Trajectory t = integrate_path(g, v0, ps);
      const TrajectoryNode& e = t.end();
      if (e.h != 0.0 && std::isfinite(std::abs(e.h)) && std::isfinite(std::abs(e.dh)))
        return {e.w, 1.0 / e.h, -e.dh / (e.h * e.h)};
    } catch (const Error&) {
      // h may vanish on the way; fall back to the direct variable.
    }
  }
  ps.blowup_threshold = 1e18;
  return integrate_path(f, from, ps).end();
}

}  // namespace

namespace {

// Newton step towards a pole of order m. For double poles the step comes
// from (1/h)', which has a simple zero there; it is exact for a/s^2 and
// off by O(s^3) otherwise.
cx pole_step(cx h, cx dh, cx F, int m) {
  if (m == 2) return h * dh / (2.0 * dh * dh - F * h);
  return static_cast<double>(m) * h / dh;
}

int local_order(cx h, cx dh, cx F) {
  const cx m_est = 1.0 / (h * F / (dh * dh) - 1.0);
  if (std::abs(h) <= 1.0 || !std::isfinite(std::abs(m_est))) return 1;
  return std::clamp(static_cast<int>(std::lround(m_est.real())), 1, 4);
}

}  // namespace

PoleObservation refine_pole(const SecondOrderRhs& f, const TrajectoryNode& start, const PoleSearchOptions& opt) {
  const SecondOrderRhs g = reciprocal_rhs(f);
  // Higher-order poles are approached only to this distance, in the h
  // variable: the reciprocal equation is singular at a multiple zero of 1/h.
  constexpr double standoff = 2e-4;
  PoleObservation obs;
  obs.variable = opt.variable;
  TrajectoryNode cur = start;
  cx loc = start.w;
  double change = std::numeric_limits<double>::infinity();
  int m = 1;
  try {
    for (int it = 0; it < opt.max_iter; ++it) {
      if (cur.dh == 0.0) break;
      m = local_order(cur.h, cur.dh, f(cur.w, cur.h, cur.dh));
      cx step = pole_step(cur.h, cur.dh, f(cur.w, cur.h, cur.dh), m);
      const cx next = cur.w + step;
      if (it > 0) change = std::abs(next - loc);
      loc = next;
      const double scale = std::max(1.0, std::abs(loc));
      if (std::abs(step) <= opt.tol * scale || change <= opt.tol * scale) {
        obs.converged = true;
        break;
      }
      cx target = loc;
      if (m > 1 && std::abs(step) < 2.0 * standoff) target = loc - step / std::abs(step) * standoff;
      if (std::abs(target - cur.w) > opt.max_jump) target = cur.w + (target - cur.w) * (opt.max_jump / std::abs(target - cur.w));
      obs.variable = m > 1 ? RefineVariable::h : opt.variable;
      cur = advance(f, g, cur, target, obs.variable, opt);
    }
  } catch (const Error&) {
    obs.converged = false;
  }
  obs.location = loc;
  const double scale = std::max(1.0, std::abs(loc));
  if (!obs.converged) {
    obs.uncertainty = std::isfinite(change) ? std::max(change, 1.0) : 1.0;
    obs.order_estimate = m;
    return obs;
  }
  obs.uncertainty = std::max(std::isfinite(change) ? change : 0.0, 1e-13 * scale);
  // Order from the log-slope of |h| between distances 1e-2 and 1e-3,
  // approaching from the start point. For a multiple pole the estimate from
  // twice the standoff bounds the standoff bias.
  try {
    cx dir = start.w - loc;
    dir = std::abs(dir) > 0.0 ? dir / std::abs(dir) : cx(1.0, 0.0);
    const TrajectoryNode n2 = advance(f, g, start, loc + 1e-2 * dir, RefineVariable::h, opt);
    const TrajectoryNode n3 = advance(f, g, n2, loc + 1e-3 * dir, RefineVariable::h, opt);
    const double slope = std::log(std::abs(n3.h) / std::abs(n2.h)) / std::log(10.0);
    obs.order_estimate = std::max(1, static_cast<int>(std::lround(slope)));
    obs.laurent_coeff = n3.h * std::pow(n3.w - loc, obs.order_estimate);
    if (m > 1) {
      const TrajectoryNode far = advance(f, g, n3, loc + 2.0 * standoff * dir, RefineVariable::h, opt);
      const cx alt = far.w + pole_step(far.h, far.dh, f(far.w, far.h, far.dh), m);
      obs.uncertainty = std::max(obs.uncertainty, std::abs(alt - loc));
    }
  } catch (const Error&) {
    obs.order_estimate = m;
  }
  return obs;
}

std::vector<PoleObservation> cluster_poles(std::vector<PoleObservation> poles) {
  std::stable_sort(poles.begin(), poles.end(), [](const PoleObservation& a, const PoleObservation& b) {
    if (a.converged != b.converged) return a.converged;
    return a.uncertainty < b.uncertainty;
  });
  std::vector<PoleObservation> kept;
  for (const auto& p : poles) {
    bool dup = false;
    for (const auto& k : kept) {
      const double radius = std::max(3.0 * std::max(p.uncertainty, k.uncertainty), 1e-8);
      if (std::abs(p.location - k.location) < radius) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(p);
  }
  return kept;
}

std::vector<PoleObservation> detect_poles(const SecondOrderRhs& f, const Trajectory& traj,
                                          const PoleSearchOptions& opt) {
  const auto samples = traj.sample(opt.sample_spacing);
  std::vector<TrajectoryNode> candidates;
  for (size_t i = 1; i + 1 < samples.size(); ++i) {
    const double a = std::abs(samples[i].h);
    if (a >= opt.min_peak && a > std::abs(samples[i - 1].h) && a >= std::abs(samples[i + 1].h))
      candidates.push_back(samples[i]);
  }
  if (traj.blowup) candidates.push_back(traj.end());
  std::vector<PoleObservation> found;
  for (const auto& c : candidates) found.push_back(refine_pole(f, c, opt));
  return cluster_poles(std::move(found));
}

std::vector<PoleObservation> detect_poles(const NormalizedForm& nf, const Trajectory& traj,
                                          const PoleSearchOptions& opt) {
  return detect_poles(canonical_rhs(nf), traj, opt);
}

// ---------------------------------------------------------------------------
// Constant fitting

FitResult fit_constant(const TronqueeSum& sum, const std::vector<FitSample>& samples, Side side,
                       FitBaseline baseline) {
  if (samples.empty()) throw Error(ErrorKind::domain, "fit_constant needs samples");
  const Transseries& ts = sum.transseries();
  if (ts.K() < 1) throw Error(ErrorKind::domain, "fit_constant needs the level-1 series");
  FitResult out{0.0, 0.0, side, false, 0.0, {}};
  for (const auto& s : samples) {
    cx base, s1;
    double base_err;
    if (baseline == FitBaseline::borel) {
      const SolutionJet j = sum.eval(0.0, side, s.w);
      base = j.h;
      base_err = j.error_estimate;
      s1 = sum.level_value(1, side, s.w);
    } else {
      const auto o = ts.h0.evaluate_optimal(s.w);
      base = o.value;
      base_err = o.error_estimate;
      s1 = ts.levels[0].evaluate_optimal(s.w).value;
    }
    const cx norm = std::exp(-s.w - ts.beta1 * std::log(s.w)) * s1;
    out.per_sample.push_back((s.h - base) / norm);
    const double noise = (1e-15 * std::abs(s.h) + 1e-15 * std::abs(base) + base_err) / std::abs(norm);
    out.noise_floor = std::max(out.noise_floor, noise);
    out.C += out.per_sample.back();
  }
  out.C /= static_cast<double>(samples.size());
  double spread = 0.0;
  for (const cx& c : out.per_sample) spread = std::max(spread, std::abs(c - out.C));
  out.below_noise = std::abs(out.C) <= 10.0 * out.noise_floor;
  out.fit_residual = out.below_noise ? spread : spread / std::abs(out.C);
  if (!out.below_noise && out.fit_residual > 0.1)
    throw Error(ErrorKind::ill_conditioned_fit,
                "per-sample constants spread by " + std::to_string(out.fit_residual * 100.0) + "% of |C|");
  return out;
}

}  // namespace tronquee
