#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "tronquee/common.hpp"
#include "tronquee/equations.hpp"
#include "tronquee/series.hpp"

namespace tronquee {

// Lanczos approximation (g = 607/128) with reflection for Re z < 1/2.
cx gamma(cx z);

// B(p) = sum_n coeffs[n] p^{n+r-1}
struct BorelSeries {
  cx r{1.0, 0.0};
  std::vector<cx> coeffs;
  int N() const { return static_cast<int>(coeffs.size()) - 1; }
  cx evaluate(cx p) const;
};

BorelSeries borel_transform(const FormalSeries& f);
// Series coefficients a_n = coeffs[n] * Gamma(n + r), the inverse of borel_transform.
std::vector<cx> inverse_borel_coefficients(const BorelSeries& b);
BorelSeries convolve(const BorelSeries& a, const BorelSeries& b);

// Roots of sum_k c[k] x^k via the eigenvalues of the companion matrix.
std::vector<cx> polynomial_roots(const std::vector<cx>& c);
cx polyval(const std::vector<cx>& c, cx x);

// num(p)/den(p) with den(0) = 1, optionally with pole/zero doublets divided out.
class RationalApproximant {
 public:
  std::vector<cx> num;
  std::vector<cx> den;
  std::vector<cx> poles;  // after pruning
  std::vector<cx> zeros;  // after pruning
  std::vector<std::pair<cx, cx>> pruned;  // (pole, zero) doublets removed
  bool reduced = false;   // robust algorithm lowered the requested degrees

  int num_degree() const { return static_cast<int>(num.size()) - 1; }
  int den_degree() const { return static_cast<int>(den.size()) - 1; }
  cx operator()(cx p) const;
};

// Robust [L/M] Pade approximant from Taylor coefficients c_0..c_{L+M}
// (SVD-based degree reduction). Doublets closer than `doublet_tol` are pruned.
RationalApproximant pade(const std::vector<cx>& taylor, int L, int M, double tol = 1e-13,
                         double doublet_tol = 1e-8);

struct PadeOrders {
  int num = -1;  // -1: near-diagonal split of the available coefficients
  int den = -1;
};

inline constexpr double default_ray_clearance = 0.1;

class BorelSum {
 public:
  BorelSeries borel;
  RationalApproximant approx;
  int pade_num_degree = 0;
  int pade_den_degree = 0;
  std::vector<cx> pole_locations;
  double ray_phi = 0.0;

  // p^{r-1} R(p), the continued Borel transform.
  cx transform(cx p) const;
  // Distance from the ray arg p = phi to the nearest approximant pole.
  double ray_clearance(double phi) const;
  // Throws a ray error if a pole lies within `clearance` of the ray.
  void check_ray(double phi, double clearance = default_ray_clearance) const;
};

BorelSum build_borel_sum(const BorelSeries& b, double phi, PadeOrders orders = {});
BorelSum build_borel_sum(const FormalSeries& f, double phi, PadeOrders orders = {});

struct LaplaceResult {
  cx value;
  double error;
};

struct QuadratureOptions {
  double rel_tol = 1e-15;
  double abs_tol = 1e-300;
  int max_intervals = 2000;
};

// Integral of (-p)^k B(p) e^{-w p} along arg p = phi (default: bs.ray_phi), k = 0..2.
std::array<LaplaceResult, 3> laplace_jet(const BorelSum& bs, cx w, std::optional<double> phi = {},
                                         const QuadratureOptions& q = {});
LaplaceResult laplace_eval(const BorelSum& bs, cx w, std::optional<double> phi = {},
                           const QuadratureOptions& q = {});

// Upper-minus-lower lateral Laplace transforms, computed along two legs
// leaving the real axis at p0 so that the common part never enters.
LaplaceResult lateral_difference(const BorelSum& bs, cx w, double p0 = 0.75, double angle = pi / 3,
                                 const QuadratureOptions& q = {});

// Upper side: Laplace rays in the lower half p-plane, phi in (-pi, 0).
// Lower side: phi in (0, pi). The tritronquee h^+ is C = 0 on the upper side.
enum class Side { upper, lower };
const char* to_string(Side s);
Side side_from_string(std::string_view name);

struct SolutionJet {
  cx w;
  cx h;
  cx dh;
  cx d2h;
  double error_estimate = 0.0;
  double phi = 0.0;
  bool truncation_warning = false;
};

// Borel-Pade-Laplace sum of a transseries:
//   h(w) = L_phi H0 (w) + sum_k C^k e^{-kw} w^{-k beta1} w L_phi B(w^{-1} s_k)(w).
class TronqueeSum {
 public:
  TronqueeSum(const NormalizedForm& nf, const Transseries& ts, PadeOrders orders = {});

  const NormalizedForm& form() const { return nf_; }
  const Transseries& transseries() const { return ts_; }
  const BorelSum& h0_sum() const { return h0_; }
  const BorelSum& level_sum(int k) const { return levels_.at(static_cast<size_t>(k - 1)); }

  // Ray used for w on the given side. Throws a sector error when no ray
  // with Re(w e^{i phi}) > 0 exists on that side.
  double choose_phi(Side side, cx w) const;

  SolutionJet eval(cx C, Side side, cx w, int K = -1, std::optional<double> phi = {}) const;
  // Borel sum of the level series s_k alone, without its exponential prefactor.
  cx level_value(int k, Side side, cx w) const;

  double angle_margin = 0.25;
  double truncation_tol = 1e-16;

 private:
  NormalizedForm nf_;
  Transseries ts_;
  BorelSum h0_;
  std::vector<BorelSum> levels_;
};

cx tronquee_eval(const NormalizedForm& nf, const Transseries& ts, cx C, Side side, cx w, int K = -1);
cx tritronquee_eval(const NormalizedForm& nf, const Transseries& ts, Side side, cx w);

}  // namespace tronquee
