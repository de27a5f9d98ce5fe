#pragma once

#include <optional>
#include <vector>

#include "tronquee/common.hpp"
#include "tronquee/equations.hpp"

namespace tronquee {

// Truncated power series in 1/w:
//   sum_{j} coeffs[j] w^{-(offset+j)} + O(w^{-(order+1)}).
// `order` is the highest power of 1/w that is known. Series built from exact
// monomials carry order == exact and never limit the order of a result.
class FormalSeries {
 public:
  static constexpr int exact = 1 << 28;

  FormalSeries() = default;
  FormalSeries(int offset, std::vector<cx> coeffs, int order);

  static FormalSeries zero(int order) { return FormalSeries(0, {}, order); }
  static FormalSeries constant(cx c, int order = exact) { return FormalSeries(0, {c}, order); }
  // c * w^{-power}
  static FormalSeries monomial(cx c, int power, int order = exact) {
    return FormalSeries(power, {c}, order);
  }

  int offset() const { return offset_; }
  int order() const { return order_; }
  bool is_exact() const { return order_ >= exact; }
  bool empty() const { return coeffs_.empty(); }
  const std::vector<cx>& coeffs() const { return coeffs_; }
  // Highest stored power; offset - 1 when nothing is stored.
  int last_power() const { return offset_ + static_cast<int>(coeffs_.size()) - 1; }
  // Lower bound on the valuation, used for truncation bookkeeping.
  int valuation() const { return coeffs_.empty() ? exact : offset_; }

  // Coefficient of w^{-power}. Zero outside the stored range as long as
  // power <= order.
  cx coeff(int power) const;
  void set_coeff(int power, cx value);
  FormalSeries truncated(int order) const;

  cx evaluate(cx w) const;

  struct OptimalSum {
    cx value;
    double error_estimate;  // magnitude of the first omitted term
    int terms;              // number of terms summed
  };
  // Sum up to, not including, the smallest nonzero term (ties toward fewer terms).
  OptimalSum evaluate_optimal(cx w) const;

  FormalSeries derivative() const;
  // Requires a nonzero leading coefficient. Exact input needs an explicit order.
  FormalSeries reciprocal(std::optional<int> order = std::nullopt) const;

  FormalSeries operator-() const;
  FormalSeries& operator+=(const FormalSeries& b);
  FormalSeries& operator-=(const FormalSeries& b);
  FormalSeries& operator*=(cx c);

  friend FormalSeries operator+(const FormalSeries& a, const FormalSeries& b);
  friend FormalSeries operator-(const FormalSeries& a, const FormalSeries& b);
  friend FormalSeries operator*(const FormalSeries& a, const FormalSeries& b);
  friend FormalSeries operator/(const FormalSeries& a, const FormalSeries& b);

 private:
  void trim();

  int offset_ = 0;
  std::vector<cx> coeffs_;
  int order_ = exact;
};

FormalSeries operator*(const FormalSeries& a, cx c);
FormalSeries operator*(cx c, const FormalSeries& a);
FormalSeries operator/(const FormalSeries& a, cx c);
FormalSeries operator+(const FormalSeries& a, cx c);
FormalSeries operator+(cx c, const FormalSeries& a);
FormalSeries operator-(const FormalSeries& a, cx c);
FormalSeries operator-(cx c, const FormalSeries& a);

enum class SeriesOp { add, mul, reciprocal, differentiate };
// Dispatcher over the four basic operations; `b` is ignored for unary ones.
FormalSeries series_arith(const FormalSeries& a, const FormalSeries& b, SeriesOp op);

// Finite sum of exponential levels
//   sum_k e^{-k w} w^{-k beta1} s_k(w),  k = 0..K,
// with the derivative rule d/dw acting on level k as s' - k (1 + beta1/w) s.
class LevelSeries {
 public:
  LevelSeries(std::vector<FormalSeries> levels, cx beta1);
  static LevelSeries constant(cx c, int K, cx beta1);
  static LevelSeries from_level0(const FormalSeries& s, int K, cx beta1);

  int K() const { return static_cast<int>(levels_.size()) - 1; }
  cx beta1() const { return beta1_; }
  const FormalSeries& level(int k) const { return levels_.at(k); }
  FormalSeries& level(int k) { return levels_.at(k); }

  LevelSeries derivative() const;
  LevelSeries reciprocal() const;

  LevelSeries operator-() const;
  friend LevelSeries operator+(const LevelSeries& a, const LevelSeries& b);
  friend LevelSeries operator-(const LevelSeries& a, const LevelSeries& b);
  friend LevelSeries operator*(const LevelSeries& a, const LevelSeries& b);
  friend LevelSeries operator/(const LevelSeries& a, const LevelSeries& b);

 private:
  std::vector<FormalSeries> levels_;
  cx beta1_;
};

LevelSeries operator*(const LevelSeries& a, cx c);
LevelSeries operator*(cx c, const LevelSeries& a);
LevelSeries operator/(const LevelSeries& a, cx c);
LevelSeries operator+(const LevelSeries& a, cx c);
LevelSeries operator-(const LevelSeries& a, cx c);

struct Transseries {
  FormalSeries h0;
  std::vector<FormalSeries> levels;  // levels[k-1] = s_k
  cx beta1;
  int K() const { return static_cast<int>(levels.size()); }
};

// Series solution h0 = sum_{j=2}^{N} h_{0,j} w^{-j}.
FormalSeries compute_h0(const NormalizedForm& nf, int N);
// h0 plus the level series s_1..s_K, each truncated at order N.
Transseries compute_levels(const NormalizedForm& nf, int K, int N);

// Formal residual h'' - F(w, h, h') of the truncated series h0, as a series
// known up to `order`. Used for residual tests where a direct evaluation in
// double precision would be swamped by rounding.
FormalSeries h0_residual_series(const NormalizedForm& nf, const FormalSeries& h0, int order);

struct TransseriesValue {
  cx value;
  double error_estimate;
  bool prefactor_warning;  // |C e^{-w} w^{-beta1}| >= 1
};
TransseriesValue evaluate_transseries(const Transseries& ts, cx C, cx w);

}  // namespace tronquee
