#include "tronquee/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tronquee {

namespace {

int clamp_order(long long n) {
  return static_cast<int>(std::min<long long>(n, FormalSeries::exact));
}

}  // namespace

FormalSeries::FormalSeries(int offset, std::vector<cx> coeffs, int order)
    : offset_(offset), coeffs_(std::move(coeffs)), order_(clamp_order(order)) {
  trim();
}

void FormalSeries::trim() {
  if (!coeffs_.empty() && last_power() > order_) {
    const long long keep = static_cast<long long>(order_) - offset_ + 1;
    coeffs_.resize(static_cast<size_t>(std::max(0LL, keep)));
  }
}

cx FormalSeries::coeff(int power) const {
  if (power > order_)
    throw Error(ErrorKind::domain, "coefficient w^-" + std::to_string(power) +
                                       " is beyond the truncation order " + std::to_string(order_));
  if (coeffs_.empty() || power < offset_ || power > last_power()) return 0.0;
  return coeffs_[static_cast<size_t>(power - offset_)];
}

void FormalSeries::set_coeff(int power, cx value) {
  if (power > order_)
    throw Error(ErrorKind::domain, "cannot set a coefficient beyond the truncation order");
  if (coeffs_.empty()) {
    offset_ = power;
    coeffs_.assign(1, value);
    return;
  }
  if (power < offset_) {
    coeffs_.insert(coeffs_.begin(), static_cast<size_t>(offset_ - power), cx{});
    offset_ = power;
  } else if (power > last_power()) {
    coeffs_.resize(static_cast<size_t>(power - offset_ + 1), cx{});
  }
  coeffs_[static_cast<size_t>(power - offset_)] = value;
}

FormalSeries FormalSeries::truncated(int order) const {
  return FormalSeries(offset_, coeffs_, std::min(order, order_));
}

cx FormalSeries::evaluate(cx w) const {
  if (coeffs_.empty()) return 0.0;
  const cx z = 1.0 / w;
  cx acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc * std::pow(z, offset_);
}

FormalSeries::OptimalSum FormalSeries::evaluate_optimal(cx w) const {
  const cx z = 1.0 / w;
  std::vector<cx> terms(coeffs_.size());
  cx zp = std::pow(z, offset_);
  for (size_t j = 0; j < coeffs_.size(); ++j, zp *= z) terms[j] = coeffs_[j] * zp;
  size_t stop = terms.size();
  double smallest = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < terms.size(); ++j) {
    const double m = std::abs(terms[j]);
    if (m != 0.0 && m < smallest) {
      smallest = m;
      stop = j;
    }
  }
  OptimalSum out{0.0, 0.0, static_cast<int>(stop)};
  for (size_t j = 0; j < stop; ++j) out.value += terms[j];
  if (stop < terms.size()) out.error_estimate = smallest;
  return out;
}

FormalSeries FormalSeries::derivative() const {
  std::vector<cx> d(coeffs_.size());
  for (size_t j = 0; j < coeffs_.size(); ++j) d[j] = -static_cast<double>(offset_ + static_cast<int>(j)) * coeffs_[j];
  return FormalSeries(offset_ + 1, std::move(d), is_exact() ? exact : order_ + 1);
}

FormalSeries FormalSeries::reciprocal(std::optional<int> order) const {
  size_t first = 0;
  while (first < coeffs_.size() && coeffs_[first] == 0.0) ++first;
  if (first == coeffs_.size())
    throw Error(ErrorKind::domain, "reciprocal of a series with zero leading coefficient");
  const int o = offset_ + static_cast<int>(first);
  int out_order;
  if (is_exact()) {
    if (!order) throw Error(ErrorKind::domain, "reciprocal of an exact series needs an explicit order");
    out_order = *order;
  } else {
    out_order = order_ - 2 * o;
    if (order) out_order = std::min(out_order, *order);
  }
  const int count = out_order + o + 1;
  if (count <= 0) return zero(out_order);
  auto a = [&](int k) -> cx {
    const size_t idx = first + static_cast<size_t>(k);
    return idx < coeffs_.size() ? coeffs_[idx] : cx{};
  };
  const cx inv0 = 1.0 / a(0);
  std::vector<cx> b(static_cast<size_t>(count));
  b[0] = inv0;
  const int stored = static_cast<int>(coeffs_.size() - first);
  for (int k = 1; k < count; ++k) {
    cx s = 0.0;
    for (int j = 1; j <= std::min(k, stored - 1); ++j) s += a(j) * b[static_cast<size_t>(k - j)];
    b[static_cast<size_t>(k)] = -inv0 * s;
  }
  return FormalSeries(-o, std::move(b), out_order);
}

FormalSeries FormalSeries::operator-() const {
  FormalSeries r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

FormalSeries operator+(const FormalSeries& a, const FormalSeries& b) {
  const int order = std::min(a.order_, b.order_);
  if (a.empty() && b.empty()) return FormalSeries::zero(order);
  const int lo = std::min(a.valuation(), b.valuation());
  const int hi = std::min(order, std::max(a.last_power(), b.last_power()));
  if (hi < lo) return FormalSeries::zero(order);
  std::vector<cx> c(static_cast<size_t>(hi - lo + 1));
  auto add = [&](const FormalSeries& s) {
    for (size_t j = 0; j < s.coeffs_.size(); ++j) {
      const int p = s.offset_ + static_cast<int>(j);
      if (p > hi) break;
      c[static_cast<size_t>(p - lo)] += s.coeffs_[j];
    }
  };
  add(a);
  add(b);
  return FormalSeries(lo, std::move(c), order);
}

FormalSeries operator-(const FormalSeries& a, const FormalSeries& b) { return a + (-b); }

FormalSeries& FormalSeries::operator+=(const FormalSeries& b) { return *this = *this + b; }
FormalSeries& FormalSeries::operator-=(const FormalSeries& b) { return *this = *this - b; }
FormalSeries& FormalSeries::operator*=(cx c) {
  for (auto& v : coeffs_) v *= c;
  return *this;
}

FormalSeries operator*(const FormalSeries& a, const FormalSeries& b) {
  const long long o1 = static_cast<long long>(a.valuation()) + b.order_;
  const long long o2 = static_cast<long long>(b.valuation()) + a.order_;
  const int order = clamp_order(std::min(o1, o2));
  if (a.empty() || b.empty()) return FormalSeries::zero(order);
  const int lo = a.offset_ + b.offset_;
  const int hi = std::min(order, a.last_power() + b.last_power());
  if (hi < lo) return FormalSeries::zero(order);
  std::vector<cx> c(static_cast<size_t>(hi - lo + 1));
  const int na = static_cast<int>(a.coeffs_.size());
  const int nb = static_cast<int>(b.coeffs_.size());
  for (int i = 0; i < na; ++i) {
    const cx ai = a.coeffs_[static_cast<size_t>(i)];
    if (ai == 0.0) continue;
    const int jmax = std::min(nb - 1, hi - lo - i);
    for (int j = 0; j <= jmax; ++j) c[static_cast<size_t>(i + j)] += ai * b.coeffs_[static_cast<size_t>(j)];
  }
  return FormalSeries(lo, std::move(c), order);
}

FormalSeries operator/(const FormalSeries& a, const FormalSeries& b) { return a * b.reciprocal(); }

FormalSeries operator*(const FormalSeries& a, cx c) {
  FormalSeries r = a;
  r *= c;
  return r;
}
FormalSeries operator*(cx c, const FormalSeries& a) { return a * c; }
FormalSeries operator/(const FormalSeries& a, cx c) { return a * (1.0 / c); }
FormalSeries operator+(const FormalSeries& a, cx c) { return a + FormalSeries::constant(c); }
FormalSeries operator+(cx c, const FormalSeries& a) { return a + c; }
FormalSeries operator-(const FormalSeries& a, cx c) { return a + (-c); }
FormalSeries operator-(cx c, const FormalSeries& a) { return (-a) + c; }

FormalSeries series_arith(const FormalSeries& a, const FormalSeries& b, SeriesOp op) {
  switch (op) {
    case SeriesOp::add: return a + b;
    case SeriesOp::mul: return a * b;
    case SeriesOp::reciprocal: return a.reciprocal();
    case SeriesOp::differentiate: return a.derivative();
  }
  return a;
}

// ---------------------------------------------------------------------------

LevelSeries::LevelSeries(std::vector<FormalSeries> levels, cx beta1)
    : levels_(std::move(levels)), beta1_(beta1) {
  if (levels_.empty()) levels_.push_back(FormalSeries::zero(FormalSeries::exact));
}

LevelSeries LevelSeries::constant(cx c, int K, cx beta1) {
  return from_level0(FormalSeries::constant(c), K, beta1);
}

LevelSeries LevelSeries::from_level0(const FormalSeries& s, int K, cx beta1) {
  std::vector<FormalSeries> lv(static_cast<size_t>(K + 1), FormalSeries::zero(FormalSeries::exact));
  lv[0] = s;
  return LevelSeries(std::move(lv), beta1);
}

LevelSeries LevelSeries::derivative() const {
  std::vector<FormalSeries> out;
  out.reserve(levels_.size());
  const FormalSeries inv_w = FormalSeries::monomial(1.0, 1);
  for (int k = 0; k <= K(); ++k) {
    const FormalSeries& s = levels_[static_cast<size_t>(k)];
    FormalSeries d = s.derivative();
    if (k > 0 && !s.empty()) d = d - static_cast<double>(k) * (s + beta1_ * (s * inv_w));
    out.push_back(std::move(d));
  }
  return LevelSeries(std::move(out), beta1_);
}

LevelSeries LevelSeries::operator-() const {
  std::vector<FormalSeries> out;
  for (const auto& s : levels_) out.push_back(-s);
  return LevelSeries(std::move(out), beta1_);
}

LevelSeries operator+(const LevelSeries& a, const LevelSeries& b) {
  const int K = std::min(a.K(), b.K());
  std::vector<FormalSeries> out;
  for (int k = 0; k <= K; ++k) out.push_back(a.level(k) + b.level(k));
  return LevelSeries(std::move(out), a.beta1_);
}

LevelSeries operator-(const LevelSeries& a, const LevelSeries& b) { return a + (-b); }

LevelSeries operator*(const LevelSeries& a, const LevelSeries& b) {
  const int K = std::min(a.K(), b.K());
  std::vector<FormalSeries> out;
  for (int k = 0; k <= K; ++k) {
    FormalSeries acc = FormalSeries::zero(FormalSeries::exact);
    for (int i = 0; i <= k; ++i) {
      const FormalSeries& x = a.level(i);
      const FormalSeries& y = b.level(k - i);
      if (x.empty() && x.is_exact()) continue;
      if (y.empty() && y.is_exact()) continue;
      acc += x * y;
    }
    out.push_back(std::move(acc));
  }
  return LevelSeries(std::move(out), a.beta1_);
}

LevelSeries LevelSeries::reciprocal() const {
  // 1/(a0 (1 + r)) = (1/a0) sum_m (-r)^m, where r has no level-0 part.
  const FormalSeries inv0 = levels_[0].reciprocal();
  std::vector<FormalSeries> rl(levels_.size(), FormalSeries::zero(FormalSeries::exact));
  for (int k = 1; k <= K(); ++k) rl[static_cast<size_t>(k)] = -(levels_[static_cast<size_t>(k)] * inv0);
  const LevelSeries minus_r(std::move(rl), beta1_);
  LevelSeries term = LevelSeries::constant(1.0, K(), beta1_);
  LevelSeries sum = term;
  for (int m = 1; m <= K(); ++m) {
    term = term * minus_r;
    sum = sum + term;
  }
  for (auto& s : sum.levels_) s = s * inv0;
  return sum;
}

LevelSeries operator/(const LevelSeries& a, const LevelSeries& b) { return a * b.reciprocal(); }

LevelSeries operator*(const LevelSeries& a, cx c) {
  LevelSeries r = a;
  for (int k = 0; k <= r.K(); ++k) r.level(k) *= c;
  return r;
}
LevelSeries operator*(cx c, const LevelSeries& a) { return a * c; }
LevelSeries operator/(const LevelSeries& a, cx c) { return a * (1.0 / c); }
LevelSeries operator+(const LevelSeries& a, cx c) {
  LevelSeries r = a;
  r.level(0) = r.level(0) + c;
  return r;
}
LevelSeries operator-(const LevelSeries& a, cx c) { return a + (-c); }

// ---------------------------------------------------------------------------

FormalSeries h0_residual_series(const NormalizedForm& nf, const FormalSeries& h0, int order) {
  const FormalSeries h(h0.offset(), h0.coeffs(), order);
  const FormalSeries u = FormalSeries::monomial(1.0, 1);
  const FormalSeries hp = h.derivative();
  return hp.derivative() - nf.second_derivative(u, h, hp);
}

FormalSeries compute_h0(const NormalizedForm& nf, int N) {
  if (N < 2) throw Error(ErrorKind::domain, "compute_h0 needs N >= 2");
  // The order-j residual coefficient depends on h_j only through -h_j, so
  // each order is one residual evaluation and a unit-pivot update.
  FormalSeries h(2, std::vector<cx>(static_cast<size_t>(N - 1)), N);
  for (int j = 2; j <= N; ++j) {
    const FormalSeries r = h0_residual_series(nf, h, N);
    h.set_coeff(j, h.coeff(j) + r.coeff(j));
  }
  return h;
}

namespace {

FormalSeries level_residual(const NormalizedForm& nf, const std::vector<FormalSeries>& levels, int k) {
  const LevelSeries H(levels, nf.beta1());
  const LevelSeries u = LevelSeries::from_level0(FormalSeries::monomial(1.0, 1), k, nf.beta1());
  const LevelSeries Hp = H.derivative();
  const LevelSeries R = Hp.derivative() - nf.second_derivative(u, H, Hp);
  return R.level(k);
}

}  // namespace

Transseries compute_levels(const NormalizedForm& nf, int K, int N) {
  if (K < 1) throw Error(ErrorKind::domain, "compute_levels needs K >= 1");
  if (N < 2) throw Error(ErrorKind::domain, "compute_levels needs N >= 2");
  // Level 1 determines s_{1,j} from the order j+1 equation, so everything is
  // carried one order further than requested.
  const int Nw = N + 1;
  const FormalSeries h0 = compute_h0(nf, Nw);
  std::vector<FormalSeries> levels{h0};
  for (int k = 1; k <= K; ++k) {
    FormalSeries s = FormalSeries::zero(Nw);
    if (k == 1) s.set_coeff(0, 1.0);
    levels.push_back(s);
    FormalSeries r = level_residual(nf, levels, k);
    // The level-k residual is affine in s_k. Its linear part is obtained
    // from h0 and a unit bump alone, which avoids differencing two residuals
    // whose high-order coefficients grow factorially.
    std::vector<FormalSeries> probe(static_cast<size_t>(k + 1), FormalSeries::zero(FormalSeries::exact));
    probe[0] = h0;
    const int shift = k == 1 ? 1 : 0;
    double scale = 1.0;
    for (int j = shift; j <= N; ++j) {
      const int row = j + shift;
      probe[static_cast<size_t>(k)] = FormalSeries(j, {1.0}, Nw);
      const FormalSeries col = level_residual(nf, probe, k);
      const cx pivot = col.coeff(row);
      if (std::abs(pivot) < 1e-10)
        throw Error(ErrorKind::resonance, "zero pivot in the level recursion at k = " + std::to_string(k) +
                                              ", j = " + std::to_string(j));
      const cx delta = -r.coeff(row) / pivot;
      FormalSeries& sk = levels[static_cast<size_t>(k)];
      sk.set_coeff(j, sk.coeff(j) + delta);
      for (int p = row + 1; p <= Nw; ++p) r.set_coeff(p, r.coeff(p) + delta * col.coeff(p));
      r.set_coeff(row, 0.0);
      scale = std::max(scale, std::abs(sk.coeff(j)));
    }
    // The first `shift` orders cannot be adjusted; they vanish only when
    // beta1 is consistent with the equation.
    for (int row = 0; row < 2 * shift; ++row) {
      if (std::abs(r.coeff(row)) > 1e-8)
        throw Error(ErrorKind::domain, "level-1 recursion is inconsistent at order " + std::to_string(row));
    }
  }
  Transseries ts;
  ts.h0 = h0.truncated(N);
  ts.beta1 = nf.beta1();
  for (int k = 1; k <= K; ++k) ts.levels.push_back(levels[static_cast<size_t>(k)].truncated(N));
  return ts;
}

TransseriesValue evaluate_transseries(const Transseries& ts, cx C, cx w) {
  const auto base = ts.h0.evaluate_optimal(w);
  TransseriesValue out{base.value, base.error_estimate, false};
  const cx xi = C * std::exp(-w - ts.beta1 * std::log(w));
  out.prefactor_warning = std::abs(xi) >= 1.0;
  cx xik = 1.0;
  for (int k = 1; k <= ts.K(); ++k) {
    xik *= xi;
    const auto s = ts.levels[static_cast<size_t>(k - 1)].evaluate_optimal(w);
    out.value += xik * s.value;
    out.error_estimate += std::abs(xik) * s.error_estimate;
  }
  out.error_estimate += std::abs(xik * xi);
  return out;
}

}  // namespace tronquee
