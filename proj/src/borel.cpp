#include "tronquee/borel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace tronquee {

// ---------------------------------------------------------------------------
// Gamma

namespace {

constexpr double lanczos_g = 607.0 / 128.0;
constexpr double lanczos_c[] = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5};

cx lanczos_gamma(cx z) {
  // Gamma(z) for Re z >= 1/2
  const cx zm = z - 1.0;
  cx a = lanczos_c[0];
  for (int k = 1; k < 15; ++k) a += lanczos_c[k] / (zm + static_cast<double>(k));
  const cx t = zm + lanczos_g + 0.5;
  const cx log_g = 0.5 * std::log(2.0 * pi) + (zm + 0.5) * std::log(t) - t + std::log(a);
  return std::exp(log_g);
}

bool is_nonpositive_integer(cx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

}  // namespace

cx gamma(cx z) {
  if (is_nonpositive_integer(z)) throw Error(ErrorKind::domain, "Gamma has a pole at a nonpositive integer");
  // libm is correctly rounded to a few ulps on the real line; use it there.
  if (z.imag() == 0.0 && z.real() > 0.0 && z.real() < 171.0) return std::tgamma(z.real());
  if (z.real() < 0.5) return pi / (std::sin(pi * z) * lanczos_gamma(1.0 - z));
  return lanczos_gamma(z);
}

// ---------------------------------------------------------------------------
// Borel transform and convolution

cx BorelSeries::evaluate(cx p) const {
  cx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * p + *it;
  return acc * std::pow(p, r - 1.0);
}

BorelSeries borel_transform(const FormalSeries& f) {
  if (f.offset() < 1 && !f.empty())
    throw Error(ErrorKind::domain, "Borel transform needs a series starting at w^-1 or beyond");
  BorelSeries b;
  b.r = static_cast<double>(f.empty() ? 1 : f.offset());
  const int n_max = f.is_exact() ? f.last_power() : f.order();
  for (int p = static_cast<int>(b.r.real()); p <= n_max; ++p) {
    const int n = p - static_cast<int>(b.r.real());
    b.coeffs.push_back(f.coeff(p) / gamma(static_cast<double>(n) + b.r));
  }
  return b;
}

std::vector<cx> inverse_borel_coefficients(const BorelSeries& b) {
  std::vector<cx> a(b.coeffs.size());
  for (size_t n = 0; n < a.size(); ++n) a[n] = b.coeffs[n] * gamma(static_cast<double>(n) + b.r);
  return a;
}

BorelSeries convolve(const BorelSeries& a, const BorelSeries& b) {
  const std::vector<cx> fa = inverse_borel_coefficients(a);
  const std::vector<cx> fb = inverse_borel_coefficients(b);
  BorelSeries out;
  out.r = a.r + b.r;
  const size_t n = std::min(fa.size(), fb.size());
  out.coeffs.resize(n);
  for (size_t m = 0; m < n; ++m) {
    cx s = 0.0;
    for (size_t k = 0; k <= m; ++k) s += fa[k] * fb[m - k];
    out.coeffs[m] = s / gamma(static_cast<double>(m) + out.r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials and Pade

cx polyval(const std::vector<cx>& c, cx x) {
  cx acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<cx> polynomial_roots(const std::vector<cx>& c) {
  int d = static_cast<int>(c.size()) - 1;
  while (d > 0 && c[static_cast<size_t>(d)] == 0.0) --d;
  if (d <= 0) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
  const cx lead = c[static_cast<size_t>(d)];
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -c[static_cast<size_t>(i)] / lead;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<cx> roots(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) roots[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return roots;
}

cx RationalApproximant::operator()(cx p) const {
  cx v = polyval(num, p) / polyval(den, p);
  for (const auto& [pole, zero] : pruned) v *= (p - pole) / (p - zero);
  return v;
}

RationalApproximant pade(const std::vector<cx>& taylor, int L, int M, double tol, double doublet_tol) {
  if (L < 0 || M < 0 || static_cast<int>(taylor.size()) < L + M + 1)
    throw Error(ErrorKind::domain, "Pade degrees exceed the available coefficients");
  RationalApproximant out;
  std::vector<cx> c(taylor.begin(), taylor.begin() + L + M + 1);
  double cnorm = 0.0;
  for (const cx& v : c) cnorm += std::norm(v);
  cnorm = std::sqrt(cnorm);
  const double ts = tol * cnorm;
  auto coef = [&](int k) -> cx { return k < 0 ? cx{} : c[static_cast<size_t>(k)]; };

  double head = 0.0;
  for (int k = 0; k <= L; ++k) head += std::norm(c[static_cast<size_t>(k)]);
  if (std::sqrt(head) <= ts) {
    out.num = {0.0};
    out.den = {1.0};
    out.reduced = L > 0 || M > 0;
    return out;
  }

  const int L0 = L, M0 = M;
  std::vector<cx> a, b;
  while (true) {
    if (M == 0) {
      a.assign(c.begin(), c.begin() + L + 1);
      b = {1.0};
      break;
    }
    // rows L+1..L+M of the Toeplitz matrix, columns 0..M
    Eigen::MatrixXcd C(M, M + 1);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j <= M; ++j) C(i, j) = coef(L + 1 + i - j);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeFullV);
    int rho = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > ts) ++rho;
    if (rho == M) {
      const Eigen::VectorXcd v = svd.matrixV().col(M);
      b.assign(v.data(), v.data() + M + 1);
      a.resize(static_cast<size_t>(L + 1));
      for (int i = 0; i <= L; ++i) {
        cx s = 0.0;
        for (int j = 0; j <= std::min(i, M); ++j) s += coef(i - j) * b[static_cast<size_t>(j)];
        a[static_cast<size_t>(i)] = s;
      }
      break;
    }
    L = std::max(0, L - (M - rho));
    M = rho;
  }
  // Common factors p^lam show up as leading zeros of b.
  size_t lam = 0;
  while (lam + 1 < b.size() && std::abs(b[lam]) <= tol) ++lam;
  b.erase(b.begin(), b.begin() + static_cast<long>(lam));
  a.erase(a.begin(), a.begin() + static_cast<long>(std::min(lam, a.size() - 1)));
  while (b.size() > 1 && std::abs(b.back()) <= tol) b.pop_back();
  while (a.size() > 1 && std::abs(a.back()) <= ts) a.pop_back();
  const cx b0 = b[0];
  for (auto& v : a) v /= b0;
  for (auto& v : b) v /= b0;
  out.num = std::move(a);
  out.den = std::move(b);
  out.reduced = out.num_degree() != L0 || out.den_degree() != M0;

  out.poles = polynomial_roots(out.den);
  out.zeros = polynomial_roots(out.num);
  // Froissart doublets: a pole with a zero on top of it carries no information.
  for (size_t i = 0; i < out.poles.size();) {
    size_t best = out.zeros.size();
    double dist = doublet_tol;
    for (size_t j = 0; j < out.zeros.size(); ++j) {
      const double d = std::abs(out.poles[i] - out.zeros[j]);
      if (d < dist) {
        dist = d;
        best = j;
      }
    }
    if (best < out.zeros.size()) {
      out.pruned.emplace_back(out.poles[i], out.zeros[best]);
      out.poles.erase(out.poles.begin() + static_cast<long>(i));
      out.zeros.erase(out.zeros.begin() + static_cast<long>(best));
    } else {
      ++i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// BorelSum

namespace {

bool is_positive_integer(cx r) {
  return r.imag() == 0.0 && r.real() >= 1.0 && r.real() == std::floor(r.real());
}

}  // namespace

cx BorelSum::transform(cx p) const {
  const cx rp = approx(p);
  if (is_positive_integer(borel.r)) {
    const int e = static_cast<int>(borel.r.real()) - 1;
    cx pw = 1.0;
    for (int i = 0; i < e; ++i) pw *= p;
    return pw * rp;
  }
  return std::pow(p, borel.r - 1.0) * rp;
}

double BorelSum::ray_clearance(double phi) const {
  const cx dir = std::polar(1.0, phi);
  double best = std::numeric_limits<double>::infinity();
  for (const cx& pole : pole_locations) {
    const cx q = pole / dir;  // rotate the ray onto the positive real axis
    const double d = q.real() > 0.0 ? std::abs(q.imag()) : std::abs(q);
    best = std::min(best, d);
  }
  return best;
}

void BorelSum::check_ray(double phi, double clearance) const {
  if (ray_clearance(phi) < clearance)
    throw Error(ErrorKind::ray, "Laplace ray at angle " + std::to_string(phi) +
                                    " passes within " + std::to_string(clearance) +
                                    " of a Borel-plane pole; use a ray on the other side");
}

namespace {

BorelSum assemble_borel_sum(const BorelSeries& b, double phi, PadeOrders orders) {
  BorelSum bs;
  bs.borel = b;
  const int n = static_cast<int>(b.coeffs.size());
  if (n == 0) {
    bs.approx.num = {0.0};
    bs.approx.den = {1.0};
  } else {
    int M = orders.den >= 0 ? orders.den : (n - 1) / 2;
    int L = orders.num >= 0 ? orders.num : n - 1 - M;
    if (L + M + 1 > n) throw Error(ErrorKind::domain, "Pade orders need more Borel coefficients than available");
    bs.approx = pade(b.coeffs, L, M);
  }
  bs.pade_num_degree = bs.approx.num_degree();
  bs.pade_den_degree = bs.approx.den_degree();
  bs.pole_locations = bs.approx.poles;
  bs.ray_phi = phi;
  return bs;
}

}  // namespace

BorelSum build_borel_sum(const BorelSeries& b, double phi, PadeOrders orders) {
  BorelSum bs = assemble_borel_sum(b, phi, orders);
  bs.check_ray(phi);
  return bs;
}

BorelSum build_borel_sum(const FormalSeries& f, double phi, PadeOrders orders) {
  return build_borel_sum(borel_transform(f), phi, orders);
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

using Jet = std::array<cx, 3>;

constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.0};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double jet_norm(const Jet& j) { return std::max({std::abs(j[0]), std::abs(j[1]), std::abs(j[2])}); }

struct Panel {
  double a, b;
  Jet value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Jet k{}, g{};
  double resabs = 0.0;
  const Jet fc = f(c);
  for (int i = 0; i < 3; ++i) {
    k[i] = wgk[7] * fc[i];
    g[i] = wg[3] * fc[i];
  }
  resabs += wgk[7] * jet_norm(fc);
  for (int j = 0; j < 7; ++j) {
    const Jet f1 = f(c - h * xgk[j]);
    const Jet f2 = f(c + h * xgk[j]);
    for (int i = 0; i < 3; ++i) {
      k[i] += wgk[j] * (f1[i] + f2[i]);
      if (j % 2 == 1) g[i] += wg[j / 2] * (f1[i] + f2[i]);
    }
    resabs += wgk[j] * (jet_norm(f1) + jet_norm(f2));
  }
  Jet diff;
  for (int i = 0; i < 3; ++i) {
    k[i] *= h;
    diff[i] = (k[i] - g[i] * h);
  }
  resabs *= std::abs(h);
  double err = jet_norm(diff);
  // QUADPACK-style rescaling of the Gauss/Kronrod difference.
  if (resabs > 0.0 && err > 0.0) err = resabs * std::min(1.0, std::pow(200.0 * err / resabs, 1.5));
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * jet_norm(k));
  return {a, b, k, err};
}

// Globally adaptive integration of f over the given breakpoints.
template <class F>
std::pair<Jet, double> integrate(const F& f, const std::vector<double>& breaks, const QuadratureOptions& q) {
  std::priority_queue<Panel> heap;
  Jet total{};
  double err = 0.0;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    Panel p = gk15(f, breaks[i], breaks[i + 1]);
    for (int c = 0; c < 3; ++c) total[c] += p.value[c];
    err += p.error;
    heap.push(p);
  }
  int count = static_cast<int>(heap.size());
  while (err > std::max(q.abs_tol, q.rel_tol * jet_norm(total)) && count < q.max_intervals) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    const Panel l = gk15(f, worst.a, mid);
    const Panel r = gk15(f, mid, worst.b);
    for (int c = 0; c < 3; ++c) total[c] += l.value[c] + r.value[c] - worst.value[c];
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    count += 1;
  }
  // Recompute from the panels to avoid drift in the running sums.
  Jet sum{};
  double esum = 0.0;
  while (!heap.empty()) {
    const Panel& p = heap.top();
    for (int c = 0; c < 3; ++c) sum[c] += p.value[c];
    esum += p.error;
    heap.pop();
  }
  return {sum, esum};
}

// Integral of (-p)^k B(p) e^{-w p} dp along p = p0 + e^{i psi} t, t in [0, inf).
std::array<LaplaceResult, 3> ray_jet(const BorelSum& bs, cx w, cx p0, double psi, bool singular_start,
                                     const QuadratureOptions& q) {
  const cx dir = std::polar(1.0, psi);
  const cx z = w * dir;
  const double zabs = std::abs(z);
  const double c = z.real() / zabs;
  if (!(c > 1e-3))
    throw Error(ErrorKind::domain, "Laplace integral does not decay along the chosen ray (Re(w e^{i phi}) <= 0)");
  const cx rot = z / zabs;
  // Integration variable s with p = p0 + dir * s / |z|. The exponential
  // factor e^{-w p0} is pulled out and applied at the end.
  int m = 1;
  if (singular_start && !is_positive_integer(bs.borel.r)) {
    const double re = std::max(bs.borel.r.real(), 1e-3);
    m = static_cast<int>(std::ceil(2.0 / re));
  }
  auto f_s = [&](double s) -> Jet {
    const cx p = p0 + dir * (s / zabs);
    const cx e = bs.transform(p) * std::exp(-rot * s);
    return {e, -p * e, p * p * e};
  };
  const double s_max = 45.0 / c;
  std::vector<double> breaks{0.0};
  for (double s = 0.5; s < s_max; s *= 2.0) breaks.push_back(s);
  breaks.push_back(s_max);
  // The first panel [0, 1/2] carries the p^{r-1} endpoint behaviour; for
  // non-integer r it is integrated in u with s = u^m so the integrand is smooth.
  std::pair<Jet, double> first;
  if (m > 1) {
    const double u1 = std::pow(breaks[1], 1.0 / m);
    auto f_u = [&](double u) -> Jet {
      if (u == 0.0) return Jet{};
      const double s = std::pow(u, m);
      const double ds = m * std::pow(u, m - 1);
      Jet j = f_s(s);
      for (auto& v : j) v *= ds;
      return j;
    };
    first = integrate(f_u, {0.0, u1}, q);
    breaks.erase(breaks.begin());
  }
  auto [rest, err] = integrate(f_s, breaks, q);
  if (m > 1) {
    for (int i = 0; i < 3; ++i) rest[i] += first.first[i];
    err += first.second;
  }
  // Tail beyond s_max, bounded by the integrand size there.
  const Jet tail = f_s(s_max);
  err += jet_norm(tail) / c;
  const cx scale = dir / zabs * std::exp(-w * p0);
  std::array<LaplaceResult, 3> out;
  for (int i = 0; i < 3; ++i) out[i] = {rest[i] * scale, err * std::abs(scale)};
  return out;
}

}  // namespace

std::array<LaplaceResult, 3> laplace_jet(const BorelSum& bs, cx w, std::optional<double> phi,
                                         const QuadratureOptions& q) {
  const double ang = phi.value_or(bs.ray_phi);
  if (phi) bs.check_ray(ang);
  return ray_jet(bs, w, 0.0, ang, true, q);
}

LaplaceResult laplace_eval(const BorelSum& bs, cx w, std::optional<double> phi, const QuadratureOptions& q) {
  return laplace_jet(bs, w, phi, q)[0];
}

LaplaceResult lateral_difference(const BorelSum& bs, cx w, double p0, double angle, const QuadratureOptions& q) {
  const auto lower_leg = ray_jet(bs, w, p0, -angle, false, q);
  const auto upper_leg = ray_jet(bs, w, p0, angle, false, q);
  return {lower_leg[0].value - upper_leg[0].value, lower_leg[0].error + upper_leg[0].error};
}

// ---------------------------------------------------------------------------
// Tronquee sums

const char* to_string(Side s) { return s == Side::upper ? "upper" : "lower"; }

Side side_from_string(std::string_view name) {
  if (name == "upper" || name == "plus" || name == "+") return Side::upper;
  if (name == "lower" || name == "minus" || name == "-") return Side::lower;
  throw Error(ErrorKind::usage, "side must be upper or lower");
}

namespace {

FormalSeries divide_by_w(const FormalSeries& s) {
  return FormalSeries(s.offset() + 1, s.coeffs(), s.is_exact() ? FormalSeries::exact : s.order() + 1);
}

// Nominal ray stored in the sums; evaluation chooses and checks its own ray per point.
constexpr double construction_phi = -pi / 2;

}  // namespace

TronqueeSum::TronqueeSum(const NormalizedForm& nf, const Transseries& ts, PadeOrders orders)
    : nf_(nf), ts_(ts), h0_(assemble_borel_sum(borel_transform(ts.h0), construction_phi, orders)) {
  for (const FormalSeries& s : ts.levels) levels_.push_back(assemble_borel_sum(borel_transform(divide_by_w(s)), construction_phi, orders));
}

double TronqueeSum::choose_phi(Side side, cx w) const {
  double theta = std::arg(w);
  double lo, hi;
  if (side == Side::upper) {
    if (theta < -pi / 2) theta += 2.0 * pi;
    lo = -pi + angle_margin;
    hi = -angle_margin;
  } else {
    if (theta > pi / 2) theta -= 2.0 * pi;
    lo = angle_margin;
    hi = pi - angle_margin;
  }
  // Re(w e^{i phi}) > 0 with a small margin.
  lo = std::max(lo, -theta - (pi / 2 - 0.02));
  hi = std::min(hi, -theta + (pi / 2 - 0.02));
  if (lo > hi)
    throw Error(ErrorKind::sector, "no admissible Laplace ray on the " + std::string(to_string(side)) +
                                       " side for arg w = " + std::to_string(std::arg(w)));
  auto clear = [&](double phi) {
    if (h0_.ray_clearance(phi) < default_ray_clearance) return false;
    for (const auto& bs : levels_)
      if (bs.ray_clearance(phi) < default_ray_clearance) return false;
    return true;
  };
  // Preferred ray is -arg w; step away from it when an approximant pole is in the way.
  const double best = std::clamp(-theta, lo, hi);
  const double step = 0.01;
  for (int i = 0; i * step <= hi - lo; ++i)
    for (double phi : {best + i * step, best - i * step})
      if (phi >= lo && phi <= hi && clear(phi)) return phi;
  return best;  // eval reports the blocked ray
}

SolutionJet TronqueeSum::eval(cx C, Side side, cx w, int K, std::optional<double> phi) const {
  const double ang = phi ? *phi : choose_phi(side, w);
  if (phi && (side == Side::upper ? !(ang < 0.0 && ang > -pi) : !(ang > 0.0 && ang < pi)))
    throw Error(ErrorKind::ray, "ray angle is not on the requested side");
  const int Kmax = K < 0 ? ts_.K() : std::min(K, ts_.K());
  SolutionJet out{};
  out.w = w;
  out.phi = ang;
  h0_.check_ray(ang);
  const auto base = ray_jet(h0_, w, 0.0, ang, true, {});
  out.h = base[0].value;
  out.dh = base[1].value;
  out.d2h = base[2].value;
  out.error_estimate = base[0].error;
  if (C == 0.0) return out;

  const cx beta1 = ts_.beta1;
  const cx xi = C * std::exp(-w - beta1 * std::log(w));
  cx xik = 1.0;
  for (int k = 1; k <= Kmax; ++k) {
    xik *= xi;
    const BorelSum& bs = levels_[static_cast<size_t>(k - 1)];
    bs.check_ray(ang);
    const auto I = ray_jet(bs, w, 0.0, ang, true, {});
    // L = w I is the Borel sum of s_k; derivatives by the product rule.
    const cx L = w * I[0].value;
    const cx Lp = I[0].value + w * I[1].value;
    const cx Lpp = 2.0 * I[1].value + w * I[2].value;
    const cx a = static_cast<double>(k) * (1.0 + beta1 / w);
    const cx da = -static_cast<double>(k) * beta1 / (w * w);
    out.h += xik * L;
    out.dh += xik * (Lp - a * L);
    out.d2h += xik * (Lpp - 2.0 * a * Lp + (a * a - da) * L);
    out.error_estimate += std::abs(xik * w) * I[0].error;
  }
  const double next = std::abs(xik * xi);
  out.truncation_warning = next > truncation_tol;
  out.error_estimate += next;
  return out;
}

cx TronqueeSum::level_value(int k, Side side, cx w) const {
  const double ang = choose_phi(side, w);
  const BorelSum& bs = level_sum(k);
  bs.check_ray(ang);
  return w * ray_jet(bs, w, 0.0, ang, true, {})[0].value;
}

cx tronquee_eval(const NormalizedForm& nf, const Transseries& ts, cx C, Side side, cx w, int K) {
  return TronqueeSum(nf, ts).eval(C, side, w, K).h;
}

cx tritronquee_eval(const NormalizedForm& nf, const Transseries& ts, Side side, cx w) {
  return TronqueeSum(nf, ts).eval(0.0, side, w).h;
}

}  // namespace tronquee
