#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/random/gamma_distribution.hpp>

#include "errors.hpp"
#include "rng.hpp"

namespace sticklab {

// ---- two orientations ---------------------------------------------------

struct TwoStickParams {
  double p = 0.5, q = 0.5;
  double alpha = 1.5707963267948966;
  double R0 = 0.5, Ra = 0.5;

  void validate() const {
    if (!(p > 0 && p < 1 && q > 0 && q < 1) || std::abs(p + q - 1) > 1e-12)
      throw std::invalid_argument("p, q must lie in (0,1) and sum to 1");
    if (!(alpha > 0 && alpha < 3.141592653589793)) throw std::invalid_argument("alpha outside (0, pi)");
    if (!(R0 > 0 && Ra > 0)) throw std::invalid_argument("half-lengths must be positive");
  }
  double area_B() const { return 4 * R0 * Ra * std::sin(alpha); }
};

// Leading-order mu(C0 in Lambda(k, l) | Gamma0) as lambda -> infinity.
inline double thm21_asymptotic(const TwoStickParams& P, int k, int l, double lambda) {
  P.validate();
  if (k < 1 || l < 1) throw std::invalid_argument("k, l must be >= 1");
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  const double lb = lambda * P.area_B();
  const int m = k + l;
  const double lg = (3 - m) * std::log(lb) - lb - 2.0 * (m - 1) * std::log(P.p * P.q) + std::log(double(m)) +
                    3.0 * k * std::log(P.p) + std::lgamma(k + 1.0) + 3.0 * l * std::log(P.q) +
                    std::lgamma(l + 1.0);
  return std::exp(lg);
}

struct PmfEntry {
  int k, l;
  double prob;
};

// Limit law of the composition given |C0| = m: weights p^{3k} k! q^{3l} l!.
inline std::vector<PmfEntry> p_m_limit(double p, double q, int m) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  if (!(p > 0 && q > 0) || std::abs(p + q - 1) > 1e-12) throw std::invalid_argument("p + q must be 1");
  std::vector<PmfEntry> out;
  std::vector<double> lw;
  for (int k = m - 1; k >= 1; --k) {
    const int l = m - k;
    lw.push_back(3.0 * k * std::log(p) + std::lgamma(k + 1.0) + 3.0 * l * std::log(q) + std::lgamma(l + 1.0));
    out.push_back({k, l, 0});
  }
  const double mx = *std::max_element(lw.begin(), lw.end());
  double z = 0;
  for (double v : lw) z += std::exp(v - mx);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].prob = std::exp(lw[i] - mx) / z;
  return out;
}

// Exponential rate of the fraction s of horizontal sticks.
inline double rate_H(double p, double q, double s) {
  if (std::abs(p + q - 1) > 1e-12) throw std::invalid_argument("p + q must be 1");
  if (!(s >= 0 && s <= 1)) throw std::invalid_argument("s outside [0, 1]");
  auto xlogx = [](double x) { return x > 0 ? x * std::log(x) : 0.0; };
  double h = xlogx(s) + xlogx(1 - s);
  if (p > q) h += 3 * (1 - s) * std::log(q / p);
  else if (p < q) h += 3 * s * std::log(p / q);
  return h;
}

struct GkResult {
  double value = 0, stderr_ = 0;
  std::string method;
};

namespace detail {

// Uniform point of V = {a in R^{k-1} : range(a, 0) <= 1} by rejection from the
// cube; counts attempts so vol(V) can be estimated from the acceptance rate.
template <class G>
void draw_unit_range(G& g, int d, double* a, std::uint64_t& tries) {
  for (;;) {
    ++tries;
    double lo = 0, hi = 0;
    for (int i = 0; i < d; ++i) {
      a[i] = 2 * uniform01(g) - 1;
      lo = std::min(lo, a[i]);
      hi = std::max(hi, a[i]);
    }
    if (hi - lo <= 1) return;
  }
}

inline double range0(const double* a, int d) {
  double lo = 0, hi = 0;
  for (int i = 0; i < d; ++i) {
    lo = std::min(lo, a[i]);
    hi = std::max(hi, a[i]);
  }
  return hi - lo;
}

}  // namespace detail

// G^k(c1,c2,c3) = (1/k!)^2 int exp(-[c1 M(u1) + c2 M(u2) + c3 M(u1+u2)]) du
// over (R^2)^{k-1} with u_k = 0. M is the spread of a vector together with 0.
inline GkResult gk_integral(int k, double c1, double c2, double c3, std::uint64_t samples = 10'000'000,
                            std::uint64_t seed = 1) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(c1 > 0 && c2 > 0 && c3 >= 0)) throw std::invalid_argument("need c1, c2 > 0 and c3 >= 0");
  if (k > 4) throw Unsupported("gk_integral supports k <= 4");
  if (k == 1) return {1.0, 0.0, "exact"};
  if (k == 2) {
    const double a = c1 + c3, b = c2 + c3;
    const double I = 2 / (a * b) + 2 / (c1 + c2) * (1 / a + 1 / b);
    return {I / 4, 0.0, "exact"};
  }
  if (samples < 2) throw std::invalid_argument("need at least 2 samples");
  // u1 = r1 * d1 with r1 ~ Gamma(k-1, 1/c1) and d1 = a / range(a) for a
  // uniform in V; proposal density c^{k-1} e^{-c r} / ((k-1)! vol V).
  const int d = k - 1;
  Philox g(child(seed, 0), 0);
  boost::random::gamma_distribution<double> g1(d, 1 / c1), g2(d, 1 / c2);
  std::uint64_t t1 = 0, t2 = 0;
  double sum = 0, sum2 = 0;
  double a[3], b[3], s[3];
  for (std::uint64_t n = 0; n < samples; ++n) {
    detail::draw_unit_range(g, d, a, t1);
    detail::draw_unit_range(g, d, b, t2);
    const double ra = g1(g) / detail::range0(a, d), rb = g2(g) / detail::range0(b, d);
    for (int i = 0; i < d; ++i) s[i] = ra * a[i] + rb * b[i];
    const double w = std::exp(-c3 * detail::range0(s, d));
    sum += w;
    sum2 += w * w;
  }
  const double N = double(samples);
  const double mean = sum / N, var_w = std::max(0.0, sum2 / N - mean * mean) / N;
  const double cube = std::pow(2.0, d);
  const double acc1 = N / double(t1), acc2 = N / double(t2);
  const double v1 = cube * acc1, v2 = cube * acc2;
  double fact = 1, kf = 1;
  for (int i = 2; i <= d; ++i) fact *= i;
  kf = fact * k;
  const double scale = (fact * fact) / (kf * kf) / std::pow(c1 * c2, d);
  const double value = scale * v1 * v2 * mean;
  // delta method on the two acceptance rates and the weight mean
  const double rv1 = (1 - acc1) / (acc1 * double(t1));
  const double rv2 = (1 - acc2) / (acc2 * double(t2));
  const double rvm = mean > 0 ? var_w / (mean * mean) : 0.0;
  return {value, value * std::sqrt(rv1 + rv2 + rvm), "monte-carlo"};
}

// ---- three orientations -------------------------------------------------

enum class Orient { Zero = 0, Alpha = 1, Beta = 2 };
enum class Pair { ZeroAlpha = 0, ZeroBeta = 1, AlphaBeta = 2 };

inline constexpr std::array<Pair, 3> all_pairs{Pair::ZeroAlpha, Pair::ZeroBeta, Pair::AlphaBeta};

inline const char* name(Orient o) {
  switch (o) {
    case Orient::Zero: return "0";
    case Orient::Alpha: return "alpha";
    case Orient::Beta: return "beta";
  }
  return "?";
}

inline const char* name(Pair p) {
  switch (p) {
    case Pair::ZeroAlpha: return "A(0,alpha)";
    case Pair::ZeroBeta: return "A(0,beta)";
    case Pair::AlphaBeta: return "A(alpha,beta)";
  }
  return "?";
}

inline Orient excluded(Pair p) {
  switch (p) {
    case Pair::ZeroAlpha: return Orient::Beta;
    case Pair::ZeroBeta: return Orient::Alpha;
    case Pair::AlphaBeta: return Orient::Zero;
  }
  return Orient::Zero;
}

inline Pair pair_without(Orient x) {
  switch (x) {
    case Orient::Zero: return Pair::AlphaBeta;
    case Orient::Alpha: return Pair::ZeroBeta;
    case Orient::Beta: return Pair::ZeroAlpha;
  }
  return Pair::AlphaBeta;
}

// H_0 = 1, H_alpha = a, H_beta = b
struct ThreeStickParams {
  double a = 1, b = 1;
  double p0 = 1.0 / 3, pa = 1.0 / 3, pb = 1.0 / 3;

  void validate() const {
    if (!(a > 0 && b > 0 && std::isfinite(a) && std::isfinite(b)))
      throw OutOfRegime("a, b must be positive and finite");
    if (!(p0 >= 0 && pa >= 0 && pb >= 0) || std::abs(p0 + pa + pb - 1) > 1e-12)
      throw OutOfRegime("probabilities must lie on the simplex");
  }
  double H(Orient o) const { return o == Orient::Zero ? 1.0 : (o == Orient::Alpha ? a : b); }
  double P(Orient o) const { return o == Orient::Zero ? p0 : (o == Orient::Alpha ? pa : pb); }
};

inline std::array<Orient, 2> others(Orient x) {
  switch (x) {
    case Orient::Zero: return {Orient::Alpha, Orient::Beta};
    case Orient::Alpha: return {Orient::Zero, Orient::Beta};
    case Orient::Beta: return {Orient::Zero, Orient::Alpha};
  }
  return {Orient::Alpha, Orient::Beta};
}

inline double f_xyz(const ThreeStickParams& P, Orient x, Orient y, Orient z) {
  const double hx = P.H(x), hy = P.H(y), hz = P.H(z), px = P.P(x);
  const double mx = std::max(hy, hz), mn = std::min(hy, hz);
  return px * hx * mx + px * mn * mn / 4 + (1 - px) * hy * hz;
}

// -lim (1 / (4 C lambda)) log mu(C0 made of the pair's orientations | Gamma0).
// The excluded orientation x contributes p_x |B^{x,y} u B^{x,z}| / C and the
// pair itself (1 - p_x) H_y H_z.
inline double phi_exponent(const ThreeStickParams& P, Pair pr) {
  P.validate();
  const Orient x = excluded(pr);
  const auto [y, z] = others(x);
  const double hx = P.H(x), hy = P.H(y), hz = P.H(z), px = P.P(x);
  if (hy > 2 * hx && hz > 2 * hx) return px * hx * (hy + hz - hx) + (1 - px) * hy * hz;
  return f_xyz(P, x, y, z);
}

namespace detail {
inline bool rel_eq(double u, double v, double tol = 1e-12) {
  return std::abs(u - v) <= tol * std::max(std::abs(u), std::abs(v));
}
inline bool p_eq(double u, double v) { return std::abs(u - v) <= 1e-12; }
}  // namespace detail

// c in lambda^{-(|k| - c)}: 3, 5/2, 2 or 3/2.
inline double prefactor_offset(const ThreeStickParams& P, Pair pr) {
  const Orient x = excluded(pr);
  const auto [y, z] = others(x);
  const double hx = P.H(x), hy = std::max(P.H(y), P.H(z)), hz = std::min(P.H(y), P.H(z));
  if (2 * hx < hz && !detail::rel_eq(2 * hx, hz)) return 3.0;
  if (!detail::rel_eq(hy, hz)) return 2.5;
  if (detail::rel_eq(2 * hx, hy)) return 2.0;
  return 1.5;
}

inline std::string prefactor_label(double c) {
  if (c == 3.0) return "|k|-3";
  if (c == 2.5) return "|k|-5/2";
  if (c == 2.0) return "|k|-2";
  return "|k|-3/2";
}

struct RateReport {
  std::array<double, 3> rate{};
  std::array<double, 3> prefactor{};  // offset c per pair, indexed by Pair
};

inline RateReport rate_report(const ThreeStickParams& P) {
  RateReport r;
  for (Pair pr : all_pairs) {
    r.rate[int(pr)] = phi_exponent(P, pr);
    r.prefactor[int(pr)] = prefactor_offset(P, pr);
  }
  return r;
}

inline double threshold_l1(double p0, double pa, double pb) {
  const double mn = std::min(pa, pb);
  return 1 - (p0 - mn) / (4 - 3 * p0 - mn);
}

inline double threshold_l2(double p0, double pa, double pb) {
  const double mx = std::max(pa, pb), mn = std::min(pa, pb);
  return (2 * mx + std::sqrt(4 * mx * mx + 4 * pa * pb + p0 * mn)) / (4 * mx + p0);
}

inline bool l1_at_least_one(double p0, double pa, double pb) { return threshold_l1(p0, pa, pb) >= 1; }
inline bool p0_at_most_min(double p0, double pa, double pb) { return p0 <= std::min(pa, pb); }
inline bool l2_at_most_one(double p0, double pa, double pb) { return threshold_l2(p0, pa, pb) <= 1; }
inline bool p0_at_least_min(double p0, double pa, double pb) { return p0 >= std::min(pa, pb); }

// Which numbered case of the theorem applies to (a, b) as given, 0 if none.
inline int theorem_case(double a, double b) {
  using detail::rel_eq;
  const bool eq = rel_eq(a, b);
  if (eq && rel_eq(a, 1)) return 5;
  if (a >= 2 && b >= 2) return 1;
  if (eq && a < 1) return 3;
  if (eq && a > 1 && a < 2) return 4;
  const double mn = std::min(a, b);
  if (mn > 0.5 && mn < 2 && !eq && !rel_eq(a, 1) && !rel_eq(b, 1)) return 2;
  return 0;
}

struct ScaleReduction {
  ThreeStickParams params;
  int theorem_case = 0;
  char observation = '-';            // '-' when no rescaling was needed
  std::array<Orient, 3> relabel{};   // relabel[new] = original orientation
  double unit = 1;                   // original H of the new horizontal
};

inline char observation_for(double a, double b) {
  using detail::rel_eq;
  if ((b >= 2 * a && 1 >= 2 * a) || (a >= 2 * b && 1 >= 2 * b)) return 'A';
  auto obsB = [](double u, double v) {
    const double mn = std::min(1.0, v);
    return u / 2 < mn && mn < 2 * u && !detail::rel_eq(u, v) && !detail::rel_eq(u, 1) && !detail::rel_eq(v, 1);
  };
  if (obsB(a, b) || obsB(b, a)) return 'B';
  if ((rel_eq(b, 1) && 1 < a) || (rel_eq(a, 1) && 1 < b)) return 'C';
  if ((a < 1 && rel_eq(b, 1) && 1 < 2 * a) || (b < 1 && rel_eq(a, 1) && 1 < 2 * b)) return 'D';
  return '?';
}

// Rescales the H-values so that some orientation becomes the unit and one of
// the five cases applies. The identity is tried first.
inline ScaleReduction scale_reduce(const ThreeStickParams& P) {
  P.validate();
  for (Orient u : {Orient::Zero, Orient::Alpha, Orient::Beta}) {
    const auto [y, z] = others(u);
    const double h = P.H(u);
    ThreeStickParams Q{P.H(y) / h, P.H(z) / h, P.P(u), P.P(y), P.P(z)};
    const int c = theorem_case(Q.a, Q.b);
    if (c == 0) continue;
    ScaleReduction r;
    r.params = Q;
    r.theorem_case = c;
    r.relabel = {u, y, z};
    r.unit = h;
    r.observation = u == Orient::Zero ? '-' : observation_for(P.a, P.b);
    return r;
  }
  throw OutOfRegime("no case applies after rescaling");
}

struct PhaseOutcome {
  std::vector<Pair> pairs;  // a single entry means "occurs"
  bool fixation = false;
  std::string case_label;   // clause, prefixed by the observation when rescaled
  RateReport rates;
  ScaleReduction reduction;
  bool consistent = false;  // pairs agree with the rate argmin (prefactor tie-break)

  bool occurs() const { return pairs.size() == 1; }
};

inline std::string pairs_string(const std::vector<Pair>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::string(name(v[i]));
  return s;
}

// Pairs of minimal rate (relative tolerance), optionally refined by the
// largest prefactor offset.
inline std::vector<Pair> rate_argmin(const RateReport& r, bool prefactor_tiebreak) {
  const double mn = *std::min_element(r.rate.begin(), r.rate.end());
  std::vector<Pair> best;
  for (Pair p : all_pairs)
    if (detail::rel_eq(r.rate[int(p)], mn)) best.push_back(p);
  if (prefactor_tiebreak && best.size() > 1) {
    double c = 0;
    for (Pair p : best) c = std::max(c, r.prefactor[int(p)]);
    std::erase_if(best, [&](Pair p) { return r.prefactor[int(p)] != c; });
  }
  return best;
}

namespace detail {

inline Pair map_pair(Pair p, const std::array<Orient, 3>& relabel) {
  const Orient x = relabel[int(excluded(p))];
  return pair_without(x);
}

inline void sort_pairs(std::vector<Pair>& v) {
  std::sort(v.begin(), v.end(), [](Pair u, Pair w) { return int(u) < int(w); });
}

}  // namespace detail

inline PhaseOutcome classify_phase(const ThreeStickParams& P) {
  using detail::p_eq;
  using detail::rel_eq;
  PhaseOutcome out;
  out.reduction = scale_reduce(P);
  const ThreeStickParams& Q = out.reduction.params;
  std::vector<Pair> pairs;
  std::string clause;
  const double a = Q.a, b = Q.b, mn = std::min(Q.pa, Q.pb);

  auto zero_side = [&] {
    if (p_eq(Q.pa, Q.pb)) return std::vector<Pair>{Pair::ZeroAlpha, Pair::ZeroBeta};
    return std::vector<Pair>{Q.pa > Q.pb ? Pair::ZeroAlpha : Pair::ZeroBeta};
  };

  switch (out.reduction.theorem_case) {
    case 1: {
      const double L = (a * b - a + 0.25) * Q.pb + a, R = (a * b - b + 0.25) * Q.pa + b;
      if (rel_eq(L, R)) {
        pairs = {Pair::ZeroAlpha, Pair::ZeroBeta};
        clause = "1(iii)";
      } else if (L < R) {
        pairs = {Pair::ZeroAlpha};
        clause = "1(i)";
      } else {
        pairs = {Pair::ZeroBeta};
        clause = "1(ii)";
      }
      break;
    }
    case 2: {
      const double f0 = f_xyz(Q, Orient::Zero, Orient::Alpha, Orient::Beta);
      const double fb = f_xyz(Q, Orient::Beta, Orient::Zero, Orient::Alpha);
      const double fa = f_xyz(Q, Orient::Alpha, Orient::Beta, Orient::Zero);
      if (rel_eq(fa, fb) && rel_eq(fa, f0)) {
        pairs = {Pair::ZeroAlpha, Pair::ZeroBeta, Pair::AlphaBeta};
        clause = "2(iii)";
      } else if (rel_eq(fa, fb) && fb < f0) {
        pairs = {Pair::ZeroAlpha, Pair::ZeroBeta};
        clause = "2(ii)";
      } else if (f0 < std::min(fa, fb) && !rel_eq(f0, std::min(fa, fb))) {
        pairs = {Pair::AlphaBeta};
        clause = "2(i)";
      } else {
        // not spelled out by the theorem; same selection rule
        RateReport r;
        r.rate = {fb, fa, f0};
        pairs = rate_argmin(r, false);
        clause = "2*";
      }
      break;
    }
    case 3: {
      if (Q.p0 <= mn || p_eq(Q.p0, mn)) {
        pairs = {Pair::AlphaBeta};
        clause = "3(i)";
      } else if (a < threshold_l1(Q.p0, Q.pa, Q.pb)) {
        pairs = {Pair::AlphaBeta};
        out.fixation = true;
        clause = "3(ii)";
      } else {
        pairs = zero_side();
        clause = "3(ii)";
      }
      break;
    }
    case 4: {
      if (Q.p0 < mn && !p_eq(Q.p0, mn)) {
        if (a < threshold_l2(Q.p0, Q.pa, Q.pb)) {
          pairs = {Pair::AlphaBeta};
          out.fixation = true;
        } else {
          pairs = zero_side();
        }
        clause = "4(i)";
      } else {
        pairs = zero_side();
        clause = "4(ii)";
      }
      break;
    }
    case 5: {
      out.fixation = true;
      const double lo = std::min({Q.p0, Q.pa, Q.pb});
      for (Orient x : {Orient::Zero, Orient::Alpha, Orient::Beta})
        if (p_eq(Q.P(x), lo)) pairs.push_back(pair_without(x));
      clause = pairs.size() == 1 ? "5(i)" : (pairs.size() == 2 ? "5(ii)" : "5(iii)");
      break;
    }
  }

  for (auto& p : pairs) p = detail::map_pair(p, out.reduction.relabel);
  detail::sort_pairs(pairs);
  out.pairs = pairs;
  out.case_label = out.reduction.observation == '-' ? clause : std::string(1, out.reduction.observation) + "/" + clause;
  out.rates = rate_report(P);
  auto check = rate_argmin(out.rates, true);
  detail::sort_pairs(check);
  out.consistent = check == out.pairs;
  return out;
}

}  // namespace sticklab
