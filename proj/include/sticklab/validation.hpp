#pragma once

// Randomized oracle-equivalence and inequality suites for the closed forms.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "area_oracle.hpp"
#include "bounds.hpp"
#include "geom2d.hpp"
#include "rng.hpp"

namespace sticklab {

struct SuiteReport {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  double max_error = 0;  // relative for equalities, absolute excess for bounds
  std::uint64_t exact_fallbacks = 0;
  std::map<std::string, std::uint64_t> cases;
  std::map<std::string, std::uint64_t> case_violations;
  double seconds = 0;

  bool passed() const { return violations == 0; }
};

struct FrameFixture {
  double alpha, beta, H0, Ha, Hb;
};

namespace detail {

class Draw {
 public:
  Draw(std::uint64_t seed, std::uint64_t trial, std::uint32_t suite) : g_(child(seed, trial), suite) {}
  double u() { return uniform01(g_); }
  double in(double a, double b) { return a + (b - a) * u(); }
  int pick(int lo, int hi) { return lo + int(u() * (hi - lo + 1)); }

 private:
  Philox g_;
};

inline HFrame random_frame(Draw& d) {
  const double al = d.in(0.2, 2.6);
  const double be = al + (std::numbers::pi - al) * d.in(0.08, 0.92);
  return {al, be};
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

inline double union_area(const std::vector<Parallelogram>& ps, std::uint64_t& fallbacks,
                         const OracleOptions& opt = {}) {
  std::vector<Polygon> polys;
  for (const auto& p : ps) polys.push_back(to_polygon(p));
  auto r = area_union_oracle_ex(polys, opt);
  fallbacks += r.exact;
  return r.area;
}

inline void count(SuiteReport& r, const std::string& c, bool bad, double err) {
  ++r.trials;
  ++r.cases[c];
  r.max_error = std::max(r.max_error, err);
  if (bad) {
    ++r.violations;
    ++r.case_violations[c];
  }
}

}  // namespace detail

inline SuiteReport lemma41_suite(std::uint64_t trials, std::uint64_t seed,
                                 const std::vector<FrameFixture>& fixtures = {}, OracleOptions opt = {}) {
  SuiteReport r;
  r.name = "lemma4.1";
  detail::Timer tm;
  auto check = [&](const HFrame& f, double H0, double Ha, double Hb) {
    const double o = detail::union_area({f.b0a(H0, Ha), f.b0b(H0, Hb)}, r.exact_fallbacks, opt);
    const double v = lemma41_area(f, H0, Ha, Hb);
    const double err = std::abs(v - o) / o;
    detail::count(r, lemma41_branch(H0, Ha, Hb) == Branch41::I ? "i" : "ii", !(err <= 1e-9), err);
  };
  for (std::uint64_t t = 0; t < trials; ++t) {
    detail::Draw d(seed, t, 41);
    const HFrame f = detail::random_frame(d);
    if (t % 2 == 0) {
      const double H0 = d.in(0.05, 0.5);
      check(f, H0, d.in(2 * H0 + 0.01, 3), d.in(2 * H0 + 0.01, 3));
    } else {
      const double H0 = d.in(0.2, 1.5);
      const double Ha = d.in(0.05, 3), Hb = d.in(0.05, std::min(2 * H0, 3.0));
      if (d.u() < 0.5) check(f, H0, Ha, Hb);
      else check(f, H0, Hb, Ha);
    }
  }
  for (const auto& fx : fixtures) check(HFrame(fx.alpha, fx.beta), fx.H0, fx.Ha, fx.Hb);
  r.seconds = tm.seconds();
  return r;
}

inline SuiteReport lemma42_suite(std::uint64_t trials, std::uint64_t seed,
                                 const std::vector<FrameFixture>& fixtures = {}, OracleOptions opt = {}) {
  SuiteReport r;
  r.name = "lemma4.2";
  detail::Timer tm;
  auto check = [&](const HFrame& f, double H0, double Ha, double Hb, Vec2 x, Delta42 dl) {
    const double u0 = detail::union_area({f.b0a(H0, Ha), f.b0b(H0, Hb)}, r.exact_fallbacks, opt);
    const double u1 = detail::union_area({f.b0a(H0, Ha), f.b0b(H0, Hb, x)}, r.exact_fallbacks, opt);
    const double o = (u1 - u0) / f.C();
    const double err = std::abs(dl.value - o) / (1 + std::abs(o));
    detail::count(r, label(dl.which), !(err <= 1e-9), err);
  };
  for (std::uint64_t t = 0; t < trials; ++t) {
    const Case42 want = Case42(t % 5);
    for (std::uint32_t attempt = 0; attempt < 100000; ++attempt) {
      detail::Draw d(seed, t, 42 + (attempt << 8));
      const HFrame f = detail::random_frame(d);
      double H0, Ha, Hb;
      if (want == Case42::I) {
        H0 = d.in(0.05, 0.6);
        Ha = d.in(2 * H0 + 0.01, 2.5);
        Hb = d.in(2 * H0 + 0.01, 2.5);
      } else {
        Hb = d.in(0.1, 1.5);
        Ha = d.in(0.1, 2.5);
        H0 = d.in(std::min(Ha, Hb) / 2, 1.5);
      }
      const Vec2 x = f.from_h(Ha * d.in(-1, 1), Hb * d.in(-1, 1));
      const Delta42 dl = lemma42_delta(f, H0, Ha, Hb, x);
      if (dl.which != want) continue;
      check(f, H0, Ha, Hb, x, dl);
      break;
    }
  }
  for (const auto& fx : fixtures) {
    const HFrame f(fx.alpha, fx.beta);
    for (auto [a, b] : {std::pair{0.0, 0.0}, {0.5, -0.5}, {-0.25, 0.75}, {1.0, 1.0}, {-1.0, 0.3}}) {
      const Vec2 x = f.from_h(a * fx.Ha, b * fx.Hb);
      check(f, fx.H0, fx.Ha, fx.Hb, x, lemma42_delta(f, fx.H0, fx.Ha, fx.Hb, x));
    }
  }
  r.seconds = tm.seconds();
  return r;
}

namespace detail {

// Union of equal translates is connected iff the overlap graph is.
inline bool connected_translates(const Parallelogram& p, const std::vector<Vec2>& xs) {
  std::vector<std::array<double, 2>> c;
  for (auto x : xs) c.push_back(p.coords(p.center + x));
  std::vector<char> seen(xs.size(), 0);
  std::vector<std::size_t> q{0};
  seen[0] = 1;
  for (std::size_t h = 0; h < q.size(); ++h)
    for (std::size_t k = 0; k < xs.size(); ++k)
      if (!seen[k] && std::abs(c[k][0] - c[q[h]][0]) <= 2 * p.r1 && std::abs(c[k][1] - c[q[h]][1]) <= 2 * p.r2) {
        seen[k] = 1;
        q.push_back(k);
      }
  return q.size() == xs.size();
}

}  // namespace detail

inline SuiteReport lemma31_suite(std::uint64_t trials, std::uint64_t seed, OracleOptions opt = {}) {
  SuiteReport r;
  r.name = "lemma3.1";
  detail::Timer tm;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (std::uint32_t attempt = 0;; ++attempt) {
      detail::Draw d(seed, t, 31 + (attempt << 8));
      const HFrame f = detail::random_frame(d);
      const double Ra = d.in(0.2, 1.5), Rb = d.in(0.2, 1.5);
      const Parallelogram B{{0, 0}, f.alpha(), f.beta(), Ra, Rb};
      const int k = d.pick(2, 5);
      const double spread_scale = d.in(0.05, 1.5);
      std::vector<Vec2> xs{{0, 0}};
      for (int i = 1; i < k; ++i)
        xs.push_back(f.from_h(spread_scale * Ra / f.sin_beta() * d.in(-1, 1),
                              spread_scale * Rb / f.sin_alpha() * d.in(-1, 1)));
      if (!detail::connected_translates(B, xs)) continue;
      std::vector<Parallelogram> ps;
      for (auto x : xs) ps.push_back(B.translated(x));
      const double exact = detail::union_area(ps, r.exact_fallbacks, opt) - B.area();
      const auto b = lemma31_bounds(f, Ra, Rb, xs);
      const double tol = 1e-9 * (1 + exact);
      const double excess =
          std::max({exact - b.upper, b.lower_connected - exact, b.lower2_connected - exact, 0.0});
      detail::count(r, "k=" + std::to_string(k), excess > tol, excess);
      break;
    }
  }
  r.seconds = tm.seconds();
  return r;
}

namespace detail {

struct TwoGroup {
  HFrame f{1, 2};
  double H0 = 0, Ha = 0, Hb = 0;
  std::vector<Vec2> xs, ys;
  Vec2 u{};
  Case43 which = Case43::I;
};

// Admissible (xs, ys, u) for the requested case: spreads of the h-coordinates
// stay inside the case's smallness budget, leaving a share for u.
inline TwoGroup sample_two_group(Draw& d, Case43 which) {
  TwoGroup g;
  g.f = random_frame(d);
  g.which = which;
  double la, lb;
  if (which == Case43::I) {
    g.H0 = d.in(0.1, 0.5);
    g.Ha = d.in(2 * g.H0 + 0.1, 2.5);
    g.Hb = d.in(2 * g.H0 + 0.1, 2.5);
    la = g.Ha - 2 * g.H0;
    lb = g.Hb - 2 * g.H0;
  } else if (which == Case43::II) {
    g.Hb = d.in(0.3, 1.5);
    g.Ha = d.in(g.Hb + 0.05, 2.5);
    g.H0 = d.in(g.Hb / 2, 2.0);
    la = g.Ha - g.Hb;
    lb = g.Hb;
  } else {
    g.Ha = g.Hb = d.in(0.3, 1.5);
    g.H0 = d.in(g.Ha / 2, 2.0);
    la = g.Ha;
    lb = g.Hb;
  }
  const int k = d.pick(1, 3), l = d.pick(1, 3);
  const double s = d.in(0, 0.999), fa = d.u(), fb = d.u();
  auto side = [&](int n, double lim) {
    std::vector<double> v{0.0};
    for (int i = 1; i < n; ++i) v.push_back(d.in(-lim, lim));
    return v;
  };
  const auto xa = side(k, s * la * fa / 2), xb = side(k, s * lb * fb / 2);
  const auto ya = side(l, s * la * (1 - fa) / 2), yb = side(l, s * lb * (1 - fb) / 2);
  for (int i = 0; i < k; ++i) g.xs.push_back(i == 0 ? Vec2{} : g.f.from_h(xa[i], xb[i]));
  for (int i = 0; i < l; ++i) g.ys.push_back(i == 0 ? Vec2{} : g.f.from_h(ya[i], yb[i]));
  const double ra = la - spread(xa) - spread(ya), rb = lb - spread(xb) - spread(yb);
  g.u = g.f.from_h(0.999 * ra * d.in(-1, 1) * d.u(), 0.999 * rb * d.in(-1, 1) * d.u());
  return g;
}

// C * Delta(x, y | u)
inline double oracle_delta_xy(const TwoGroup& g, Vec2 u, std::uint64_t& fallbacks, const OracleOptions& opt) {
  std::vector<Parallelogram> ps;
  for (auto x : g.xs) ps.push_back(g.f.b0a(g.H0, g.Ha, x));
  for (auto y : g.ys) ps.push_back(g.f.b0b(g.H0, g.Hb, y + u));
  const double u1 = union_area(ps, fallbacks, opt);
  const double u0 = union_area({g.f.b0a(g.H0, g.Ha), g.f.b0b(g.H0, g.Hb, u)}, fallbacks, opt);
  return (u1 - u0) / g.f.C();
}

}  // namespace detail

inline SuiteReport lemma43_suite(std::uint64_t trials, std::uint64_t seed, OracleOptions opt = {}) {
  SuiteReport r;
  r.name = "lemma4.3";
  detail::Timer tm;
  for (std::uint64_t t = 0; t < trials; ++t) {
    detail::Draw d(seed, t, 43);
    const auto g = detail::sample_two_group(d, Case43(t % 3));
    const auto b = lemma43_bounds(g.f, g.H0, g.Ha, g.Hb, g.xs, g.ys);
    const double D = detail::oracle_delta_xy(g, {}, r.exact_fallbacks, opt);
    const double excess = std::max({D - b.upper, b.lower - D, 0.0});
    detail::count(r, label(b.which), excess > 1e-9 * (1 + std::abs(D)), excess);
  }
  r.seconds = tm.seconds();
  return r;
}

inline SuiteReport lemma44_suite(std::uint64_t trials, std::uint64_t seed, OracleOptions opt = {}) {
  SuiteReport r;
  r.name = "lemma4.4";
  detail::Timer tm;
  for (std::uint64_t t = 0; t < trials; ++t) {
    detail::Draw d(seed, t, 44);
    const auto g = detail::sample_two_group(d, Case43(t % 3));
    const auto s = lemma44_shift(g.f, g.H0, g.Ha, g.Hb, g.xs, g.ys, g.u);
    const double diff = detail::oracle_delta_xy(g, g.u, r.exact_fallbacks, opt) -
                        detail::oracle_delta_xy(g, {}, r.exact_fallbacks, opt);
    const double excess = std::max({diff - s.diff.hi, s.diff.lo - diff, 0.0});
    detail::count(r, label(s.which), excess > 1e-9, excess);
  }
  r.seconds = tm.seconds();
  return r;
}

// Membership in the neighborhood parallelogram against the stick predicate.
inline SuiteReport neighborhood_suite(std::uint64_t trials, std::uint64_t seed) {
  SuiteReport r;
  r.name = "neighborhood";
  detail::Timer tm;
  for (std::uint64_t t = 0; t < trials; ++t) {
    detail::Draw d(seed, t, 21);
    const Stick w{{d.in(-3, 3), d.in(-3, 3)}, d.in(0, std::numbers::pi * 0.999), d.in(0.2, 2)};
    double th = d.in(0, std::numbers::pi * 0.999);
    if (std::abs(th - w.theta) < 1e-3) th = std::fmod(th + 1, std::numbers::pi);
    const double rr = d.in(0.2, 2);
    const Vec2 x{w.center.x + d.in(-4, 4), w.center.y + d.in(-4, 4)};
    const bool a = neighborhood_region(w, th, rr).contains(x), b = sticks_intersect(w, {x, th, rr});
    detail::count(r, a ? "inside" : "outside", a != b, a != b ? 1.0 : 0.0);
  }
  r.seconds = tm.seconds();
  return r;
}

}  // namespace sticklab
