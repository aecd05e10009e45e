#pragma once

// Excess-area bounds for unions of translated parallelograms.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geom2d.hpp"

namespace sticklab {

// |U_i (P + c_i)| for translates of one parallelogram P. In P's own frame the
// translates are equal axis-aligned rectangles; area scales by sin(t2-t1).
inline double translate_union_area(double t1, double t2, double r1, double r2,
                                   const std::vector<Vec2>& centers) {
  if (centers.empty() || !(r1 > 0 && r2 > 0)) return 0.0;
  const Parallelogram frame{{}, t1, t2, 1, 1};
  std::vector<std::array<double, 2>> c;
  std::vector<double> us;
  for (const auto& x : centers) {
    c.push_back(frame.coords(x));
    us.push_back(c.back()[0] - r1);
    us.push_back(c.back()[0] + r1);
  }
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());
  double area = 0;
  std::vector<std::pair<double, double>> iv;
  for (std::size_t k = 0; k + 1 < us.size(); ++k) {
    const double um = 0.5 * (us[k] + us[k + 1]);
    iv.clear();
    for (const auto& p : c)
      if (std::abs(um - p[0]) < r1) iv.emplace_back(p[1] - r2, p[1] + r2);
    if (iv.empty()) continue;
    std::sort(iv.begin(), iv.end());
    double len = 0, lo = iv[0].first, hi = iv[0].second;
    for (std::size_t i = 1; i < iv.size(); ++i) {
      if (iv[i].first > hi) {
        len += hi - lo;
        lo = iv[i].first;
        hi = iv[i].second;
      } else {
        hi = std::max(hi, iv[i].second);
      }
    }
    len += hi - lo;
    area += (us[k + 1] - us[k]) * len;
  }
  return area * std::abs(std::sin(t2 - t1));
}

// |U_i (P + c_i)| - |P|
inline double translate_excess(double t1, double t2, double r1, double r2,
                               const std::vector<Vec2>& centers) {
  if (!(r1 > 0 && r2 > 0)) return 0.0;
  return translate_union_area(t1, t2, r1, r2, centers) - 4 * r1 * r2 * std::abs(std::sin(t2 - t1));
}

namespace detail {

inline std::vector<double> h_alpha_of(const HFrame& f, const std::vector<Vec2>& v) {
  std::vector<double> r;
  for (auto x : v) r.push_back(f.h(x).h_alpha);
  return r;
}
inline std::vector<double> h_beta_of(const HFrame& f, const std::vector<Vec2>& v) {
  std::vector<double> r;
  for (auto x : v) r.push_back(f.h(x).h_beta);
  return r;
}
inline std::vector<double> h0bar_of(const HFrame& f, const std::vector<Vec2>& v) {
  std::vector<double> r;
  for (auto x : v) r.push_back(f.h(x).h0bar);
  return r;
}
inline bool has_origin(const std::vector<Vec2>& v) {
  return std::any_of(v.begin(), v.end(), [](Vec2 x) { return x.x == 0 && x.y == 0; });
}
inline bool same_h(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

}  // namespace detail

struct Bounds31 {
  double upper, lower_connected, lower2_connected;
};

// Bounds on |U_i B^{a,b}_{Ra,Rb}(x_i) \ B^{a,b}_{Ra,Rb}|. The lower bounds
// assume the union is connected.
inline Bounds31 lemma31_bounds(const HFrame& f, double Ra, double Rb, const std::vector<Vec2>& xs) {
  if (xs.empty()) throw std::invalid_argument("empty translate list");
  const double Ha = Ra / f.sin_beta(), Hb = Rb / f.sin_alpha();
  const double Ma = spread(detail::h_alpha_of(f, xs)), Mb = spread(detail::h_beta_of(f, xs));
  const double C = f.C(), lin = Ha * Mb + Hb * Ma;
  return {2 * C * lin + C * Ma * Mb, C * lin, 2 * C * lin - C * Ma * Mb};
}

enum class Case43 { I, II, III };

inline const char* label(Case43 c) {
  switch (c) {
    case Case43::I: return "i";
    case Case43::II: return "ii";
    case Case43::III: return "iii";
  }
  return "?";
}

inline Case43 lemma43_case(double H0, double Ha, double Hb) {
  if (2 * H0 < Ha && 2 * H0 < Hb) return Case43::I;
  if (detail::same_h(Ha, Hb)) return Case43::III;
  if (Ha > Hb) return Case43::II;
  throw PreconditionFailed("cases (ii)/(iii) are stated for H_alpha >= H_beta");
}

struct Bounds43 {
  double upper, lower;
  Case43 which;
};

// Delta(x, y | u) = (|U B^{0,a}(x_i) u U B^{0,b}(y_j + u)| - |B^{0,a} u B^{0,b}(u)|) / C,
// for alpha-stick offsets xs and beta-stick offsets ys.
inline Bounds43 lemma43_bounds(const HFrame& f, double H0, double Ha, double Hb,
                               const std::vector<Vec2>& xs, const std::vector<Vec2>& ys) {
  if (!detail::has_origin(xs) || !detail::has_origin(ys))
    throw PreconditionFailed("both offset lists must contain the origin");
  const Case43 c = lemma43_case(H0, Ha, Hb);
  const double Max = spread(detail::h_alpha_of(f, xs)), May = spread(detail::h_alpha_of(f, ys));
  const double Mbx = spread(detail::h_beta_of(f, xs)), Mby = spread(detail::h_beta_of(f, ys));
  const double sa = f.sin_alpha(), sb = f.sin_beta(), sba = f.sin_beta_alpha(), C = f.C();
  const double a = f.alpha(), b = f.beta();

  switch (c) {
    case Case43::I: {
      if (!(Max + May < Ha - 2 * H0))
        throw PreconditionFailed("M(h_a(x)) + M(h_a(y)) < H_a - 2H_0 fails");
      if (!(Mbx + Mby < Hb - 2 * H0))
        throw PreconditionFailed("M(h_b(x)) + M(h_b(y)) < H_b - 2H_0 fails");
      const double T = (translate_excess(0, a, f.R0(H0), f.Ra(Ha) - H0 * sb, xs) +
                        translate_excess(0, b, f.R0(H0), f.Rb(Hb) - H0 * sa, ys)) / C;
      return {T, T - May * Mbx, c};
    }
    case Case43::II: {
      if (!(Max + May < Ha - Hb))
        throw PreconditionFailed("M(h_a(x)) + M(h_a(y)) < H_a - H_b fails");
      if (!(Mbx + Mby < Hb)) throw PreconditionFailed("M(h_b(x)) + M(h_b(y)) < H_b fails");
      const double T = (translate_excess(0, a, f.R0(H0), f.Ra(Ha) - 0.5 * Hb * sb, xs) +
                        translate_excess(0, b, 0.5 * Hb * sba, 0.5 * f.Rb(Hb), ys)) / C;
      return {T + 0.5 * Mbx * Mbx + 0.5 * May * May,
              T - Mbx * Mby - Mbx * May - Mbx * Mbx - May * May, c};
    }
    case Case43::III: {
      if (!(Max + May < Ha)) throw PreconditionFailed("M(h_a(x)) + M(h_a(y)) < H_a fails");
      if (!(Mbx + Mby < Hb)) throw PreconditionFailed("M(h_b(x)) + M(h_b(y)) < H_b fails");
      const double T = (translate_excess(0, a, 0.5 * Ha * sba, 0.5 * f.Ra(Ha), xs) +
                        translate_excess(0, b, 0.5 * Hb * sba, 0.5 * f.Rb(Hb), ys)) / C;
      auto h0x = detail::h0bar_of(f, xs), h0y = detail::h0bar_of(f, ys);
      std::vector<double> h0xy = h0x;
      h0xy.insert(h0xy.end(), h0y.begin(), h0y.end());
      const double M0 = spread(h0xy), lin = T + (2 * H0 - Hb) * M0;
      return {lin + 0.5 * Mbx * Mbx + 0.5 * May * May,
              lin - 0.5 * M0 * M0 - std::min(spread(h0x), spread(h0y)) * (Mbx + May), c};
    }
  }
  return {0, 0, c};
}

struct Interval {
  double lo, hi;
  bool contains(double v, double tol = 0) const { return v >= lo - tol && v <= hi + tol; }
};

struct Shift44 {
  Interval diff;  // contains Delta(x, y | u) - Delta(x, y)
  Case43 which;
};

inline Shift44 lemma44_shift(const HFrame& f, double H0, double Ha, double Hb,
                             const std::vector<Vec2>& xs, const std::vector<Vec2>& ys, Vec2 u) {
  if (!detail::has_origin(xs) || !detail::has_origin(ys))
    throw PreconditionFailed("both offset lists must contain the origin");
  const Case43 c = lemma43_case(H0, Ha, Hb);
  const HCoords hu = f.h(u);
  const double Max = spread(detail::h_alpha_of(f, xs)), May = spread(detail::h_alpha_of(f, ys));
  const double Mbx = spread(detail::h_beta_of(f, xs)), Mby = spread(detail::h_beta_of(f, ys));
  const double ua = std::abs(hu.h_alpha), ub = std::abs(hu.h_beta);
  const double la = c == Case43::I ? Ha - 2 * H0 : (c == Case43::II ? Ha - Hb : Ha);
  const double lb = c == Case43::I ? Hb - 2 * H0 : Hb;
  if (!(Max + May + ua < la)) throw PreconditionFailed("alpha spread condition with |h_a(u)| fails");
  if (!(Mbx + Mby + ub < lb)) throw PreconditionFailed("beta spread condition with |h_b(u)| fails");

  switch (c) {
    case Case43::I: return {{0, 0}, c};
    case Case43::II: return {{-ub * ub, ub * ub}, c};
    case Case43::III: {
      auto h0x = detail::h0bar_of(f, xs), h0y = detail::h0bar_of(f, ys);
      std::vector<double> both = h0x, shifted = h0x;
      both.insert(both.end(), h0y.begin(), h0y.end());
      for (double v : h0y) shifted.push_back(v + hu.h0bar);
      const double t = spread(shifted) - std::abs(hu.h0bar) - spread(both);
      const double mid = (2 * H0 - Hb) * t;
      const double w = ua * ua + ub * ub + std::abs(t) * (Max + May + ua + Mbx + Mby + ub);
      return {{mid - w, mid + w}, c};
    }
  }
  return {{0, 0}, c};
}

}  // namespace sticklab
