#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace sticklab {

struct Vec2 {
  double x = 0, y = 0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

struct Stick {
  Vec2 center;
  double theta = 0;
  double halflen = 1;

  Vec2 p() const { return center - halflen * unit(theta); }
  Vec2 q() const { return center + halflen * unit(theta); }
};

inline void require_valid(const Stick& s) {
  if (!finite(s.center) || !(s.theta >= 0 && s.theta < std::numbers::pi) || !(s.halflen > 0))
    throw std::invalid_argument("invalid stick");
}

namespace detail {

using Rational = boost::multiprecision::cpp_rational;

// Sign of (b-a) x (c-a). A forward error filter decides most cases in double;
// the rest go through exact rational arithmetic on the (exact) double inputs.
inline int orient(Vec2 a, Vec2 b, Vec2 c) {
  const double l = (b.x - a.x) * (c.y - a.y);
  const double r = (b.y - a.y) * (c.x - a.x);
  const double det = l - r;
  const double bound = 1e-14 * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (det < -bound) return -1;
  const Rational ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  const Rational e = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return e > 0 ? 1 : (e < 0 ? -1 : 0);
}

inline bool on_box(Vec2 a, Vec2 b, Vec2 c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const int d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_box(q1, q2, p1)) return true;
  if (d2 == 0 && on_box(q1, q2, p2)) return true;
  if (d3 == 0 && on_box(p1, p2, q1)) return true;
  if (d4 == 0 && on_box(p1, p2, q2)) return true;
  return false;
}

}  // namespace detail

// Closed segments: touching and collinear overlap count.
inline bool sticks_intersect(const Stick& a, const Stick& b) {
  const double reach = a.halflen + b.halflen;
  if (std::abs(a.center.x - b.center.x) > reach || std::abs(a.center.y - b.center.y) > reach)
    return false;
  return detail::segments_intersect(a.p(), a.q(), b.p(), b.q());
}

// B^{theta1,theta2}_{r1,r2}(center) = center + {s e1 + t e2 : |s|<=r1, |t|<=r2}.
// A zero extent is allowed and marks the region as degenerate.
struct Parallelogram {
  Vec2 center;
  double theta1 = 0, theta2 = std::numbers::pi / 2;
  double r1 = 1, r2 = 1;

  bool degenerate() const { return !(r1 > 0 && r2 > 0); }
  double area() const {
    return degenerate() ? 0.0 : 4.0 * r1 * r2 * std::sin(theta2 - theta1);
  }
  // counterclockwise
  std::array<Vec2, 4> vertices() const {
    const Vec2 a = r1 * unit(theta1), b = r2 * unit(theta2);
    return {center - a - b, center + a - b, center + a + b, center - a + b};
  }
  // frame coordinates (s, t) of x
  std::array<double, 2> coords(Vec2 x) const {
    const Vec2 e1 = unit(theta1), e2 = unit(theta2), d = x - center;
    const double den = cross(e1, e2);
    return {cross(d, e2) / den, cross(e1, d) / den};
  }
  bool contains(Vec2 x) const {
    const auto [s, t] = coords(x);
    return std::abs(s) <= r1 && std::abs(t) <= r2;
  }
  Parallelogram translated(Vec2 u) const {
    Parallelogram p = *this;
    p.center = center + u;
    return p;
  }
};

inline Parallelogram make_parallelogram(Vec2 c, double t1, double r1, double t2, double r2) {
  if (t1 == t2) throw DegenerateOrientation("parallelogram with equal orientations");
  if (t1 > t2) {
    std::swap(t1, t2);
    std::swap(r1, r2);
  }
  return {c, t1, t2, r1, r2};
}

// Centers x for which S(x, theta, r) hits w.
inline Parallelogram neighborhood_region(const Stick& w, double theta, double r) {
  if (theta == w.theta)
    throw DegenerateOrientation("neighborhood of parallel sticks has zero area");
  return make_parallelogram(w.center, w.theta, w.halflen, theta, r);
}

struct Mat2 {
  double a11, a12, a21, a22;

  Vec2 operator*(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
  double det() const { return a11 * a22 - a12 * a21; }
};

// D^{t,t'}_{R,R'}: columns R e_t and R' e_t'.
inline Mat2 d_matrix(double t, double tp, double R, double Rp) {
  return {R * std::cos(t), Rp * std::cos(tp), R * std::sin(t), Rp * std::sin(tp)};
}

// A^{t,t'}_{R,R'} = sin(t'-t) R R' (D^{t,t'}_{R,R'})^{-1}
inline Mat2 a_matrix(double t, double tp, double R, double Rp) {
  return {Rp * std::sin(tp), -Rp * std::cos(tp), -R * std::sin(t), R * std::cos(t)};
}

struct HCoords {
  double h_alpha = 0, h_beta = 0, h0bar = 0;
};

// Oblique frame for orientations 0 < alpha < beta < pi, measured from the
// horizontal orientation 0.
class HFrame {
 public:
  HFrame(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(0 < alpha && alpha < beta && beta < std::numbers::pi))
      throw DegenerateOrientation("frame needs 0 < alpha < beta < pi");
    sa_ = std::sin(alpha);
    sb_ = std::sin(beta);
    sba_ = std::sin(beta - alpha);
    C_ = sa_ * sb_ * sba_;
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double C() const { return C_; }
  double sin_alpha() const { return sa_; }
  double sin_beta() const { return sb_; }
  double sin_beta_alpha() const { return sba_; }

  Mat2 D() const { return d_matrix(alpha_, beta_, sb_, sa_); }
  Mat2 A() const { return a_matrix(alpha_, beta_, sb_, sa_); }

  HCoords h(Vec2 x) const {
    const Vec2 v = A() * x;
    const double ha = v.x / C_, hb = v.y / C_;
    return {ha, hb, ha + hb};
  }
  Vec2 from_h(double ha, double hb) const { return D() * Vec2{ha, hb}; }

  // R_theta^0, R_theta^alpha, R_theta^beta conversions
  double R0(double H0) const { return H0 * sba_; }
  double Ra(double Ha) const { return Ha * sb_; }
  double Rb(double Hb) const { return Hb * sa_; }

  Parallelogram b0a(double H0, double Ha, Vec2 c = {}) const {
    return {c, 0.0, alpha_, R0(H0), Ra(Ha)};
  }
  Parallelogram b0b(double H0, double Hb, Vec2 c = {}) const {
    return {c, 0.0, beta_, R0(H0), Rb(Hb)};
  }

 private:
  double alpha_, beta_, sa_, sb_, sba_, C_;
};

inline HCoords h_coords(const HFrame& f, Vec2 x) { return f.h(x); }

inline double spread(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("spread of empty list");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

enum class Branch41 { I, II };

inline Branch41 lemma41_branch(double H0, double Ha, double Hb) {
  return (Ha > 2 * H0 && Hb > 2 * H0) ? Branch41::I : Branch41::II;
}

// |B^{0,a}_{R0,Ra} u B^{0,b}_{R0,Rb}|
inline double lemma41_area(const HFrame& f, double H0, double Ha, double Hb) {
  if (!(H0 > 0 && Ha > 0 && Hb > 0)) throw std::invalid_argument("H-values must be positive");
  if (lemma41_branch(H0, Ha, Hb) == Branch41::I) return 4 * f.C() * H0 * (Ha + Hb - H0);
  const double mx = std::max(Ha, Hb), mn = std::min(Ha, Hb);
  return f.C() * (4 * H0 * mx + mn * mn);
}

enum class Case42 { I, IIa, IIb, IIc, IId };

inline const char* label(Case42 c) {
  switch (c) {
    case Case42::I: return "i";
    case Case42::IIa: return "ii-a";
    case Case42::IIb: return "ii-b";
    case Case42::IIc: return "ii-c";
    case Case42::IId: return "ii-d";
  }
  return "?";
}

struct Delta42 {
  double value;
  Case42 which;
};

// (|B^{0,a} u B^{0,b}(x)| - |B^{0,a} u B^{0,b}|) / C
inline Delta42 lemma42_delta(const HFrame& f, double H0, double Ha, double Hb, Vec2 x) {
  const HCoords h = f.h(x);
  double ha = h.h_alpha, hb = h.h_beta;
  const double tol = 1e-12 * (1 + std::max(Ha, Hb));
  if (std::abs(ha) > Ha + tol || std::abs(hb) > Hb + tol)
    throw OutOfDomain("shift outside [-Ha,Ha] x [-Hb,Hb] in h-coordinates");

  auto sq = [](double v) { return v * v; };
  auto pos = [](double v) { return std::max(v, 0.0); };

  if (2 * H0 < Ha && 2 * H0 < Hb) {
    const double v = 0.5 * sq(std::max({-ha + 2 * H0 - Ha, hb + 2 * H0 - Hb, 0.0})) +
                     0.5 * sq(std::max({ha + 2 * H0 - Ha, -hb + 2 * H0 - Hb, 0.0}));
    return {v, Case42::I};
  }
  // stated for Ha >= Hb; the reflection (x,y) -> (x,-y) swaps the roles
  if (Hb > Ha) {
    std::swap(Ha, Hb);
    std::swap(ha, hb);
  }
  const double h0 = ha + hb, d = Ha - Hb, t = 2 * H0 - Hb;
  const double ah0 = std::abs(h0), ahb = std::abs(hb);
  if (ah0 <= d) {
    if (ahb <= t) return {hb * hb, Case42::IIa};
    return {hb * hb - 0.5 * sq(ahb - t), Case42::IIa};
  }
  if (ahb <= t) {
    const double s = h0 > 0 ? 1.0 : -1.0;
    return {hb * hb + 0.5 * sq(ah0 - d) + (t - s * hb) * (ah0 - d), Case42::IIb};
  }
  if (h0 * hb > 0) {
    const double s = hb > 0 ? 1.0 : -1.0;
    return {hb * hb - 0.5 * sq(ahb - t) + 0.5 * sq(pos(2 * H0 - Ha + s * ha)), Case42::IIc};
  }
  return {hb * hb - 0.5 * sq(ahb - t) + (ah0 - d) * (t + ahb + 0.5 * (ah0 - d)), Case42::IId};
}

struct ZeroSet {
  Parallelogram region;  // B^{alpha,beta} around the origin
  double ext_alpha, ext_beta;  // extents in h-units
  bool degenerate;
};

// {x : Delta(x) = 0}
inline ZeroSet lemma41_zero_set(const HFrame& f, double H0, double Ha, double Hb) {
  double ea, eb;
  if (2 * H0 < Ha && 2 * H0 < Hb) {
    ea = Ha - 2 * H0;
    eb = Hb - 2 * H0;
  } else {
    ea = std::max(Ha - Hb, 0.0);
    eb = std::max(Hb - Ha, 0.0);
  }
  Parallelogram p{{}, f.alpha(), f.beta(), f.Ra(ea), f.Rb(eb)};
  return {p, ea, eb, p.degenerate()};
}

}  // namespace sticklab
