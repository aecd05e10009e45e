#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sticklab/area_oracle.hpp"
#include "sticklab/bounds.hpp"
#include "sticklab/geom2d.hpp"

using namespace sticklab;
using std::numbers::pi;

namespace {

double shoelace(const std::array<Vec2, 4>& v) {
  double a = 0;
  for (int i = 0; i < 4; ++i) a += v[i].x * v[(i + 1) % 4].y - v[(i + 1) % 4].x * v[i].y;
  return 0.5 * a;
}

// parametric solve, independent of the orientation predicates; non-parallel pairs only
bool segments_meet_bruteforce(const Stick& a, const Stick& b) {
  const Vec2 ea = unit(a.theta), eb = unit(b.theta);
  const double den = cross(ea, eb);
  const Vec2 d = b.center - a.center;
  if (std::abs(den) < 1e-12) return false;  // parallel cases are excluded by the caller
  const double s = cross(d, eb) / den, t = cross(d, ea) / den;
  return std::abs(s) <= a.halflen && std::abs(t) <= b.halflen;
}

}  // namespace

TEST(Sticks, PerpendicularCrossing) {
  EXPECT_TRUE(sticks_intersect({{0, 0}, 0, 1}, {{0.5, 0.5}, pi / 2, 1}));
}

TEST(Sticks, ParallelDisjoint) { EXPECT_FALSE(sticks_intersect({{0, 0}, 0, 1}, {{0, 3}, 0, 1})); }

TEST(Sticks, CollinearOverlap) { EXPECT_TRUE(sticks_intersect({{0, 0}, 0, 1}, {{2, 0}, 0, 1.5})); }

TEST(Sticks, EndpointTouchCounts) {
  EXPECT_TRUE(sticks_intersect({{0, 0}, 0, 1}, {{1, 1}, pi / 2, 1}));
  EXPECT_TRUE(sticks_intersect({{0, 0}, 0, 1}, {{3, 0}, 0, 2}));
  EXPECT_FALSE(sticks_intersect({{0, 0}, 0, 1}, {{3, 0}, 0, 1.75}));
}

TEST(Sticks, SymmetricOnRandomPairs) {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> U(-2, 2), T(0, pi), L(0.1, 2);
  for (int i = 0; i < 5000; ++i) {
    Stick a{{U(g), U(g)}, T(g), L(g)}, b{{U(g), U(g)}, T(g), L(g)};
    EXPECT_EQ(sticks_intersect(a, b), sticks_intersect(b, a));
    EXPECT_EQ(sticks_intersect(a, b), segments_meet_bruteforce(a, b));
  }
}

TEST(Neighborhood, UnitPerpendicularSquare) {
  auto p = neighborhood_region({{0, 0}, 0, 1}, pi / 2, 1);
  EXPECT_NEAR(p.area(), 4.0, 1e-15);
  EXPECT_NEAR(shoelace(p.vertices()), 4.0, 1e-12);
}

TEST(Neighborhood, ObliqueArea) {
  auto p = neighborhood_region({{0, 0}, 0, 1}, pi / 6, 2);
  EXPECT_NEAR(shoelace(p.vertices()), 4.0, 1e-12);
}

TEST(Neighborhood, EqualOrientationRejected) {
  EXPECT_THROW(neighborhood_region({{0, 0}, 0.3, 1}, 0.3, 1), DegenerateOrientation);
}

TEST(Neighborhood, MembershipEqualsIntersection) {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> T(0, pi), L(0.2, 2), U(-5, 5);
  for (int rep = 0; rep < 20; ++rep) {
    Stick w{{U(g), U(g)}, T(g), L(g)};
    double th = T(g);
    if (std::abs(th - w.theta) < 1e-3) th = std::fmod(th + 1, pi);
    const double r = L(g);
    const auto region = neighborhood_region(w, th, r);
    for (int i = 0; i < 500; ++i) {
      Vec2 x{w.center.x + U(g) * 0.8, w.center.y + U(g) * 0.8};
      EXPECT_EQ(region.contains(x), sticks_intersect(w, {x, th, r}));
    }
  }
}

TEST(Neighborhood, ExactBoundaryInputs) {
  // horizontal w, vertical probes: the region is the square [-1,1] x [-0.5,0.5]
  Stick w{{0, 0}, 0, 1};
  const auto region = neighborhood_region(w, pi / 2, 0.5);
  for (Vec2 x : {Vec2{1, 0.5}, Vec2{-1, -0.5}, Vec2{0, 0.5}, Vec2{1, 0}}) {
    EXPECT_TRUE(region.contains(x));
    EXPECT_TRUE(sticks_intersect(w, {x, pi / 2, 0.5}));
  }
  for (Vec2 x : {Vec2{1.25, 0}, Vec2{0, 0.75}}) {
    EXPECT_FALSE(region.contains(x));
    EXPECT_FALSE(sticks_intersect(w, {x, pi / 2, 0.5}));
  }
}

TEST(HFrame, Basics) {
  HFrame f(pi / 3, 2 * pi / 3);
  auto h = f.h({0, 0});
  EXPECT_EQ(h.h_alpha, 0);
  EXPECT_EQ(h.h_beta, 0);
  h = f.h(std::sin(2 * pi / 3) * unit(pi / 3));
  EXPECT_NEAR(h.h_alpha, 1, 1e-15);
  EXPECT_NEAR(h.h_beta, 0, 1e-15);
  EXPECT_GT(f.C(), 0);
  EXPECT_NEAR(f.C(), std::pow(std::sqrt(3) / 2, 3), 1e-15);
}

TEST(HFrame, AIsScaledInverseOfD) {
  HFrame f(0.4, 2.1);
  const Mat2 D = f.D(), A = f.A();
  const double s = f.C();
  EXPECT_NEAR((A.a11 * D.a11 + A.a12 * D.a21) / s, 1, 1e-14);
  EXPECT_NEAR((A.a11 * D.a12 + A.a12 * D.a22) / s, 0, 1e-14);
  EXPECT_NEAR((A.a21 * D.a11 + A.a22 * D.a21) / s, 0, 1e-14);
  EXPECT_NEAR((A.a21 * D.a12 + A.a22 * D.a22) / s, 1, 1e-14);
}

TEST(HFrame, RoundTripAndH0barIdentity) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> A(0.1, 1.5), U(-3, 3);
  for (int i = 0; i < 2000; ++i) {
    const double al = A(g), be = al + std::uniform_real_distribution<double>(0.1, pi - al - 0.05)(g);
    HFrame f(al, be);
    Vec2 x{U(g), U(g)};
    auto h = f.h(x);
    Vec2 y = f.from_h(h.h_alpha, h.h_beta);
    EXPECT_NEAR(y.x, x.x, 1e-12);
    EXPECT_NEAR(y.y, x.y, 1e-12);
    EXPECT_EQ(h.h0bar, h.h_alpha + h.h_beta);
    EXPECT_NEAR(h.h0bar, x.y / (std::sin(al) * std::sin(be)), 1e-12 * (1 + std::abs(h.h0bar)));
    // x = x^a e_a + x^b e_b with h_a = x^a / sin b
    const Vec2 z = (h.h_alpha * std::sin(be)) * unit(al) + (h.h_beta * std::sin(al)) * unit(be);
    EXPECT_NEAR(z.x, x.x, 1e-12);
  }
}

TEST(HFrame, InvalidAngles) {
  EXPECT_THROW(HFrame(1.0, 1.0), DegenerateOrientation);
  EXPECT_THROW(HFrame(0.0, 1.0), DegenerateOrientation);
}

TEST(Oracle, SingleSquare) {
  EXPECT_NEAR(area_union_oracle({Parallelogram{{0, 0}, 0, pi / 2, 1, 1}}), 4, 1e-12);
}

TEST(Oracle, Idempotent) {
  Parallelogram p{{0.3, -0.2}, 0.2, 1.9, 0.7, 1.3};
  EXPECT_NEAR(area_union_oracle({p, p}), p.area(), 1e-12);
}

TEST(Oracle, DisjointAdditive) {
  Parallelogram p{{0, 0}, 0.2, 1.9, 0.7, 1.3};
  EXPECT_NEAR(area_union_oracle({p, p.translated({10, 0})}), 2 * p.area(), 1e-12);
}

TEST(Oracle, InclusionExclusionOfAlignedSquares) {
  // [0,2]^2 and [1,3]^2
  Parallelogram a{{1, 1}, 0, pi / 2, 1, 1}, b{{2, 2}, 0, pi / 2, 1, 1};
  EXPECT_NEAR(area_union_oracle({a, b}), 7, 1e-12);
}

TEST(Oracle, RationalFallbackAgrees) {
  HFrame f(pi / 3, 2 * pi / 3);
  const std::vector<Parallelogram> ps{f.b0a(1, 1), f.b0b(1, 1)};
  std::vector<Polygon> polys{to_polygon(ps[0]), to_polygon(ps[1])};
  auto r = area_union_oracle_ex(polys);
  EXPECT_NEAR(r.area, lemma41_area(f, 1, 1, 1), 1e-12);
  EXPECT_THROW(
      {
        if (r.exact) area_union_oracle_ex(polys, {1e-12, false});
        else throw NumericalDegeneracy("double path was already clean");
      },
      NumericalDegeneracy);
}

TEST(OracleMc, SquareAndDisjoint) {
  Parallelogram sq{{0, 0}, 0, pi / 2, 1, 1};
  auto e = area_union_mc({sq}, 1'000'000, 5);
  EXPECT_NEAR(e.estimate, 4, 3 * e.stderr_ + 1e-12);
  Parallelogram p{{0, 0}, 0.2, 1.9, 0.7, 1.3};
  e = area_union_mc({p, p.translated({4, 0})}, 1'000'000, 6);
  EXPECT_NEAR(e.estimate, 2 * p.area(), 3 * e.stderr_);
}

TEST(OracleMc, RejectsSmallN) { EXPECT_THROW(area_union_mc({Parallelogram{}}, 10, 1), std::invalid_argument); }

TEST(Lemma41, WorkedValues) {
  HFrame f(pi / 3, 2 * pi / 3);
  const double C = std::pow(std::sqrt(3) / 2, 3);
  EXPECT_NEAR(lemma41_area(f, 0.1, 1, 1), 0.76 * C, 1e-14);
  EXPECT_NEAR(lemma41_area(f, 0.1, 1, 1), 0.493634, 1e-6);
  EXPECT_NEAR(lemma41_area(f, 1, 1, 1), 5 * C, 1e-14);
  EXPECT_NEAR(lemma41_area(f, 1, 1, 1), 3.247595, 1e-6);
  EXPECT_NEAR(lemma41_area(f, 1, 2, 0.5), 8.25 * C, 1e-14);
  for (auto [H0, Ha, Hb] : {std::array{0.1, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 2.0, 0.5}}) {
    const double o = area_union_oracle({f.b0a(H0, Ha), f.b0b(H0, Hb)});
    EXPECT_NEAR(lemma41_area(f, H0, Ha, Hb), o, 1e-9 * o);
  }
}

TEST(Lemma41, McCrossCheck) {
  HFrame f(0.7, 2.0);
  auto e = area_union_mc({f.b0a(0.4, 1.5), f.b0b(0.4, 1.1)}, 1'000'000, 9);
  EXPECT_NEAR(lemma41_area(f, 0.4, 1.5, 1.1), e.estimate, 3 * e.stderr_);
}

TEST(Lemma41, RandomAgreementBothBranches) {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> U(0, 1);
  int br[2] = {0, 0};
  for (int i = 0; i < 400; ++i) {
    const double al = 0.15 + 2.6 * U(g), be = al + (pi - al - 0.1) * (0.05 + 0.9 * U(g));
    HFrame f(al, be);
    const double H0 = 0.05 + U(g), Ha = 0.05 + 3 * U(g), Hb = 0.05 + 3 * U(g);
    const double o = area_union_oracle({f.b0a(H0, Ha), f.b0b(H0, Hb)});
    EXPECT_NEAR(lemma41_area(f, H0, Ha, Hb), o, 1e-9 * o);
    EXPECT_NEAR(lemma41_area(f, H0, Ha, Hb), lemma41_area(f, H0, Hb, Ha), 1e-12 * o);
    ++br[int(lemma41_branch(H0, Ha, Hb))];
  }
  EXPECT_GT(br[0], 0);
  EXPECT_GT(br[1], 0);
}

namespace {

double oracle_delta(const HFrame& f, double H0, double Ha, double Hb, Vec2 x) {
  const double u1 = area_union_oracle({f.b0a(H0, Ha), f.b0b(H0, Hb, x)});
  const double u0 = area_union_oracle({f.b0a(H0, Ha), f.b0b(H0, Hb)});
  return (u1 - u0) / f.C();
}

}  // namespace

TEST(Lemma42, WorkedValues) {
  HFrame f(pi / 3, 2 * pi / 3);
  EXPECT_EQ(lemma42_delta(f, 1, 1, 1, {0, 0}).value, 0);
  Vec2 x = f.from_h(-0.3, 0.3);
  auto d = lemma42_delta(f, 1, 1, 1, x);
  EXPECT_NEAR(d.value, 0.09, 1e-12);
  EXPECT_EQ(d.which, Case42::IIa);
  EXPECT_NEAR(oracle_delta(f, 1, 1, 1, x), 0.09, 1e-9);
  x = f.from_h(0.85, 0.9);
  d = lemma42_delta(f, 0.1, 1, 1, x);
  EXPECT_NEAR(d.value, 0.00625, 1e-12);
  EXPECT_EQ(d.which, Case42::I);
  EXPECT_NEAR(oracle_delta(f, 0.1, 1, 1, x), 0.00625, 1e-9);
}

TEST(Lemma42, OutOfDomain) {
  HFrame f(pi / 3, 2 * pi / 3);
  EXPECT_THROW(lemma42_delta(f, 1, 1, 1, f.from_h(1.5, 0)), OutOfDomain);
}

TEST(Lemma42, RandomAgreementAllCases) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> U(0, 1);
  int hits[5] = {};
  for (int i = 0; i < 3000; ++i) {
    const double al = 0.2 + 2.5 * U(g), be = al + (pi - al - 0.1) * (0.05 + 0.9 * U(g));
    HFrame f(al, be);
    const double H0 = 0.05 + 1.2 * U(g), Ha = 0.1 + 2 * U(g), Hb = 0.1 + 2 * U(g);
    Vec2 x = f.from_h(Ha * (2 * U(g) - 1), Hb * (2 * U(g) - 1));
    auto d = lemma42_delta(f, H0, Ha, Hb, x);
    EXPECT_NEAR(d.value, oracle_delta(f, H0, Ha, Hb, x), 1e-9 * (1 + d.value));
    ++hits[int(d.which)];
  }
  for (int c = 0; c < 5; ++c) EXPECT_GT(hits[c], 0) << label(Case42(c));
}

TEST(ZeroSet, BranchOne) {
  HFrame f(pi / 3, 2 * pi / 3);
  auto z = lemma41_zero_set(f, 0.1, 1, 1);
  EXPECT_FALSE(z.degenerate);
  EXPECT_NEAR(z.ext_alpha, 0.8, 1e-15);
  EXPECT_NEAR(z.ext_beta, 0.8, 1e-15);
  for (int i = 0; i <= 9; ++i)
    for (int j = 0; j <= 9; ++j) {
      const Vec2 x = f.from_h(-0.8 + 1.6 * i / 9, -0.8 + 1.6 * j / 9);
      EXPECT_EQ(lemma42_delta(f, 0.1, 1, 1, x).value, 0);
    }
}

TEST(ZeroSet, EmptyAndSegment) {
  HFrame f(pi / 3, 2 * pi / 3);
  auto z = lemma41_zero_set(f, 1, 1, 1);
  EXPECT_TRUE(z.degenerate);
  EXPECT_EQ(z.region.area(), 0);
  z = lemma41_zero_set(f, 1, 2, 0.5);
  EXPECT_TRUE(z.degenerate);
  EXPECT_NEAR(z.ext_alpha, 1.5, 1e-15);
  EXPECT_EQ(z.ext_beta, 0);
  EXPECT_EQ(lemma42_delta(f, 1, 2, 0.5, f.from_h(1.2, 0)).value, 0);
  EXPECT_GT(lemma42_delta(f, 1, 2, 0.5, f.from_h(1.2, 0.05)).value, 0);
  EXPECT_GT(lemma42_delta(f, 1, 2, 0.5, f.from_h(1.2, -0.05)).value, 0);
}

TEST(Spread, Values) {
  EXPECT_EQ(spread({0}), 0);
  EXPECT_EQ(spread({0, 3, -1}), 4);
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> U(-10, 10);
  for (int r = 0; r < 100; ++r) {
    std::vector<double> v(1 + r % 9);
    for (auto& x : v) x = U(g);
    double best = 0;
    for (double a : v)
      for (double b : v) best = std::max(best, std::abs(a - b));
    EXPECT_EQ(spread(v), best);
  }
}

TEST(TranslateUnion, MatchesOracle) {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int r = 0; r < 200; ++r) {
    const double t1 = 0.3, t2 = 1.9, r1 = 0.8, r2 = 0.5;
    std::vector<Vec2> c{{0, 0}};
    std::vector<Parallelogram> ps{{{0, 0}, t1, t2, r1, r2}};
    for (int k = 0; k < 1 + r % 4; ++k) {
      c.push_back({U(g), U(g)});
      ps.push_back(ps[0].translated(c.back()));
    }
    EXPECT_NEAR(translate_union_area(t1, t2, r1, r2, c), area_union_oracle(ps), 1e-10);
  }
}

TEST(Lemma31, Trivial) {
  HFrame f(0.6, 2.0);
  auto b = lemma31_bounds(f, 1, 1, {{0, 0}});
  EXPECT_EQ(b.upper, 0);
  EXPECT_EQ(b.lower_connected, 0);
  EXPECT_EQ(b.lower2_connected, 0);
}

TEST(Lemma31, PureAlphaTranslationIsTight) {
  HFrame f(0.6, 2.0);
  const double Ra = 1.1, Rb = 0.7, t = 0.05;
  std::vector<Vec2> xs{{0, 0}, t * unit(0.6)};
  auto b = lemma31_bounds(f, Ra, Rb, xs);
  Parallelogram B{{0, 0}, 0.6, 2.0, Ra, Rb};
  const double exact = area_union_oracle({B, B.translated(xs[1])}) - B.area();
  EXPECT_NEAR(b.upper, exact, 1e-9);
  EXPECT_NEAR(b.upper, b.lower2_connected, 1e-15);
}

TEST(Lemma43, TrivialOrigin) {
  HFrame f(0.6, 2.0);
  for (auto H : {std::array{0.2, 1.0, 1.2}, {1.0, 1.2, 0.8}, {1.0, 0.9, 0.9}}) {
    auto b = lemma43_bounds(f, H[0], H[1], H[2], {{0, 0}}, {{0, 0}});
    EXPECT_NEAR(b.upper, 0, 1e-12);
    EXPECT_NEAR(b.lower, 0, 1e-12);
    auto s = lemma44_shift(f, H[0], H[1], H[2], {{0, 0}}, {{0, 0}}, {0, 0});
    EXPECT_EQ(s.diff.lo, 0);
    EXPECT_EQ(s.diff.hi, 0);
  }
}

TEST(Lemma43, CaseOneSmallAlphaShift) {
  HFrame f(0.6, 2.0);
  const double H0 = 0.2, Ha = 1.0, Hb = 1.2;
  std::vector<Vec2> xs{{0, 0}, 0.01 * unit(0.6)}, ys{{0, 0}};
  auto b = lemma43_bounds(f, H0, Ha, Hb, xs, ys);
  EXPECT_EQ(b.which, Case43::I);
  std::vector<Parallelogram> ps{f.b0a(H0, Ha), f.b0a(H0, Ha, xs[1]), f.b0b(H0, Hb)};
  const double d = (area_union_oracle(ps) - lemma41_area(f, H0, Ha, Hb)) / f.C();
  EXPECT_LE(b.lower - 1e-9, d);
  EXPECT_LE(d, b.upper + 1e-9);
}

TEST(Lemma43, PreconditionReported) {
  HFrame f(0.6, 2.0);
  EXPECT_THROW(lemma43_bounds(f, 0.2, 1.0, 1.2, {{0, 0}, f.from_h(0.7, 0)}, {{0, 0}}), PreconditionFailed);
  EXPECT_THROW(lemma43_bounds(f, 0.2, 1.0, 1.2, {{1, 0}}, {{0, 0}}), PreconditionFailed);
}
