#pragma once

// Area of a union of convex polygons by vertical slab decomposition.
// Breakpoints are all vertex abscissae and all pairwise edge crossings; inside
// a slab every boundary is linear, so the union length at the slab midline
// times the slab width is exact.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"
#include "geom2d.hpp"
#include "rng.hpp"

namespace sticklab {

struct Polygon {
  std::vector<Vec2> vertices;  // counterclockwise, convex

  double area() const {
    double a = 0;
    for (std::size_t i = 0, n = vertices.size(); i < n; ++i)
      a += cross(vertices[i], vertices[(i + 1) % n]);
    return 0.5 * a;
  }
};

inline Polygon to_polygon(const Parallelogram& p) {
  const auto v = p.vertices();
  return {{v.begin(), v.end()}};
}

struct OracleOptions {
  double eps = 1e-12;          // relative breakpoint separation below which we go exact
  bool exact_fallback = true;  // otherwise NumericalDegeneracy
};

struct OracleResult {
  double area = 0;
  bool exact = false;  // rational path was taken
};

namespace detail {

template <class S>
struct P2 {
  S x, y;
};

template <class S>
using Poly = std::vector<P2<S>>;

template <class S>
S slab_union_area(const std::vector<Poly<S>>& polys, std::vector<S>& xs) {
  struct Edge {
    P2<S> a, b;
    std::size_t owner;
  };
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < polys.size(); ++k)
    for (std::size_t i = 0; i < polys[k].size(); ++i)
      edges.push_back({polys[k][i], polys[k][(i + 1) % polys[k].size()], k});

  xs.clear();
  for (const auto& e : edges) xs.push_back(e.a.x);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      // edges of one convex polygon meet only at its vertices
      if (edges[i].owner == edges[j].owner) continue;
      const S rx = edges[i].b.x - edges[i].a.x, ry = edges[i].b.y - edges[i].a.y;
      const S sx = edges[j].b.x - edges[j].a.x, sy = edges[j].b.y - edges[j].a.y;
      const S den = rx * sy - ry * sx;
      if (den == S(0)) continue;
      const S qx = edges[j].a.x - edges[i].a.x, qy = edges[j].a.y - edges[i].a.y;
      const S t = (qx * sy - qy * sx) / den;
      const S u = (qx * ry - qy * rx) / den;
      // extra breakpoints are harmless, so the double path may be generous
      const S lo = S(-1e-9), hi = S(1) + S(1e-9);
      if (t >= lo && t <= hi && u >= lo && u <= hi) xs.push_back(edges[i].a.x + t * rx);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  S total = S(0);
  std::vector<std::pair<S, S>> iv;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const S x0 = xs[k], x1 = xs[k + 1];
    const S xm = (x0 + x1) / S(2);
    if (!(xm > x0 && xm < x1)) continue;
    iv.clear();
    for (const auto& poly : polys) {
      bool hit = false;
      S lo = S(0), hi = S(0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        if (!((a.x < xm && xm < b.x) || (b.x < xm && xm < a.x))) continue;
        const S y = a.y + (xm - a.x) * (b.y - a.y) / (b.x - a.x);
        if (!hit) {
          lo = hi = y;
          hit = true;
        } else {
          lo = std::min(lo, y);
          hi = std::max(hi, y);
        }
      }
      if (hit) iv.emplace_back(lo, hi);
    }
    if (iv.empty()) continue;
    std::sort(iv.begin(), iv.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
    S len = S(0), cur_lo = iv[0].first, cur_hi = iv[0].second;
    for (std::size_t i = 1; i < iv.size(); ++i) {
      if (iv[i].first > cur_hi) {
        len += cur_hi - cur_lo;
        cur_lo = iv[i].first;
        cur_hi = iv[i].second;
      } else if (iv[i].second > cur_hi) {
        cur_hi = iv[i].second;
      }
    }
    len += cur_hi - cur_lo;
    total += (x1 - x0) * len;
  }
  return total;
}

inline bool near_degenerate(const std::vector<double>& xs, double eps) {
  if (xs.size() < 2) return false;
  const double scale = std::max(std::abs(xs.front()), std::abs(xs.back())) + (xs.back() - xs.front());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double g = xs[i + 1] - xs[i];
    if (g > 0 && g < eps * scale) return true;
  }
  return false;
}

}  // namespace detail

inline OracleResult area_union_oracle_ex(const std::vector<Polygon>& ps, OracleOptions opt = {}) {
  if (ps.empty()) throw std::invalid_argument("empty polygon list");
  std::vector<detail::Poly<double>> pd;
  for (const auto& p : ps) {
    detail::Poly<double> q;
    for (const auto& v : p.vertices) {
      if (!finite(v)) throw NumericalDegeneracy("non-finite vertex");
      q.push_back({v.x, v.y});
    }
    pd.push_back(std::move(q));
  }
  std::vector<double> xs;
  const double a = detail::slab_union_area(pd, xs);
  if (!detail::near_degenerate(xs, opt.eps)) return {a, false};
  if (!opt.exact_fallback)
    throw NumericalDegeneracy("breakpoints closer than the geometric tolerance");

  using R = boost::multiprecision::cpp_rational;
  std::vector<detail::Poly<R>> pr;
  for (const auto& p : pd) {
    detail::Poly<R> q;
    for (const auto& v : p) q.push_back({R(v.x), R(v.y)});
    pr.push_back(std::move(q));
  }
  std::vector<R> xr;
  return {static_cast<double>(detail::slab_union_area(pr, xr)), true};
}

inline double area_union_oracle(const std::vector<Parallelogram>& ps, OracleOptions opt = {}) {
  std::vector<Polygon> polys;
  for (const auto& p : ps)
    if (!p.degenerate()) polys.push_back(to_polygon(p));
  if (ps.empty()) throw std::invalid_argument("empty parallelogram list");
  if (polys.empty()) return 0.0;
  return area_union_oracle_ex(polys, opt).area;
}

struct McEstimate {
  double estimate, stderr_;
};

// Hit-or-miss over the joint bounding box.
inline McEstimate area_union_mc(const std::vector<Parallelogram>& ps, std::uint64_t n,
                                std::uint64_t seed) {
  if (n < 1000) throw std::invalid_argument("area_union_mc needs n >= 1000");
  if (ps.empty()) throw std::invalid_argument("empty parallelogram list");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& p : ps)
    for (const auto& v : p.vertices()) {
      x0 = std::min(x0, v.x);
      x1 = std::max(x1, v.x);
      y0 = std::min(y0, v.y);
      y1 = std::max(y1, v.y);
    }
  const double box = (x1 - x0) * (y1 - y0);
  Philox g(child(seed, 0), 0);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const Vec2 pt{x0 + (x1 - x0) * uniform01(g), y0 + (y1 - y0) * uniform01(g)};
    for (const auto& p : ps)
      if (p.contains(pt)) {
        ++hits;
        break;
      }
  }
  const double f = double(hits) / double(n);
  return {box * f, box * std::sqrt(f * (1 - f) / double(n))};
}

}  // namespace sticklab
