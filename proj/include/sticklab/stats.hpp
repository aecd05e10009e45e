#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "asymptotics.hpp"
#include "clusters.hpp"

namespace sticklab {

struct ChiSquare {
  double stat = 0;
  int dof = 0;
  double p_value = 1;
};

// Homogeneity test on a samples x categories table; empty categories dropped.
inline ChiSquare chi2_homogeneity(const std::vector<std::map<Composition, std::uint64_t>>& samples) {
  std::set<Composition> cats;
  std::vector<double> rows(samples.size(), 0);
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (const auto& [c, n] : samples[i]) {
      if (n == 0) continue;
      cats.insert(c);
      rows[i] += double(n);
    }
  double total = 0;
  std::map<Composition, double> cols;
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (const auto& [c, n] : samples[i]) {
      cols[c] += double(n);
      total += double(n);
    }
  int nonempty_rows = 0;
  for (double r : rows) nonempty_rows += r > 0;
  ChiSquare out;
  out.dof = (nonempty_rows - 1) * (int(cats.size()) - 1);
  if (out.dof <= 0) return out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (rows[i] == 0) continue;
    for (const auto& c : cats) {
      auto it = samples[i].find(c);
      const double o = it == samples[i].end() ? 0.0 : double(it->second);
      const double e = rows[i] * cols[c] / total;
      out.stat += (o - e) * (o - e) / e;
    }
  }
  out.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(out.dof), out.stat));
  return out;
}

// Total variation between an empirical two-orientation histogram and the
// limit law p_m.
inline double tv_to_limit(const Histogram& h, double p, int m) {
  double tv = 0;
  for (const auto& e : p_m_limit(p, 1 - p, m)) tv += std::abs(h.pmf({e.k, e.l}) - e.prob);
  return tv / 2;
}

}  // namespace sticklab
