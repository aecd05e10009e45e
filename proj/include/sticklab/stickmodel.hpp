#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <boost/random/poisson_distribution.hpp>

#include "errors.hpp"
#include "geom2d.hpp"
#include "rng.hpp"

namespace sticklab {

struct Mark {
  double angle;  // [0, pi)
  double prob;
  double halflen;
};

struct MarkLaw {
  std::vector<Mark> entries;

  void validate() const {
    if (entries.empty()) throw std::invalid_argument("mark law has no entries");
    double sum = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      if (!(e.angle >= 0 && e.angle < std::numbers::pi)) throw std::invalid_argument("angle outside [0, pi)");
      if (!(e.prob >= 0)) throw std::invalid_argument("negative mark probability");
      if (!(e.halflen > 0)) throw std::invalid_argument("half-length must be positive");
      if (i > 0 && !(e.angle > entries[i - 1].angle))
        throw std::invalid_argument("angles must be strictly increasing");
      sum += e.prob;
    }
    if (std::abs(sum - 1) > 1e-12) throw std::invalid_argument("mark probabilities must sum to 1");
  }

  double rmax() const {
    double r = 0;
    for (const auto& e : entries) r = std::max(r, e.halflen);
    return r;
  }

  template <class G>
  std::uint8_t draw(G& g) const {
    double u = uniform01(g);
    for (std::size_t j = 0; j + 1 < entries.size(); ++j) {
      if (u < entries[j].prob) return std::uint8_t(j);
      u -= entries[j].prob;
    }
    return std::uint8_t(entries.size() - 1);
  }
};

// Two orientations, horizontal first.
inline MarkLaw two_stick_law(double p, double alpha, double R0, double Ra) {
  return {{{0.0, p, R0}, {alpha, 1 - p, Ra}}};
}

struct SimWindow {
  double halfwidth;  // window is [-W, W]^2
};

// W = (m + 2) * max stick length
inline SimWindow auto_window(const MarkLaw& law, int m) { return {(m + 2) * 2 * law.rmax()}; }

// lambda |B^{0,alpha}_{R0,Ra}|
inline double effective_intensity(const MarkLaw& law, double lambda) {
  if (law.entries.size() != 2) throw WrongArity("effective intensity needs exactly two orientations");
  const auto& a = law.entries[0];
  const auto& b = law.entries[1];
  return lambda * 4 * a.halflen * b.halflen * std::sin(b.angle - a.angle);
}

inline double lambda_for_effective(const MarkLaw& law, double eff) {
  return eff / effective_intensity(law, 1.0);
}

struct Configuration {
  std::vector<Stick> sticks;
  std::vector<std::uint8_t> marks;
  std::size_t origin_index = 0;
  std::size_t n_marks = 0;
  SimWindow window{1};
  double rmax = 0;
};

// Square cells of side 2*rmax anchored at the origin and clipped to the
// window. Each cell owns an independent Poisson stream, which lets the lazy
// cluster explorer and the full sampler produce the same sticks.
class CellLattice {
 public:
  static constexpr std::uint32_t origin_cell = 0xFFFFFFFFu;

  CellLattice(const MarkLaw& law, double lambda, SimWindow win)
      : law_(&law), lambda_(lambda), W_(win.halfwidth), s_(2 * law.rmax()) {
    if (!(lambda > 0)) throw std::invalid_argument("intensity must be positive");
    if (!(W_ > 0)) throw std::invalid_argument("window half-width must be positive");
    lo_ = int(std::floor(-W_ / s_));
    hi_ = int(std::ceil(W_ / s_)) - 1;
    if (hi_ - lo_ + 1 > 32000 || lo_ < -16000 || hi_ > 16000)
      throw std::invalid_argument("window too large for the cell lattice");
  }

  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int span() const { return hi_ - lo_ + 1; }
  double cell_size() const { return s_; }
  double halfwidth() const { return W_; }

  int index_of(double v) const { return std::clamp(int(std::floor(v / s_)), lo_, hi_); }

  static std::uint32_t cell_id(int i, int j) {
    return (std::uint32_t(i + 32768) << 16) | std::uint32_t(j + 32768);
  }

  template <class Out>
  void sample_cell(StreamKey key, int i, int j, Out&& out) const {
    const double x0 = std::max(i * s_, -W_), x1 = std::min((i + 1) * s_, W_);
    const double y0 = std::max(j * s_, -W_), y1 = std::min((j + 1) * s_, W_);
    if (!(x1 > x0 && y1 > y0)) return;
    Philox g(key, cell_id(i, j));
    const int n = boost::random::poisson_distribution<int, double>(lambda_ * (x1 - x0) * (y1 - y0))(g);
    for (int k = 0; k < n; ++k) {
      const double x = x0 + (x1 - x0) * uniform01(g);
      const double y = y0 + (y1 - y0) * uniform01(g);
      const std::uint8_t m = law_->draw(g);
      const auto& e = law_->entries[m];
      out(Stick{{x, y}, e.angle, e.halflen}, m);
    }
  }

  template <class Out>
  void origin_stick(StreamKey key, Out&& out) const {
    Philox g(key, origin_cell);
    const std::uint8_t m = law_->draw(g);
    const auto& e = law_->entries[m];
    out(Stick{{0, 0}, e.angle, e.halflen}, m);
  }

 private:
  const MarkLaw* law_;
  double lambda_, W_, s_;
  int lo_, hi_;
};

// Poisson process on the window plus a Palm stick at the origin.
inline Configuration sample_configuration(const MarkLaw& law, double lambda, SimWindow win, StreamKey key) {
  law.validate();
  CellLattice lat(law, lambda, win);
  Configuration cfg;
  cfg.n_marks = law.entries.size();
  cfg.window = win;
  cfg.rmax = law.rmax();
  auto push = [&](const Stick& s, std::uint8_t m) {
    cfg.sticks.push_back(s);
    cfg.marks.push_back(m);
  };
  lat.origin_stick(key, push);
  for (int i = lat.lo(); i <= lat.hi(); ++i)
    for (int j = lat.lo(); j <= lat.hi(); ++j) lat.sample_cell(key, i, j, push);
  return cfg;
}

inline Configuration sample_configuration(const MarkLaw& law, double lambda, SimWindow win, std::uint64_t seed) {
  return sample_configuration(law, lambda, win, child(seed, 0));
}

}  // namespace sticklab
