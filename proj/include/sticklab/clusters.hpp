#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "geom2d.hpp"
#include "parallel.hpp"
#include "stickmodel.hpp"

namespace sticklab {

struct BBox {
  double xmin = INFINITY, ymin = INFINITY, xmax = -INFINITY, ymax = -INFINITY;

  void add(Vec2 p) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  void add(const Stick& s) {
    add(s.p());
    add(s.q());
  }
};

using Composition = std::vector<int>;

struct ClusterSummary {
  Composition composition;
  int m = 0;
  bool censored = false;
  bool truncated = false;  // exploration stopped once m exceeded the cap
  BBox extent;
  std::vector<std::size_t> members;
};

// Censored when the extent leaves [-W + 2 rmax, W - 2 rmax]^2.
inline bool censored_extent(const BBox& b, double W, double rmax) {
  const double lim = W - 2 * rmax;
  return b.xmin < -lim || b.ymin < -lim || b.xmax > lim || b.ymax > lim;
}

class SpatialGrid {
 public:
  SpatialGrid(const std::vector<Stick>& sticks, double cell) : cell_(cell) {
    double r = 0;
    for (const auto& s : sticks) r = std::max(r, s.halflen);
    if (cell_ < 2 * r) throw std::invalid_argument("grid cell smaller than a stick length");
    for (std::size_t i = 0; i < sticks.size(); ++i) map_[key(sticks[i].center)].push_back(i);
  }

  double cell_size() const { return cell_; }

  template <class F>
  void for_neighbors(Vec2 c, F&& f) const {
    const auto [ci, cj] = index(c);
    for (std::int64_t di = -1; di <= 1; ++di)
      for (std::int64_t dj = -1; dj <= 1; ++dj) {
        auto it = map_.find(pack(ci + di, cj + dj));
        if (it == map_.end()) continue;
        for (auto k : it->second) f(k);
      }
  }

 private:
  std::pair<std::int64_t, std::int64_t> index(Vec2 c) const {
    return {std::int64_t(std::floor(c.x / cell_)), std::int64_t(std::floor(c.y / cell_))};
  }
  static std::int64_t pack(std::int64_t i, std::int64_t j) { return (i << 32) ^ (j & 0xFFFFFFFF); }
  std::int64_t key(Vec2 c) const {
    const auto [i, j] = index(c);
    return pack(i, j);
  }

  double cell_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> map_;
};

inline ClusterSummary summarize(const Configuration& cfg, std::vector<std::size_t> members) {
  ClusterSummary s;
  s.composition.assign(cfg.n_marks, 0);
  std::sort(members.begin(), members.end());
  for (auto k : members) {
    ++s.composition[cfg.marks[k]];
    s.extent.add(cfg.sticks[k]);
  }
  s.m = int(members.size());
  s.members = std::move(members);
  s.censored = censored_extent(s.extent, cfg.window.halfwidth, cfg.rmax);
  return s;
}

inline ClusterSummary origin_cluster(const Configuration& cfg) {
  double r = cfg.rmax;
  for (const auto& s : cfg.sticks) r = std::max(r, s.halflen);
  SpatialGrid grid(cfg.sticks, 2 * r);
  std::vector<char> seen(cfg.sticks.size(), 0);
  std::vector<std::size_t> queue{cfg.origin_index};
  seen[cfg.origin_index] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Stick& s = cfg.sticks[queue[head]];
    grid.for_neighbors(s.center, [&](std::size_t k) {
      if (!seen[k] && sticks_intersect(s, cfg.sticks[k])) {
        seen[k] = 1;
        queue.push_back(k);
      }
    });
  }
  return summarize(cfg, std::move(queue));
}

// Generates only the cells around cluster members, stopping once the cluster
// exceeds the cap. Produces the same sticks as sample_configuration.
class ClusterExplorer {
 public:
  ClusterExplorer(const MarkLaw& law, double lambda, SimWindow win)
      : law_(law), lat_(law_, lambda, win), rmax_(law.rmax()) {
    law_.validate();
    const auto n = std::size_t(lat_.span()) * std::size_t(lat_.span());
    stamp_.assign(n, 0);
    begin_.assign(n, 0);
    end_.assign(n, 0);
  }
  ClusterExplorer(const ClusterExplorer&) = delete;
  ClusterExplorer& operator=(const ClusterExplorer&) = delete;

  struct Result {
    ClusterSummary summary;
    std::vector<Stick> sticks;    // members, origin first
    std::vector<std::uint8_t> marks;
  };

  Result explore(StreamKey key, int cap = 1 << 30) {
    if (++gen_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      gen_ = 1;
    }
    key_ = key;
    sticks_.clear();
    marks_.clear();
    seen_.clear();
    lat_.origin_stick(key, [&](const Stick& s, std::uint8_t m) {
      sticks_.push_back(s);
      marks_.push_back(m);
      seen_.push_back(1);
    });
    std::vector<std::size_t> queue{0};
    bool truncated = false;
    for (std::size_t head = 0; head < queue.size() && !truncated; ++head) {
      const Stick s = sticks_[queue[head]];
      const int ci = lat_.index_of(s.center.x), cj = lat_.index_of(s.center.y);
      for (int i = std::max(ci - 1, lat_.lo()); i <= std::min(ci + 1, lat_.hi()) && !truncated; ++i)
        for (int j = std::max(cj - 1, lat_.lo()); j <= std::min(cj + 1, lat_.hi()) && !truncated; ++j) {
          const std::size_t c = cell(i, j);
          for (std::size_t k = begin_[c]; k < end_[c]; ++k) {
            if (seen_[k] || !sticks_intersect(s, sticks_[k])) continue;
            seen_[k] = 1;
            queue.push_back(k);
            if (int(queue.size()) > cap) {
              truncated = true;
              break;
            }
          }
        }
    }
    Result r;
    auto& sum = r.summary;
    sum.composition.assign(law_.entries.size(), 0);
    for (auto k : queue) {
      ++sum.composition[marks_[k]];
      sum.extent.add(sticks_[k]);
      r.sticks.push_back(sticks_[k]);
      r.marks.push_back(marks_[k]);
    }
    sum.m = int(queue.size());
    sum.truncated = truncated;
    sum.censored = censored_extent(sum.extent, lat_.halfwidth(), rmax_);
    sum.members = std::move(queue);
    return r;
  }

 private:
  std::size_t cell(int i, int j) {
    const std::size_t c = std::size_t(i - lat_.lo()) * std::size_t(lat_.span()) + std::size_t(j - lat_.lo());
    if (stamp_[c] != gen_) {
      stamp_[c] = gen_;
      begin_[c] = sticks_.size();
      lat_.sample_cell(key_, i, j, [&](const Stick& s, std::uint8_t m) {
        sticks_.push_back(s);
        marks_.push_back(m);
        seen_.push_back(0);
      });
      end_[c] = sticks_.size();
    }
    return c;
  }

  MarkLaw law_;
  CellLattice lat_;
  double rmax_;
  StreamKey key_{};
  std::uint32_t gen_ = 0;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::size_t> begin_, end_;
  std::vector<Stick> sticks_;
  std::vector<std::uint8_t> marks_;
  std::vector<char> seen_;
};

struct Interval95 {
  double lo, hi;
};

inline Interval95 wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054) {
  if (n == 0) return {0, 1};
  const double p = double(k) / double(n), nn = double(n), z2 = z * z;
  const double den = 1 + z2 / nn;
  const double mid = (p + z2 / (2 * nn)) / den;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / den;
  return {std::max(0.0, mid - half), std::min(1.0, mid + half)};
}

struct Histogram {
  std::map<Composition, std::uint64_t> counts;  // finite clusters with m == target
  std::uint64_t finite_hits = 0;
  std::uint64_t replicates = 0;
  std::uint64_t censored = 0;   // m == target but touching the margin
  std::uint64_t oversize = 0;   // m > target

  void merge(const Histogram& o) {
    for (const auto& [k, v] : o.counts) counts[k] += v;
    finite_hits += o.finite_hits;
    replicates += o.replicates;
    censored += o.censored;
    oversize += o.oversize;
  }

  double pmf(const Composition& c) const {
    auto it = counts.find(c);
    return finite_hits == 0 || it == counts.end() ? 0.0 : double(it->second) / double(finite_hits);
  }
  Interval95 ci(const Composition& c) const {
    auto it = counts.find(c);
    return wilson_interval(it == counts.end() ? 0 : it->second, finite_hits);
  }
};

struct HistogramRequest {
  MarkLaw law;
  double lambda;
  SimWindow window;
  int m_target;
  std::uint64_t first_replicate = 0;
  std::uint64_t n_replicates;
  std::uint64_t seed;
  unsigned workers = 1;
};

inline Histogram composition_histogram(const HistogramRequest& rq) {
  if (rq.m_target < 1) throw std::invalid_argument("m_target must be positive");
  rq.law.validate();
  return run_chunked<Histogram>(
      rq.n_replicates, rq.workers,
      [&](std::uint64_t b, std::uint64_t e, Histogram& h) {
        ClusterExplorer ex(rq.law, rq.lambda, rq.window);
        for (std::uint64_t i = b; i < e; ++i) {
          const auto r = ex.explore(child(rq.seed, rq.first_replicate + i), rq.m_target);
          ++h.replicates;
          const auto& s = r.summary;
          if (s.truncated || s.m > rq.m_target) {
            ++h.oversize;
          } else if (s.m == rq.m_target) {
            if (s.censored) {
              ++h.censored;
            } else {
              ++h.counts[s.composition];
              ++h.finite_hits;
            }
          }
        }
      },
      [](Histogram& a, const Histogram& b) { a.merge(b); });
}

inline Histogram composition_histogram(const MarkLaw& law, double lambda, SimWindow win, int m_target,
                                       std::uint64_t n_replicates, std::uint64_t seed, unsigned workers = 1) {
  return composition_histogram(HistogramRequest{law, lambda, win, m_target, 0, n_replicates, seed, workers});
}

// Runs fixed-size batches until min_hits finite clusters are seen or the
// replicate budget is spent. Batch boundaries do not depend on worker count.
inline Histogram histogram_until(HistogramRequest rq, std::uint64_t min_hits, std::uint64_t batch,
                                 std::uint64_t max_replicates) {
  Histogram h;
  const std::uint64_t base = rq.first_replicate;
  while (h.finite_hits < min_hits && h.replicates < max_replicates) {
    rq.first_replicate = base + h.replicates;
    rq.n_replicates = std::min(batch, max_replicates - h.replicates);
    h.merge(composition_histogram(rq));
  }
  return h;
}

}  // namespace sticklab
