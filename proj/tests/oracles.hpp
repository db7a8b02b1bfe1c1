#pragma once

// Test-only reference implementations. They deliberately take different
// routes from the library: recursive set-partition generation instead of
// restricted growth strings, dense matrices instead of triangles and hash
// tables.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "mcc/graphbuild.hpp"
#include "mcc/partition.hpp"

namespace oracle {

using Blocks = std::vector<std::vector<std::size_t>>;

/// Every set partition of {0..n-1}: element k joins an existing block or opens a new one.
inline void all_partitions(std::size_t n, const std::function<void(const Blocks&)>& visit) {
  Blocks blocks;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == n) {
      visit(blocks);
      return;
    }
    for (auto& b : blocks) {
      b.push_back(k);
      rec(k + 1);
      b.pop_back();
    }
    blocks.push_back({k});
    rec(k + 1);
    blocks.pop_back();
  };
  rec(0);
}

inline std::vector<std::vector<double>> dense(const mcc::SimilarityGraph& g) {
  std::vector<std::vector<double>> m(g.n(), std::vector<double>(g.n(), 0.0));
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = 0; j < g.n(); ++j)
      if (i != j) m[i][j] = g.w(i, j);
  return m;
}

/// Half the sum over ordered pairs in different blocks.
inline double cost(const std::vector<std::vector<double>>& w, const std::vector<std::size_t>& label) {
  double twice = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j)
      if (label[i] != label[j]) twice += w[i][j];
  return twice / 2.0;
}

inline std::vector<std::size_t> labels_of(const Blocks& blocks, std::size_t n) {
  std::vector<std::size_t> label(n);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (auto v : blocks[b]) label[v] = b;
  return label;
}

inline double min_cost(const mcc::SimilarityGraph& g) {
  const auto w = dense(g);
  double best = INFINITY;
  all_partitions(g.n(), [&](const Blocks& b) { best = std::min(best, cost(w, labels_of(b, g.n()))); });
  return best;
}

/// H(Y|X) from a dense contingency table.
inline double conditional_entropy(const std::vector<std::uint32_t>& y, const std::vector<std::uint32_t>& x) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
  std::map<std::uint32_t, double> px;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    joint[{x[i], y[i]}] += 1.0 / n;
    px[x[i]] += 1.0 / n;
  }
  double h = 0.0;
  for (const auto& [key, p] : joint) h -= p * std::log(p / px[key.first]);
  return h;
}

inline mcc::SimilarityGraph random_graph(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> w(mcc::pair_count(n));
  for (auto& x : w) x = u(rng);
  return mcc::SimilarityGraph(n, std::move(w));
}

inline mcc::Partition random_partition(std::mt19937_64& rng, std::size_t n, std::size_t max_k) {
  std::uniform_int_distribution<std::uint32_t> u(0, static_cast<std::uint32_t>(max_k - 1));
  std::vector<std::uint32_t> raw(n);
  for (auto& r : raw) r = u(rng);
  return mcc::Partition::from_labels(raw);
}

}  // namespace oracle
