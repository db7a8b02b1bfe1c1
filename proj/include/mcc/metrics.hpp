#pragma once

// Partition comparison (variation of information and its two conditional
// entropies), cluster-size statistics and cross-clustering overlap.
// All entropies are in nats.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mcc/error.hpp"
#include "mcc/partition.hpp"

namespace mcc {

namespace detail {

struct JointCell {
  ClusterId a, b;
  std::size_t count;
};

/// Non-empty cells of the contingency table between a and b.
inline std::vector<JointCell> contingency(const Partition& a, const Partition& b) {
  require_same_universe(a, b);
  std::unordered_map<std::uint64_t, std::size_t> counts;
  for (std::size_t i = 0; i < a.n(); ++i) {
    ++counts[(std::uint64_t{a[i]} << 32) | b[i]];
  }
  std::vector<JointCell> cells;
  cells.reserve(counts.size());
  for (const auto& [key, c] : counts) {
    cells.push_back({static_cast<ClusterId>(key >> 32), static_cast<ClusterId>(key & 0xffffffffu), c});
  }
  return cells;
}

/// H(Y|X) from the contingency cells; `x_of` picks the conditioning axis.
/// Terms are summed in sorted order so the result does not depend on the
/// hash-table iteration order or on which argument came first.
template <class XOf>
double conditional_entropy(const std::vector<JointCell>& cells, const std::vector<std::size_t>& x_sizes,
                           std::size_t n, XOf x_of) {
  std::vector<double> terms;
  terms.reserve(cells.size());
  const auto total = static_cast<double>(n);
  for (const auto& cell : cells) {
    const auto joint = static_cast<double>(cell.count);
    const auto marginal = static_cast<double>(x_sizes[x_of(cell)]);
    // 0 ln 0 = 0: empty cells never appear, and count == marginal gives ln 1 = 0.
    if (cell.count == x_sizes[x_of(cell)]) continue;
    terms.push_back(-(joint / total) * std::log(joint / marginal));
  }
  std::sort(terms.begin(), terms.end());
  double h = 0.0;
  for (double t : terms) h += t;
  return h;
}

}  // namespace detail

/// H(Y|X) in nats, estimated from co-occurrence counts over the shared items.
inline double conditional_entropy(const Partition& y, const Partition& x) {
  const auto cells = detail::contingency(y, x);
  return detail::conditional_entropy(cells, x.sizes(), x.n(), [](const detail::JointCell& c) { return c.b; });
}

struct VIReport {
  double vi = 0.0;
  double h_c_given_cprime = 0.0;
  double h_cprime_given_c = 0.0;
  std::size_t n = 0;
};

/// VI(C, C') = H(C|C') + H(C'|C).
inline VIReport variation_of_information(const Partition& c, const Partition& cprime) {
  const auto cells = detail::contingency(c, cprime);
  VIReport r;
  r.n = c.n();
  r.h_c_given_cprime = detail::conditional_entropy(cells, cprime.sizes(), r.n, [](const detail::JointCell& x) { return x.b; });
  r.h_cprime_given_c = detail::conditional_entropy(cells, c.sizes(), r.n, [](const detail::JointCell& x) { return x.a; });
  r.vi = r.h_c_given_cprime + r.h_cprime_given_c;
  return r;
}

struct NamedPartition {
  std::string name;
  Partition partition;
};

/// Symmetric matrix of pairwise VI values with a zero diagonal.
inline std::vector<std::vector<double>> vi_matrix(const std::vector<NamedPartition>& parts, unsigned threads = 1) {
  const std::size_t m = parts.size();
  for (std::size_t i = 1; i < m; ++i) {
    if (parts[i].partition.n() != parts[0].partition.n()) {
      throw InputError("partition '" + parts[i].name + "' covers " + std::to_string(parts[i].partition.n()) +
                       " items, '" + parts[0].name + "' covers " + std::to_string(parts[0].partition.n()));
    }
  }
  std::vector<std::vector<double>> out(m, std::vector<double>(m, 0.0));
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) jobs.emplace_back(i, j);
  }
  auto run = [&](std::size_t worker, std::size_t workers) {
    for (std::size_t k = worker; k < jobs.size(); k += workers) {
      const auto [i, j] = jobs[k];
      out[i][j] = out[j][i] = variation_of_information(parts[i].partition, parts[j].partition).vi;
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, jobs.size()));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  }
  return out;
}

inline void write_vi_matrix(std::ostream& out, const std::vector<NamedPartition>& parts,
                            const std::vector<std::vector<double>>& vi) {
  out.precision(12);
  out << "name";
  for (const auto& p : parts) out << ',' << p.name;
  out << '\n';
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out << parts[i].name;
    for (double v : vi[i]) out << ',' << v;
    out << '\n';
  }
}

inline void save_vi_matrix(const std::filesystem::path& path, const std::vector<NamedPartition>& parts,
                           const std::vector<std::vector<double>>& vi) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_vi_matrix(out, parts, vi);
}

struct ClusterStats {
  std::size_t num_clusters = 0;
  std::size_t min_size = 0;
  double median_size = 0.0;
  double mean_size = 0.0;
  std::size_t max_size = 0;
  double pct_size_one = 0.0;  // fraction of clusters with exactly one member
};

inline ClusterStats cluster_stats(const Partition& p) {
  ClusterStats s;
  auto sizes = p.sizes();
  if (sizes.empty()) return s;
  std::sort(sizes.begin(), sizes.end());
  const std::size_t k = sizes.size();
  s.num_clusters = k;
  s.min_size = sizes.front();
  s.max_size = sizes.back();
  s.median_size = k % 2 ? static_cast<double>(sizes[k / 2])
                        : (static_cast<double>(sizes[k / 2 - 1]) + static_cast<double>(sizes[k / 2])) / 2.0;
  s.mean_size = static_cast<double>(p.n()) / static_cast<double>(k);
  s.pct_size_one = static_cast<double>(std::count(sizes.begin(), sizes.end(), std::size_t{1})) / static_cast<double>(k);
  return s;
}

struct OverlapPair {
  ClusterId cluster_p1 = 0;
  ClusterId cluster_p2 = 0;
  std::size_t intersection = 0;
  double jaccard = 0.0;
  double containment = 0.0;  // |A ∩ B| / |A|, A from p1
};

struct OverlapReport {
  std::vector<OverlapPair> pairs;      // every pair with a non-empty intersection, sorted by (p1, p2)
  OverlapPair best;                    // maximum Jaccard; ties go to the smaller (p1, p2)
  std::vector<OverlapPair> contained;  // pairs with containment >= threshold
  double threshold = 1.0;
};

inline OverlapReport overlap_analysis(const Partition& p1, const Partition& p2, double containment_threshold) {
  if (!(containment_threshold > 0.0 && containment_threshold <= 1.0)) {
    throw InputError("containment threshold must lie in (0, 1], got " + std::to_string(containment_threshold));
  }
  auto cells = detail::contingency(p1, p2);
  std::sort(cells.begin(), cells.end(), [](const auto& x, const auto& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
  const auto s1 = p1.sizes();
  const auto s2 = p2.sizes();

  OverlapReport r;
  r.threshold = containment_threshold;
  for (const auto& c : cells) {
    OverlapPair o;
    o.cluster_p1 = c.a;
    o.cluster_p2 = c.b;
    o.intersection = c.count;
    o.jaccard = static_cast<double>(c.count) / static_cast<double>(s1[c.a] + s2[c.b] - c.count);
    o.containment = static_cast<double>(c.count) / static_cast<double>(s1[c.a]);
    if (r.pairs.empty() || o.jaccard > r.best.jaccard) r.best = o;
    if (o.containment >= containment_threshold) r.contained.push_back(o);
    r.pairs.push_back(o);
  }
  return r;
}

inline void save_overlap_csv(const std::filesystem::path& path, const OverlapReport& r) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(12);
  out << "cluster_p1,cluster_p2,intersection,jaccard,containment_p1_in_p2\n";
  for (const auto& o : r.pairs) {
    out << o.cluster_p1 << ',' << o.cluster_p2 << ',' << o.intersection << ',' << o.jaccard << ',' << o.containment << '\n';
  }
}

}  // namespace mcc
