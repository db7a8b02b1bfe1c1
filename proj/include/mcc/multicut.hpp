#pragma once

// Minimum cost multicut on a complete weighted graph.
//
// A solution is a Partition; an edge is cut when its endpoints lie in
// different clusters, and the cost is the summed weight of cut edges.
// Representing solutions as partitions makes every labeling consistent with
// the cycle constraints by construction.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mcc/error.hpp"
#include "mcc/graphbuild.hpp"
#include "mcc/partition.hpp"

namespace mcc {

enum class SolverKind { gaec, gaec_kl, exact };

inline std::string_view to_string(SolverKind s) noexcept {
  switch (s) {
    case SolverKind::gaec: return "gaec";
    case SolverKind::gaec_kl: return "gaec-kl";
    case SolverKind::exact: return "exact";
  }
  return "?";
}

/// Heuristic modes accepted by solve(); `exact` is only reachable via solve_exact().
inline SolverKind parse_solver_mode(std::string_view s) {
  if (s == "gaec") return SolverKind::gaec;
  if (s == "gaec-kl") return SolverKind::gaec_kl;
  throw InputError("solver must be 'gaec' or 'gaec-kl', got '" + std::string(s) + "'");
}

struct SolveReport {
  Partition partition;
  double cost = 0.0;
  SolverKind solver = SolverKind::gaec;
  std::size_t iterations = 0;  // KLj sweeps; 0 for gaec and exact
  double runtime_ms = 0.0;
  std::optional<double> cal;
};

inline double cut_cost(const SimilarityGraph& g, std::span<const ClusterId> assignment) {
  const std::size_t n = g.n();
  const auto w = g.weights();
  double total = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      if (assignment[i] != assignment[j]) total += w[k];
    }
  }
  return total;
}

/// Sum of the weights of edges whose endpoints lie in different clusters.
inline double cost(const SimilarityGraph& g, const Partition& p) {
  if (p.n() != g.n()) {
    throw InputError("partition covers " + std::to_string(p.n()) + " nodes, graph has " + std::to_string(g.n()));
  }
  return cut_cost(g, p.assignment());
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

inline void check_tracked_cost(double tracked, double actual, std::string_view who) {
  const double tol = 1e-6 * std::max(1.0, std::abs(actual));
  ensure(std::abs(tracked - actual) <= tol,
         std::string(who) + ": tracked cost " + std::to_string(tracked) + " disagrees with recomputed " +
             std::to_string(actual));
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::uint32_t{0}); }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void attach(std::uint32_t child_root, std::uint32_t root) { parent_[child_root] = root; }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace detail

/// Greedy additive edge contraction.
///
/// Starts from singletons and keeps contracting the heaviest inter-cluster
/// edge while its weight is >= 0. Parallel edges created by a contraction are
/// summed. Each cluster is represented by its smallest node index; equal
/// weights are broken towards the lexicographically smaller representative
/// pair. Heap entries carry per-cluster version stamps and are dropped lazily
/// once either endpoint has changed.
inline SolveReport solve_gaec(const SimilarityGraph& g) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = g.n();

  struct Entry {
    double w;
    std::uint32_t a, b;  // representatives, a < b
    std::uint32_t va, vb;
  };
  const auto lower_priority = [](const Entry& x, const Entry& y) {
    if (x.w != y.w) return x.w < y.w;
    if (x.a != y.a) return x.a > y.a;
    return x.b > y.b;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> heap(lower_priority);

  std::vector<std::unordered_map<std::uint32_t, double>> adj(n);
  std::vector<std::uint32_t> version(n, 0);
  std::vector<bool> alive(n, true);
  detail::UnionFind uf(n);

  double tracked = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const double w = g.w(i, j);
      adj[i][j] = w;
      adj[j][i] = w;
      tracked += w;
      heap.push({w, i, j, 0, 0});
    }
  }

  while (!heap.empty()) {
    const Entry top = heap.top();
    if (!alive[top.a] || !alive[top.b] || version[top.a] != top.va || version[top.b] != top.vb) {
      heap.pop();
      continue;
    }
    if (top.w < 0.0) break;
    heap.pop();
    ensure(top.w >= 0.0, "gaec: attempted to contract a negative edge");

    const std::uint32_t keep = top.a;
    const std::uint32_t gone = top.b;
    tracked -= top.w;
    alive[gone] = false;
    uf.attach(gone, keep);
    adj[keep].erase(gone);
    for (const auto& [x, w] : adj[gone]) {
      if (x == keep) continue;
      adj[x].erase(gone);
      const double merged = (adj[keep][x] += w);
      adj[x][keep] = merged;
    }
    adj[gone].clear();
    ++version[keep];
    for (const auto& [x, w] : adj[keep]) {
      heap.push(keep < x ? Entry{w, keep, x, version[keep], version[x]} : Entry{w, x, keep, version[x], version[keep]});
    }
  }

  std::vector<std::uint32_t> roots(n);
  for (std::uint32_t i = 0; i < n; ++i) roots[i] = uf.find(i);
  SolveReport r;
  r.partition = Partition::from_labels(roots);
  r.cost = cost(g, r.partition);
  detail::check_tracked_cost(tracked, r.cost, "gaec");
  r.solver = SolverKind::gaec;
  r.runtime_ms = detail::elapsed_ms(start);
  r.cal = g.cal ? std::optional<double>(g.cal->value()) : std::nullopt;
  return r;
}

struct KljOptions {
  std::size_t max_sweeps = 100;
  // A move is accepted only if it lowers the cost by more than this.
  double min_gain = 1e-10;
  // Called after every accepted move with the current assignment and the
  // incrementally tracked cost.
  std::function<void(std::span<const ClusterId>, double)> on_move;
};

namespace detail {

/// Local-search state for KLj. `sum_[v * stride_ + c]` holds the total weight
/// between node v and the members of cluster slot c (excluding v itself).
class KljState {
 public:
  KljState(const SimilarityGraph& g, const Partition& init) : g_(g), n_(g.n()), label_(init.assignment()) {
    const std::size_t k = init.k();
    members_.resize(k);
    pos_.resize(n_);
    for (std::uint32_t v = 0; v < n_; ++v) {
      pos_[v] = members_[label_[v]].size();
      members_[label_[v]].push_back(v);
    }
    stride_ = std::max<std::size_t>(1, std::min(n_, k + 1));
    sum_.assign(n_ * stride_, 0.0);
    for (std::size_t u = 0; u < n_; ++u) {
      for (std::size_t v = u + 1; v < n_; ++v) {
        const double w = g_.w(u, v);
        sum_[u * stride_ + label_[v]] += w;
        sum_[v * stride_ + label_[u]] += w;
      }
    }
    cost_ = cut_cost(g_, label_);
  }

  std::size_t n() const noexcept { return n_; }
  ClusterId label(std::size_t v) const noexcept { return label_[v]; }
  std::size_t slots() const noexcept { return members_.size(); }
  const std::vector<std::uint32_t>& members(ClusterId c) const noexcept { return members_[c]; }
  double sum(std::size_t v, ClusterId c) const noexcept { return sum_[v * stride_ + c]; }
  double cost() const noexcept { return cost_; }
  std::span<const ClusterId> assignment() const noexcept { return label_; }

  /// Moves v to cluster `to` (or to a fresh cluster when `to` is nullopt) and
  /// invokes `touched` for every member of the source and target clusters.
  template <class Touched>
  void move(std::uint32_t v, std::optional<ClusterId> to, Touched&& touched) {
    const ClusterId from = label_[v];
    const ClusterId target = to ? *to : fresh_slot();
    if (to && members_[target].empty()) std::erase(free_, target);
    const double gain = sum(v, target) - sum(v, from);
    for (std::size_t u = 0; u < n_; ++u) {
      if (u == v) continue;
      const double w = g_.w(u, v);
      sum_[u * stride_ + from] -= w;
      sum_[u * stride_ + target] += w;
    }
    auto& src = members_[from];
    const std::size_t p = pos_[v];
    src[p] = src.back();
    pos_[src[p]] = p;
    src.pop_back();
    if (src.empty()) free_.push_back(from);
    pos_[v] = members_[target].size();
    members_[target].push_back(v);
    label_[v] = target;
    cost_ -= gain;
    for (auto u : src) touched(u);
    for (auto u : members_[target]) touched(u);
  }

  Partition finalize() const { return Partition::from_labels(label_); }

 private:
  ClusterId fresh_slot() {
    if (!free_.empty()) {
      const ClusterId c = free_.back();
      free_.pop_back();
      for (std::size_t u = 0; u < n_; ++u) sum_[u * stride_ + c] = 0.0;
      return c;
    }
    const auto c = static_cast<ClusterId>(members_.size());
    members_.emplace_back();
    if (members_.size() > stride_) grow(std::min(n_, std::max(stride_ * 2, members_.size())));
    return c;
  }

  void grow(std::size_t stride) {
    std::vector<double> next(n_ * stride, 0.0);
    for (std::size_t v = 0; v < n_; ++v) {
      std::copy_n(sum_.begin() + static_cast<std::ptrdiff_t>(v * stride_), stride_,
                  next.begin() + static_cast<std::ptrdiff_t>(v * stride));
    }
    sum_ = std::move(next);
    stride_ = stride;
  }

  const SimilarityGraph& g_;
  std::size_t n_;
  std::vector<ClusterId> label_;
  std::vector<std::vector<std::uint32_t>> members_;
  std::vector<std::size_t> pos_;
  std::vector<ClusterId> free_;
  std::vector<double> sum_;
  std::size_t stride_ = 1;
  double cost_ = 0.0;
};

}  // namespace detail

/// Kernighan-Lin refinement with joins.
///
/// Each sweep runs three phases in order:
///   1. edges (a, b) across two clusters: move a into b's cluster, move b into
///      a's cluster, or exchange both;
///   2. nodes: split a node off into a new cluster;
///   3. cluster pairs: join two clusters.
/// A candidate is applied as soon as it lowers the cost (first improvement).
/// Edges and nodes are only re-examined when a cluster they depend on changed
/// during the current or the previous sweep. Refinement stops after a sweep
/// without any accepted change, or after `max_sweeps`.
inline SolveReport solve_klj(const SimilarityGraph& g, const Partition& init, const KljOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (init.n() != g.n()) {
    throw InputError("initial partition covers " + std::to_string(init.n()) + " nodes, graph has " +
                     std::to_string(g.n()));
  }
  const std::size_t n = g.n();
  detail::KljState st(g, init);

  std::vector<std::uint8_t> changed_prev(n, 1);
  std::vector<std::uint8_t> changed_now(n, 0);
  const auto touched = [&](std::uint32_t u) { changed_now[u] = 1; };
  const auto changed = [&](std::size_t v) { return changed_prev[v] || changed_now[v]; };
  const auto accepted = [&] {
    if (opt.on_move) opt.on_move(st.assignment(), st.cost());
  };

  std::size_t sweeps = 0;
  bool any = true;
  while (any && sweeps < opt.max_sweeps) {
    ++sweeps;
    any = false;

    for (std::uint32_t a = 0; a < n; ++a) {
      for (std::uint32_t b = a + 1; b < n; ++b) {
        const ClusterId ca = st.label(a);
        const ClusterId cb = st.label(b);
        if (ca == cb || !(changed(a) || changed(b))) continue;
        const double move_a = st.sum(a, cb) - st.sum(a, ca);
        const double move_b = st.sum(b, ca) - st.sum(b, cb);
        const double exchange = move_a + move_b - 2.0 * g.w(a, b);
        const double best = std::max({move_a, move_b, exchange});
        if (best <= opt.min_gain) continue;
        if (move_a == best) {
          st.move(a, cb, touched);
        } else if (move_b == best) {
          st.move(b, ca, touched);
        } else {
          st.move(a, cb, touched);
          st.move(b, ca, touched);
        }
        any = true;
        accepted();
      }
    }

    for (std::uint32_t a = 0; a < n; ++a) {
      const ClusterId ca = st.label(a);
      if (!changed(a) || st.members(ca).size() < 2) continue;
      if (-st.sum(a, ca) > opt.min_gain) {
        st.move(a, std::nullopt, touched);
        any = true;
        accepted();
      }
    }

    for (ClusterId ca = 0; ca < st.slots(); ++ca) {
      for (ClusterId cb = ca + 1; cb < st.slots(); ++cb) {
        if (st.members(ca).empty() || st.members(cb).empty()) continue;
        double between = 0.0;
        for (auto a : st.members(ca)) between += st.sum(a, cb);
        if (between <= opt.min_gain) continue;
        const auto moving = st.members(cb);
        for (auto b : moving) st.move(b, ca, touched);
        any = true;
        accepted();
      }
    }

    changed_prev.swap(changed_now);
    std::fill(changed_now.begin(), changed_now.end(), 0);
  }

  SolveReport r;
  r.partition = st.finalize();
  r.cost = cost(g, r.partition);
  detail::check_tracked_cost(st.cost(), r.cost, "klj");
  r.solver = SolverKind::gaec_kl;
  r.iterations = sweeps;
  r.runtime_ms = detail::elapsed_ms(start);
  r.cal = g.cal ? std::optional<double>(g.cal->value()) : std::nullopt;
  return r;
}

/// GAEC alone, or GAEC followed by KLj refinement.
inline SolveReport solve(const SimilarityGraph& g, SolverKind mode, const KljOptions& opt = {}) {
  if (mode == SolverKind::exact) throw InputError("solve() takes 'gaec' or 'gaec-kl'; use solve_exact()");
  const auto start = std::chrono::steady_clock::now();
  SolveReport r = solve_gaec(g);
  if (mode == SolverKind::gaec_kl) r = solve_klj(g, r.partition, opt);
  r.runtime_ms = detail::elapsed_ms(start);
  return r;
}

inline constexpr std::size_t kExactMaxNodes = 12;

/// Visits every set partition of n >= 1 elements as a restricted growth
/// string (a[0] = 0, a[i] <= 1 + max(a[0..i-1])) in lexicographic order,
/// iteratively. The visitor receives the string and the first index that
/// differs from the previous one (0 on the first call).
template <class Visitor>
void for_each_restricted_growth_string(std::size_t n, Visitor&& visit) {
  if (n == 0) return;
  std::vector<ClusterId> a(n, 0);
  std::vector<ClusterId> prefix_max(n, 0);  // max(a[0..i])
  std::span<const ClusterId> view(a);
  visit(view, std::size_t{0});
  while (true) {
    std::size_t i = n - 1;
    while (i > 0 && a[i] > prefix_max[i - 1]) --i;
    if (i == 0) return;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
    visit(view, i);
  }
}

/// Brute force over all set partitions. Returns the first minimum in
/// restricted-growth-string order.
inline SolveReport solve_exact(const SimilarityGraph& g) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = g.n();
  if (n > kExactMaxNodes) {
    throw InputError("exact solver refuses n=" + std::to_string(n) + ": at most " + std::to_string(kExactMaxNodes) +
                     " nodes are enumerable (Bell(12) = 4,213,597 partitions)");
  }
  SolveReport r;
  r.solver = SolverKind::exact;
  r.cal = g.cal ? std::optional<double>(g.cal->value()) : std::nullopt;
  if (n == 0) {
    r.runtime_ms = detail::elapsed_ms(start);
    return r;
  }

  std::vector<double> prefix_cost(n, 0.0);  // cut cost among nodes 0..j
  std::vector<ClusterId> best;
  double best_cost = 0.0;
  for_each_restricted_growth_string(n, [&](std::span<const ClusterId> a, std::size_t from) {
    for (std::size_t j = std::max<std::size_t>(from, 1); j < n; ++j) {
      double c = prefix_cost[j - 1];
      for (std::size_t u = 0; u < j; ++u) {
        if (a[u] != a[j]) c += g.w(u, j);
      }
      prefix_cost[j] = c;
    }
    if (best.empty() || prefix_cost[n - 1] < best_cost) {
      best_cost = prefix_cost[n - 1];
      best.assign(a.begin(), a.end());
    }
  });

  r.partition = Partition::from_labels(best);
  r.cost = cost(g, r.partition);
  r.runtime_ms = detail::elapsed_ms(start);
  return r;
}

}  // namespace mcc
