#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcc/error.hpp"

namespace mcc {

using ClusterId = std::uint32_t;

/// Node -> cluster assignment in canonical form: ids are 0..k-1, ordered by
/// decreasing cluster size, ties broken by the smallest member node index.
/// Two partitions that describe the same clustering therefore compare equal.
class Partition {
 public:
  Partition() = default;

  /// Finalizes arbitrary (hashable) labels into canonical form.
  template <class Label>
  static Partition from_labels(std::span<const Label> labels) {
    std::unordered_map<Label, ClusterId> first;
    std::vector<ClusterId> raw(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      raw[i] = first.try_emplace(labels[i], static_cast<ClusterId>(first.size())).first->second;
    }
    return Partition(std::move(raw), first.size());
  }

  template <class Label>
  static Partition from_labels(const std::vector<Label>& labels) {
    return from_labels(std::span<const Label>(labels));
  }

  static Partition singletons(std::size_t n) {
    std::vector<ClusterId> raw(n);
    std::iota(raw.begin(), raw.end(), ClusterId{0});
    return Partition(std::move(raw), n);
  }

  static Partition one_cluster(std::size_t n) { return Partition(std::vector<ClusterId>(n, 0), n ? 1 : 0); }

  std::size_t n() const noexcept { return assignment_.size(); }
  std::size_t k() const noexcept { return k_; }
  const std::vector<ClusterId>& assignment() const noexcept { return assignment_; }
  ClusterId operator[](std::size_t node) const noexcept { return assignment_[node]; }

  /// Cluster sizes indexed by cluster id (non-increasing).
  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s(k_, 0);
    for (auto c : assignment_) ++s[c];
    return s;
  }

  std::vector<std::vector<std::size_t>> members() const {
    std::vector<std::vector<std::size_t>> m(k_);
    for (std::size_t i = 0; i < n(); ++i) m[assignment_[i]].push_back(i);
    return m;
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  // `raw` holds dense ids 0..k-1 assigned by first occurrence.
  Partition(std::vector<ClusterId> raw, std::size_t k) : k_(k) {
    std::vector<std::size_t> size(k, 0);
    for (auto c : raw) ++size[c];
    // First-occurrence order already sorts by smallest member index, so a
    // stable sort on size yields the tie-break for free.
    std::vector<ClusterId> order(k);
    std::iota(order.begin(), order.end(), ClusterId{0});
    std::stable_sort(order.begin(), order.end(), [&](ClusterId a, ClusterId b) { return size[a] > size[b]; });
    std::vector<ClusterId> rank(k);
    for (std::size_t r = 0; r < k; ++r) rank[order[r]] = static_cast<ClusterId>(r);
    assignment_.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) assignment_[i] = rank[raw[i]];
  }

  std::vector<ClusterId> assignment_;
  std::size_t k_ = 0;
};

inline void require_same_universe(const Partition& a, const Partition& b) {
  if (a.n() != b.n()) {
    throw InputError("partitions cover different item counts (" + std::to_string(a.n()) + " vs " +
                     std::to_string(b.n()) + ")");
  }
}

}  // namespace mcc
