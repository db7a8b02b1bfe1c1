#pragma once

// Clustering (`id,cluster`) and label (`id,label`) CSV files.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mcc/error.hpp"
#include "mcc/partition.hpp"
#include "mcc/text.hpp"

namespace mcc {

/// Item identifiers paired with one string tag per item (a cluster id or a
/// class label), in file order.
struct TaggedItems {
  std::vector<std::string> items;
  std::vector<std::string> tags;

  std::size_t size() const noexcept { return items.size(); }

  /// Tags reordered to follow `order`. Both sides must name exactly the same
  /// items; otherwise the error lists (some of) the offenders.
  std::vector<std::string> aligned_to(const std::vector<std::string>& order) const {
    std::unordered_map<std::string_view, std::size_t> index;
    index.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) index.emplace(items[i], i);

    std::vector<std::string> out;
    out.reserve(order.size());
    std::vector<std::string> missing;
    for (const auto& id : order) {
      const auto it = index.find(id);
      if (it == index.end()) {
        missing.push_back(id);
        continue;
      }
      out.push_back(tags[it->second]);
    }
    if (!missing.empty()) {
      std::string msg = std::to_string(missing.size()) + " item(s) have no entry:";
      for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 5); ++i) msg += " '" + missing[i] + "'";
      if (missing.size() > 5) msg += " ...";
      throw InputError(msg);
    }
    if (order.size() != items.size()) {
      std::unordered_set<std::string_view> wanted(order.begin(), order.end());
      std::string msg = std::to_string(items.size() - order.size()) + " extra item(s) not in the reference universe:";
      std::size_t shown = 0;
      for (const auto& id : items) {
        if (!wanted.count(id) && shown++ < 5) msg += " '" + id + "'";
      }
      throw InputError(msg);
    }
    return out;
  }

  Partition partition() const { return Partition::from_labels(tags); }
  Partition partition_aligned_to(const std::vector<std::string>& order) const {
    return Partition::from_labels(aligned_to(order));
  }
};

inline TaggedItems load_tagged_csv(const std::filesystem::path& path, std::string_view tag_column, bool integer_tags) {
  CsvReader csv(path);
  std::vector<std::string_view> fields;
  if (!csv.next(fields) || fields.size() != 2 || fields[0] != "id" || fields[1] != tag_column) {
    csv.fail("expected header 'id," + std::string(tag_column) + "'");
  }
  TaggedItems out;
  std::unordered_set<std::string> seen;
  while (csv.next(fields)) {
    if (fields.size() != 2) csv.fail("expected 2 fields, got " + std::to_string(fields.size()));
    std::string id(fields[0]);
    if (id.empty()) csv.fail("empty identifier");
    if (!seen.insert(id).second) csv.fail("duplicate identifier '" + id + "'");
    std::string tag(fields[1]);
    if (integer_tags) {
      const auto c = parse_integer(fields[1], csv);
      if (c < 0) csv.fail("cluster ids must be non-negative");
      tag = std::to_string(c);
    }
    out.items.push_back(std::move(id));
    out.tags.push_back(std::move(tag));
  }
  if (out.items.empty()) csv.fail("no rows");
  return out;
}

inline TaggedItems load_clustering(const std::filesystem::path& path) { return load_tagged_csv(path, "cluster", true); }
inline TaggedItems load_labels(const std::filesystem::path& path) { return load_tagged_csv(path, "label", false); }

inline void save_clustering(const std::filesystem::path& path, const std::vector<std::string>& items, const Partition& p) {
  if (items.size() != p.n()) throw InputError("clustering has " + std::to_string(p.n()) + " nodes for " + std::to_string(items.size()) + " items");
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "id,cluster\n";
  for (std::size_t i = 0; i < items.size(); ++i) out << items[i] << ',' << p[i] << '\n';
}

inline void save_labels(const std::filesystem::path& path, const std::vector<std::string>& items,
                        const std::vector<std::string>& labels) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "id,label\n";
  for (std::size_t i = 0; i < items.size(); ++i) out << items[i] << ',' << labels[i] << '\n';
}

}  // namespace mcc
