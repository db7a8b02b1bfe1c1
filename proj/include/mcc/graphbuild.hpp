#pragma once

// Complete weighted graphs for the multicut problem. Edge weights are
// log-odds: positive weights pull two nodes into one cluster, negative
// weights push them apart.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcc/embedspace.hpp"
#include "mcc/error.hpp"
#include "mcc/text.hpp"
#include "mcc/triangle.hpp"

namespace mcc {

/// Normalized similarities are clamped to [kClampEpsilon, 1 - kClampEpsilon]
/// before the logit so that the min-max endpoints stay finite.
inline constexpr double kClampEpsilon = 1e-6;

class CalibrationTerm {
 public:
  explicit CalibrationTerm(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0)) {
      throw InputError("calibration term must lie in the open interval (0, 1), got " + std::to_string(value));
    }
  }
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Sign of the calibration bias. `paper` adds ln((1-cal)/cal), which puts the
/// cut boundary at s' = cal; `flipped` subtracts it (boundary at s' = 1-cal).
enum class BiasSign { paper, flipped };

inline BiasSign parse_bias_sign(std::string_view s) {
  if (s == "paper") return BiasSign::paper;
  if (s == "flipped") return BiasSign::flipped;
  throw InputError("bias sign must be 'paper' or 'flipped', got '" + std::string(s) + "'");
}

inline std::string_view to_string(BiasSign s) noexcept {
  return s == BiasSign::paper ? "paper" : "flipped";
}

inline double calibration_bias(CalibrationTerm cal, BiasSign sign = BiasSign::paper) noexcept {
  const double b = std::log((1.0 - cal.value()) / cal.value());
  return sign == BiasSign::paper ? b : -b;
}

/// Edge weight for a min-max normalized similarity.
inline double edge_weight(double normalized, CalibrationTerm cal, BiasSign sign = BiasSign::paper) noexcept {
  const double s = std::clamp(normalized, kClampEpsilon, 1.0 - kClampEpsilon);
  return std::log(s / (1.0 - s)) + calibration_bias(cal, sign);
}

/// Largest |w| any edge can carry for the given calibration.
inline double weight_bound(CalibrationTerm cal) noexcept {
  return std::log((1.0 - kClampEpsilon) / kClampEpsilon) + std::abs(calibration_bias(cal));
}

struct SimilarityRange {
  double min = 0.0;
  double max = 0.0;
};

inline SimilarityRange similarity_range(const SimilarityMatrix& sim) {
  if (sim.n() < 2) throw InputError("min-max normalization needs at least 2 items");
  const auto [lo, hi] = std::minmax_element(sim.upper().begin(), sim.upper().end());
  SimilarityRange r{*lo, *hi};
  if (!(r.max > r.min)) {
    throw InputError("degenerate input: all pairwise similarities equal " + std::to_string(r.min));
  }
  return r;
}

inline double normalize(float s, SimilarityRange r) noexcept {
  return (static_cast<double>(s) - r.min) / (r.max - r.min);
}

struct NormalizedSimilarity {
  std::size_t n = 0;
  std::vector<double> upper;  // values in [0, 1]
  SimilarityRange range;
};

inline NormalizedSimilarity minmax_normalize(const SimilarityMatrix& sim) {
  NormalizedSimilarity out{sim.n(), {}, similarity_range(sim)};
  out.upper.reserve(sim.upper().size());
  for (float s : sim.upper()) out.upper.push_back(normalize(s, out.range));
  return out;
}

/// Complete undirected graph over n nodes, edge weights stored as the
/// strictly-upper triangle.
class SimilarityGraph {
 public:
  SimilarityGraph() = default;

  SimilarityGraph(std::size_t n, std::vector<double> weights) : n_(n), weights_(std::move(weights)) {
    if (weights_.size() != pair_count(n_)) {
      throw InputError("graph over " + std::to_string(n_) + " nodes needs " + std::to_string(pair_count(n_)) +
                       " weights, got " + std::to_string(weights_.size()));
    }
    for (double w : weights_) {
      if (!std::isfinite(w)) throw InputError("non-finite edge weight");
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::span<const double> weights() const noexcept { return weights_; }

  double w(std::size_t i, std::size_t j) const noexcept { return weights_[triangle_index_unordered(n_, i, j)]; }

  /// Present when built from similarities.
  std::optional<CalibrationTerm> cal;
  std::optional<SimilarityRange> range;

 private:
  std::size_t n_ = 0;
  std::vector<double> weights_;
};

inline SimilarityGraph build_graph(const SimilarityMatrix& sim, CalibrationTerm cal, BiasSign sign = BiasSign::paper) {
  const auto range = similarity_range(sim);
  std::vector<double> weights;
  weights.reserve(sim.upper().size());
  for (float s : sim.upper()) weights.push_back(edge_weight(normalize(s, range), cal, sign));
  SimilarityGraph g(sim.n(), std::move(weights));
  g.cal = cal;
  g.range = range;
  return g;
}

/// Reads `u v w` lines (0-based indices, `#` comments). Pairs not listed get
/// weight 0; n is one past the largest index.
inline SimilarityGraph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list: " + path.string());
  struct Edge {
    std::size_t u, v;
    double w;
  };
  std::vector<Edge> edges;
  std::size_t n = 0;
  std::string line;
  std::size_t line_no = 0;
  struct Where {
    const std::filesystem::path& path;
    const std::size_t& line;
    [[noreturn]] void fail(const std::string& what) const {
      throw InputError(path.string() + ":" + std::to_string(line) + ": " + what);
    }
  } where{path, line_no};

  std::vector<std::string_view> tok;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    tok.clear();
    while (!body.empty()) {
      const auto end = body.find_first_of(" \t");
      tok.push_back(body.substr(0, end));
      if (end == std::string_view::npos) break;
      body = trim(body.substr(end));
    }
    if (tok.size() != 3) where.fail("expected 'u v w', got " + std::to_string(tok.size()) + " fields");
    Edge e{parse_index(tok[0], where), parse_index(tok[1], where), parse_real(tok[2], where)};
    if (e.u == e.v) where.fail("self-loop on node " + std::to_string(e.u));
    if (!std::isfinite(e.w)) where.fail("non-finite weight");
    n = std::max({n, e.u + 1, e.v + 1});
    edges.push_back(e);
  }
  if (edges.empty()) throw InputError(path.string() + ": edge list contains no edges");

  std::vector<double> weights(pair_count(n), 0.0);
  std::vector<bool> seen(weights.size(), false);
  for (const auto& e : edges) {
    const auto k = triangle_index_unordered(n, e.u, e.v);
    if (seen[k]) throw InputError(path.string() + ": duplicate edge " + std::to_string(e.u) + " " + std::to_string(e.v));
    seen[k] = true;
    weights[k] = e.w;
  }
  return SimilarityGraph(n, std::move(weights));
}

inline void save_edge_list(const std::filesystem::path& path, const SimilarityGraph& g) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(17);
  out << "# u v w\n";
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = i + 1; j < g.n(); ++j) out << i << ' ' << j << ' ' << g.w(i, j) << '\n';
  }
}

}  // namespace mcc
