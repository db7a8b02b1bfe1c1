#pragma once

// Calibration-term ablation: cluster at every grid value of cal, score each
// clustering against ground-truth classes and pick the cal whose two
// conditional entropies are most balanced.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mcc/embedspace.hpp"
#include "mcc/error.hpp"
#include "mcc/graphbuild.hpp"
#include "mcc/io.hpp"
#include "mcc/metrics.hpp"
#include "mcc/multicut.hpp"
#include "mcc/text.hpp"

namespace mcc {

struct CalibrationRun {
  double cal = 0.0;
  double h_class_given_cluster = 0.0;
  double h_cluster_given_class = 0.0;
  double delta = 0.0;  // |H(class|cluster) - H(cluster|class)|
  double vi = 0.0;
  std::size_t num_clusters = 0;
  double cost = 0.0;
};

struct AblationOptions {
  SolverKind mode = SolverKind::gaec_kl;
  BiasSign bias_sign = BiasSign::paper;
  unsigned threads = 1;
};

/// Grid spec `lo:hi:step`, inclusive of hi up to rounding. Values are snapped
/// to 1e-9 so that 0.1:0.9:0.1 yields exactly 0.1, 0.2, ..., 0.9.
inline std::vector<double> parse_grid(std::string_view spec) {
  std::vector<std::string_view> parts;
  split(spec, ':', parts);
  struct Where {
    std::string_view spec;
    [[noreturn]] void fail(const std::string& what) const { throw InputError("grid '" + std::string(spec) + "': " + what); }
  } where{spec};
  if (parts.size() != 3) where.fail("expected lo:hi:step");
  const double lo = parse_real(parts[0], where);
  const double hi = parse_real(parts[1], where);
  const double step = parse_real(parts[2], where);
  if (!(step > 0.0)) where.fail("step must be positive");
  if (!(hi >= lo)) where.fail("hi must not be below lo");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9;
    CalibrationTerm{v};  // range check
    grid.push_back(v);
  }
  return grid;
}

inline std::vector<double> default_grid() { return parse_grid("0.1:0.9:0.1"); }

/// Scores a clustering against ground-truth classes.
inline CalibrationRun score_run(double cal, const SolveReport& solved, const Partition& classes) {
  const auto vi = variation_of_information(classes, solved.partition);
  CalibrationRun run;
  run.cal = cal;
  run.h_class_given_cluster = vi.h_c_given_cprime;
  run.h_cluster_given_class = vi.h_cprime_given_c;
  run.delta = std::abs(run.h_class_given_cluster - run.h_cluster_given_class);
  run.vi = vi.vi;
  run.num_clusters = solved.partition.k();
  run.cost = solved.cost;
  return run;
}

/// One run per grid value over a shared similarity matrix. Only the edge
/// weights are rebuilt per grid point.
inline std::vector<CalibrationRun> ablate(const SimilarityMatrix& sim, const Partition& classes,
                                          std::span<const double> grid, const AblationOptions& opt = {}) {
  if (grid.empty()) throw InputError("calibration grid is empty");
  if (classes.n() != sim.n()) throw InputError("class labels cover " + std::to_string(classes.n()) + " items, similarity matrix has " + std::to_string(sim.n()));
  for (double c : grid) CalibrationTerm{c};

  std::vector<CalibrationRun> runs(grid.size());
  auto job = [&](std::size_t worker, std::size_t workers) {
    for (std::size_t k = worker; k < grid.size(); k += workers) {
      const CalibrationTerm cal(grid[k]);
      const auto graph = build_graph(sim, cal, opt.bias_sign);
      runs[k] = score_run(grid[k], solve(graph, opt.mode), classes);
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(opt.threads, grid.size()));
  if (workers == 1) {
    job(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(job, w, workers);
  }
  return runs;
}

inline Partition class_partition(const EmbeddingMatrix& emb, const TaggedItems& labels) {
  if (labels.size() == 0) throw InputError("label set is empty");
  try {
    return labels.partition_aligned_to(emb.items());
  } catch (const InputError& e) {
    throw InputError(std::string("labels do not cover the embedding items: ") + e.what());
  }
}

inline std::vector<CalibrationRun> ablate(const EmbeddingMatrix& emb, const TaggedItems& labels,
                                          std::span<const double> grid, const AblationOptions& opt = {}) {
  const auto classes = class_partition(emb, labels);
  const auto sim = cosine_similarities(emb, opt.threads);
  return ablate(sim, classes, grid, opt);
}

/// The run with the smallest |delta|; ties go to the lower vi, then the lower cal.
inline CalibrationRun select_cal(std::span<const CalibrationRun> runs) {
  if (runs.empty()) throw InputError("no calibration runs to select from");
  return *std::min_element(runs.begin(), runs.end(), [](const CalibrationRun& a, const CalibrationRun& b) {
    if (a.delta != b.delta) return a.delta < b.delta;
    if (a.vi != b.vi) return a.vi < b.vi;
    return a.cal < b.cal;
  });
}

/// Clusters held-out data at a fixed cal and scores it.
inline CalibrationRun validate_cal(const EmbeddingMatrix& emb_val, const TaggedItems& labels_val, CalibrationTerm cal,
                                   const AblationOptions& opt = {}) {
  const double grid[] = {cal.value()};
  return ablate(emb_val, labels_val, grid, opt).front();
}

inline void save_ablation_csv(const std::filesystem::path& path, std::span<const CalibrationRun> runs) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(12);
  out << "cal,h_class_given_cluster,h_cluster_given_class,delta,vi,num_clusters,cost\n";
  for (const auto& r : runs) {
    out << r.cal << ',' << r.h_class_given_cluster << ',' << r.h_cluster_given_class << ',' << r.delta << ','
        << r.vi << ',' << r.num_clusters << ',' << r.cost << '\n';
  }
}

}  // namespace mcc
