#pragma once

// `mcclust` command-line front end. Kept in a header so tests can drive it
// in-process with explicit output streams.
//
// Exit codes: 0 success, 2 usage or input error, 3 internal invariant violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcc/mcc.hpp"

namespace mcc::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

namespace detail {

inline void require_file(const std::filesystem::path& p) {
  if (!std::filesystem::is_regular_file(p)) throw InputError("no such file: " + p.string());
}

inline EmbeddingMatrix load(const std::filesystem::path& p, const std::string& format) {
  require_file(p);
  if (format == "auto") return load_embeddings(p);
  if (format == "csv") return load_embeddings(p, EmbeddingFormat::csv);
  if (format == "binary") return load_embeddings(p, EmbeddingFormat::binary);
  throw InputError("format must be auto, binary or csv");
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline void emit_json(const std::string& path, const Json& j, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << '\n';
  } else {
    write_json(path, j);
  }
}

inline std::filesystem::path with_suffix(const std::string& prefix, const char* suffix) { return prefix + suffix; }

inline Json report_json(const SolveReport& r) {
  Json j;
  j["solver"] = std::string(to_string(r.solver));
  j["cal"] = r.cal ? Json(*r.cal) : Json(nullptr);
  j["cost"] = r.cost;
  j["num_clusters"] = r.partition.k();
  j["iterations"] = r.iterations;
  j["runtime_ms"] = r.runtime_ms;
  return j;
}

inline Json run_json(const CalibrationRun& r) {
  Json j;
  j["cal"] = r.cal;
  j["h_class_given_cluster"] = r.h_class_given_cluster;
  j["h_cluster_given_class"] = r.h_cluster_given_class;
  j["delta"] = r.delta;
  j["vi"] = r.vi;
  j["num_clusters"] = r.num_clusters;
  j["cost"] = r.cost;
  return j;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Correlation clustering of embeddings via minimum cost multicut", "mcclust"};
  app.require_subcommand(1);

  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads for similarities and calibration grids")->check(CLI::PositiveNumber);

  // cluster
  std::string emb_path, format = "auto", solver = "gaec-kl", bias = "paper", out_prefix = "mcclust";
  double cal = 0.5;
  auto* cluster = app.add_subcommand("cluster", "Cluster an embedding file");
  cluster->add_option("embeddings", emb_path, "EMB1 or CSV embedding file")->required();
  cluster->add_option("--format", format, "auto, binary or csv");
  cluster->add_option("--cal", cal, "Calibration term in (0, 1)");
  cluster->add_option("--solver", solver, "gaec or gaec-kl");
  cluster->add_option("--bias-sign", bias, "paper or flipped");
  cluster->add_option("--out-prefix", out_prefix, "Writes <prefix>.clusters.csv and <prefix>.report.json");

  // calibrate
  std::string labels_path, grid_spec = "0.1:0.9:0.1", val_emb, val_labels;
  auto* calibrate = app.add_subcommand("calibrate", "Ablate the calibration term against class labels");
  calibrate->add_option("embeddings", emb_path)->required();
  calibrate->add_option("labels", labels_path, "CSV with header id,label")->required();
  calibrate->add_option("--format", format);
  calibrate->add_option("--grid", grid_spec, "lo:hi:step");
  calibrate->add_option("--solver", solver);
  calibrate->add_option("--bias-sign", bias);
  calibrate->add_option("--val-embeddings", val_emb, "Held-out embeddings for validating the selected cal");
  calibrate->add_option("--val-labels", val_labels);
  calibrate->add_option("--out-prefix", out_prefix, "Writes <prefix>.ablation.csv and <prefix>.selection.json");

  // compare
  std::string path_a, path_b, overlap_out, json_out;
  double threshold = 1.0;
  auto* compare = app.add_subcommand("compare", "Variation of information between two clusterings");
  compare->add_option("a", path_a)->required();
  compare->add_option("b", path_b)->required();
  compare->add_option("--threshold", threshold, "Containment threshold in (0, 1]");
  compare->add_option("--overlap-out", overlap_out, "Overlap CSV path");
  compare->add_option("--out", json_out, "JSON output path (default stdout)");

  // stats
  auto* stats = app.add_subcommand("stats", "Cluster-size statistics");
  stats->add_option("clustering", path_a)->required();
  stats->add_option("--out", json_out);

  // oracle
  std::string heuristic = "gaec-kl";
  auto* oracle = app.add_subcommand("oracle", "Exact vs heuristic cost on a small edge list");
  oracle->add_option("edges", path_a, "Edge list: 'u v w' per line")->required();
  oracle->add_option("--heuristic", heuristic, "gaec or gaec-kl");
  oracle->add_option("--out", json_out);

  // vi-matrix
  std::vector<std::string> named;
  auto* vimat = app.add_subcommand("vi-matrix", "Pairwise VI between clusterings");
  vimat->add_option("clusterings", named, "name=path entries")->required();
  vimat->add_option("--out", json_out, "CSV output path (default stdout)");

  // simstats
  std::size_t bins = 20;
  auto* simstats = app.add_subcommand("simstats", "Distribution of pairwise cosine similarities");
  simstats->add_option("embeddings", emb_path)->required();
  simstats->add_option("--format", format);
  simstats->add_option("--bins", bins)->check(CLI::PositiveNumber);
  simstats->add_option("--out", json_out);

  // blobs
  BlobSpec blob;
  bool blob_csv = false;
  auto* blobs = app.add_subcommand("blobs", "Write a seeded Gaussian blob fixture");
  blobs->add_option("--points", blob.points);
  blobs->add_option("--blobs", blob.blobs);
  blobs->add_option("--dim", blob.dim);
  blobs->add_option("--noise", blob.noise);
  blobs->add_option("--seed", blob.seed);
  blobs->add_flag("--csv", blob_csv, "Write CSV instead of EMB1");
  blobs->add_option("--out-prefix", out_prefix, "Writes <prefix>.emb (or .csv) and <prefix>.labels.csv");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mcclust: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (cluster->parsed()) {
      const CalibrationTerm term(cal);
      const auto mode = parse_solver_mode(solver);
      const auto sign = parse_bias_sign(bias);
      const auto emb = detail::load(emb_path, format);
      const auto sim = cosine_similarities(emb, threads);
      const auto graph = build_graph(sim, term, sign);
      const auto report = solve(graph, mode);
      save_clustering(detail::with_suffix(out_prefix, ".clusters.csv"), emb.items(), report.partition);
      detail::write_json(detail::with_suffix(out_prefix, ".report.json"), detail::report_json(report));
      out << report.partition.k() << " clusters, cost " << report.cost << '\n';
    } else if (calibrate->parsed()) {
      const auto grid = parse_grid(grid_spec);
      AblationOptions opt{parse_solver_mode(solver), parse_bias_sign(bias), threads};
      if (val_emb.empty() != val_labels.empty()) throw InputError("--val-embeddings and --val-labels go together");
      const auto emb = detail::load(emb_path, format);
      detail::require_file(labels_path);
      const auto runs = ablate(emb, load_labels(labels_path), grid, opt);
      const auto chosen = select_cal(runs);
      save_ablation_csv(detail::with_suffix(out_prefix, ".ablation.csv"), runs);

      Json sel;
      sel["selected_cal"] = chosen.cal;
      sel["delta"] = chosen.delta;
      sel["vi_train"] = chosen.vi;
      sel["vi_val"] = nullptr;
      sel["train"] = detail::run_json(chosen);
      if (!val_emb.empty()) {
        const auto vemb = detail::load(val_emb, format);
        detail::require_file(val_labels);
        const auto val = validate_cal(vemb, load_labels(val_labels), CalibrationTerm(chosen.cal), opt);
        sel["vi_val"] = val.vi;
        sel["validation"] = detail::run_json(val);
      }
      sel["solver"] = std::string(to_string(opt.mode));
      sel["bias_sign"] = std::string(to_string(opt.bias_sign));
      sel["grid"] = grid;
      sel["log_base"] = "e";
      detail::write_json(detail::with_suffix(out_prefix, ".selection.json"), sel);
      out << "selected cal " << chosen.cal << " (delta " << chosen.delta << ", vi " << chosen.vi << ")\n";
    } else if (compare->parsed()) {
      detail::require_file(path_a);
      detail::require_file(path_b);
      const auto a = load_clustering(path_a);
      const auto b = load_clustering(path_b);
      const auto pa = a.partition();
      Partition pb;
      try {
        pb = b.partition_aligned_to(a.items);
      } catch (const InputError& e) {
        throw InputError("clusterings cover different items: " + std::string(e.what()));
      }
      const auto vi = variation_of_information(pa, pb);
      const auto overlap = overlap_analysis(pa, pb, threshold);
      if (!overlap_out.empty()) save_overlap_csv(overlap_out, overlap);
      Json j;
      j["vi"] = vi.vi;
      j["h_a_given_b"] = vi.h_c_given_cprime;
      j["h_b_given_a"] = vi.h_cprime_given_c;
      j["n"] = vi.n;
      j["log_base"] = "e";
      detail::emit_json(json_out, j, out);
    } else if (stats->parsed()) {
      detail::require_file(path_a);
      const auto s = cluster_stats(load_clustering(path_a).partition());
      Json j;
      j["num_clusters"] = s.num_clusters;
      j["min_size"] = s.min_size;
      j["median_size"] = s.median_size;
      j["mean_size"] = s.mean_size;
      j["max_size"] = s.max_size;
      j["pct_size_one"] = s.pct_size_one;
      detail::emit_json(json_out, j, out);
    } else if (oracle->parsed()) {
      const auto mode = parse_solver_mode(heuristic);
      detail::require_file(path_a);
      const auto graph = load_edge_list(path_a);
      const auto exact = solve_exact(graph);
      const auto heur = solve(graph, mode);
      Json j;
      j["n"] = graph.n();
      j["heuristic"] = std::string(to_string(mode));
      j["exact_cost"] = exact.cost;
      j["heuristic_cost"] = heur.cost;
      j["gap"] = heur.cost - exact.cost;
      j["exact_clusters"] = exact.partition.k();
      j["heuristic_clusters"] = heur.partition.k();
      detail::emit_json(json_out, j, out);
    } else if (vimat->parsed()) {
      std::vector<NamedPartition> parts;
      std::vector<std::string> universe;
      for (const auto& entry : named) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("expected name=path, got '" + entry + "'");
        const std::string path = entry.substr(eq + 1);
        detail::require_file(path);
        const auto c = load_clustering(path);
        if (universe.empty()) universe = c.items;
        try {
          parts.push_back({entry.substr(0, eq), c.partition_aligned_to(universe)});
        } catch (const InputError& e) {
          throw InputError("'" + entry.substr(0, eq) + "' covers different items: " + e.what());
        }
      }
      const auto m = vi_matrix(parts, threads);
      if (json_out.empty() || json_out == "-") {
        write_vi_matrix(out, parts, m);
      } else {
        save_vi_matrix(json_out, parts, m);
      }
    } else if (simstats->parsed()) {
      const auto emb = detail::load(emb_path, format);
      const auto s = distribution_stats(cosine_similarities(emb, threads), bins);
      Json j;
      j["n"] = emb.n();
      j["d"] = emb.d();
      j["mean"] = s.mean;
      j["std"] = s.std;
      j["min"] = s.min;
      j["median"] = s.median;
      j["max"] = s.max;
      j["histogram"] = s.histogram;
      detail::emit_json(json_out, j, out);
    } else if (blobs->parsed()) {
      const auto data = make_blobs(blob);
      const auto emb_file = detail::with_suffix(out_prefix, blob_csv ? ".csv" : ".emb");
      if (blob_csv) {
        save_embedding_csv(emb_file, data.embeddings);
      } else {
        save_emb1(emb_file, data.embeddings);
      }
      save_labels(detail::with_suffix(out_prefix, ".labels.csv"), data.embeddings.items(), data.labels);
      out << "wrote " << emb_file.string() << '\n';
    }
  } catch (const InputError& e) {
    err << "mcclust: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvariantError& e) {
    err << "mcclust: internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "mcclust: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace mcc::cli
