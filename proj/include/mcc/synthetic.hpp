#pragma once

// Seeded Gaussian blob fixtures with known class structure.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mcc/embedspace.hpp"
#include "mcc/error.hpp"

namespace mcc {

struct BlobSpec {
  std::size_t points = 300;
  std::size_t blobs = 3;
  std::size_t dim = 16;
  double center_norm = 10.0;  // distance of every blob centre from the origin
  double noise = 0.5;         // per-coordinate standard deviation
  std::uint64_t seed = 42;
};

struct BlobData {
  EmbeddingMatrix embeddings;
  std::vector<std::string> labels;  // "blob<k>" per item
};

/// Point i belongs to blob i % blobs. Item ids are "p<i>".
/// Centres are the vertices of a regular simplex (e_k minus the centroid of
/// e_0..e_{blobs-1}), so distinct centres have cosine -1/(blobs-1).
inline BlobData make_blobs(const BlobSpec& spec) {
  if (spec.blobs == 0 || spec.points < spec.blobs) throw InputError("need at least one point per blob");
  if (spec.blobs > spec.dim) throw InputError("blobs must not exceed dim");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise);

  const double b = static_cast<double>(spec.blobs);
  const double off = spec.blobs == 1 ? 0.0 : 1.0 / b;
  const double scale = spec.center_norm / std::sqrt((1.0 - off) * (1.0 - off) + (b - 1.0) * off * off);
  const auto centre = [&](std::size_t blob, std::size_t k) {
    return k < spec.blobs ? scale * ((k == blob ? 1.0 : 0.0) - off) : 0.0;
  };

  std::vector<std::string> ids;
  std::vector<std::string> labels;
  std::vector<double> values(spec.points * spec.dim);
  for (std::size_t i = 0; i < spec.points; ++i) {
    const std::size_t blob = i % spec.blobs;
    for (std::size_t k = 0; k < spec.dim; ++k) {
      values[i * spec.dim + k] = centre(blob, k) + noise(rng);
    }
    ids.push_back("p" + std::to_string(i));
    labels.push_back("blob" + std::to_string(blob));
  }
  return {EmbeddingMatrix(std::move(ids), std::move(values), spec.dim), std::move(labels)};
}

}  // namespace mcc
