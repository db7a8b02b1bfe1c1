#pragma once

// Embedding matrices, pairwise cosine similarities and the similarity
// distribution diagnostics used to spot narrow-cone embedding spaces.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include "mcc/error.hpp"
#include "mcc/text.hpp"
#include "mcc/triangle.hpp"

namespace mcc {

static_assert(std::endian::native == std::endian::little,
              "EMB1 reader assumes a little-endian host");

/// n x d real matrix with one identifier per row.
///
/// Rows are validated and L2-normalized on construction, so every instance
/// satisfies: n >= 1, d >= 1, finite entries, no zero rows, unique ids.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::vector<std::string> items, std::vector<double> values, std::size_t dim)
      : items_(std::move(items)), values_(std::move(values)), dim_(dim) {
    if (items_.empty()) throw InputError("embedding matrix has no rows");
    if (dim_ == 0) throw InputError("embedding dimension must be positive");
    if (values_.size() != items_.size() * dim_) {
      throw InputError("embedding payload holds " + std::to_string(values_.size()) +
                       " values, expected " + std::to_string(items_.size()) + " x " +
                       std::to_string(dim_));
    }
    std::unordered_set<std::string_view> seen;
    seen.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (!seen.insert(items_[i]).second) {
        throw InputError("duplicate identifier '" + items_[i] + "' at row " + std::to_string(i));
      }
    }
    unit_.resize(values_.size());
    for (std::size_t i = 0; i < n(); ++i) {
      const auto r = row(i);
      double sq = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) {
        if (!std::isfinite(r[k])) {
          throw InputError("non-finite value at row " + std::to_string(i) + ", column " +
                           std::to_string(k));
        }
        sq += r[k] * r[k];
      }
      if (sq == 0.0) throw InputError("zero vector at row " + std::to_string(i) + " ('" + items_[i] + "')");
      const double inv = 1.0 / std::sqrt(sq);
      for (std::size_t k = 0; k < dim_; ++k) unit_[i * dim_ + k] = r[k] * inv;
    }
  }

  std::size_t n() const noexcept { return items_.size(); }
  std::size_t d() const noexcept { return dim_; }
  const std::vector<std::string>& items() const noexcept { return items_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<const double> unit_row(std::size_t i) const noexcept {
    return {unit_.data() + i * dim_, dim_};
  }

 private:
  std::vector<std::string> items_;
  std::vector<double> values_;
  std::vector<double> unit_;
  std::size_t dim_;
};

enum class EmbeddingFormat { binary, csv };

inline EmbeddingFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv" ? EmbeddingFormat::csv : EmbeddingFormat::binary;
}

namespace detail {

inline std::uint32_t read_u32_le(const unsigned char* p) noexcept {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

inline void write_u32_le(std::ostream& os, std::uint32_t v) {
  const char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                     char((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline std::vector<std::string> read_manifest(const std::filesystem::path& path, std::size_t n) {
  std::vector<std::string> ids(n);
  std::vector<bool> filled(n, false);
  CsvReader csv(path);
  csv.expect_header({"index", "id"});
  std::vector<std::string_view> fields;
  while (csv.next(fields)) {
    if (fields.size() != 2) csv.fail("expected 2 fields, got " + std::to_string(fields.size()));
    const auto idx = parse_index(fields[0], csv);
    if (idx >= n) csv.fail("row index " + std::to_string(idx) + " out of range for n=" + std::to_string(n));
    if (filled[idx]) csv.fail("row index " + std::to_string(idx) + " listed twice");
    ids[idx] = std::string(fields[1]);
    filled[idx] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!filled[i]) throw InputError(path.string() + ": manifest has no entry for row " + std::to_string(i));
  }
  return ids;
}

inline EmbeddingMatrix load_emb1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open embedding file: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto where = [&](std::size_t off) { return path.string() + " (byte offset " + std::to_string(off) + ")"; };
  if (bytes.size() < 12) throw InputError(where(bytes.size()) + ": truncated EMB1 header");
  if (std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) != "EMB1") {
    throw InputError(where(0) + ": bad magic, expected 'EMB1'");
  }
  const std::size_t n = read_u32_le(bytes.data() + 4);
  const std::size_t d = read_u32_le(bytes.data() + 8);
  const std::size_t expected = n * d * 4;
  if (bytes.size() - 12 != expected) {
    throw InputError(where(12) + ": dimension mismatch, header declares n=" + std::to_string(n) +
                     " d=" + std::to_string(d) + " (" + std::to_string(expected) +
                     " payload bytes) but payload holds " + std::to_string(bytes.size() - 12));
  }
  std::vector<double> values(n * d);
  for (std::size_t k = 0; k < n * d; ++k) {
    const std::size_t off = 12 + 4 * k;
    const float f = std::bit_cast<float>(read_u32_le(bytes.data() + off));
    if (!std::isfinite(f)) throw InputError(where(off) + ": non-finite value");
    values[k] = f;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(i * d);
    if (d > 0 && std::all_of(first, first + static_cast<std::ptrdiff_t>(d), [](double v) { return v == 0.0; })) {
      throw InputError(where(12 + 4 * i * d) + ": zero vector at row " + std::to_string(i));
    }
  }

  std::filesystem::path manifest = path;
  manifest += ".manifest.csv";
  std::vector<std::string> ids;
  if (std::filesystem::exists(manifest)) {
    ids = read_manifest(manifest, n);
  } else {
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  }
  try {
    return EmbeddingMatrix(std::move(ids), std::move(values), d);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

inline EmbeddingMatrix load_embedding_csv(const std::filesystem::path& path) {
  CsvReader csv(path);
  std::vector<std::string_view> fields;
  if (!csv.next(fields)) csv.fail("empty file, expected header 'id,f0,...'");
  if (fields.size() < 2 || fields[0] != "id") csv.fail("header must be 'id,f0,f1,...'");
  const std::size_t d = fields.size() - 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (fields[k + 1] != "f" + std::to_string(k)) csv.fail("header column " + std::to_string(k + 1) + " must be 'f" + std::to_string(k) + "'");
  }

  std::vector<std::string> ids;
  std::vector<double> values;
  std::unordered_set<std::string> seen;
  while (csv.next(fields)) {
    if (fields.size() != d + 1) {
      csv.fail("dimension mismatch, expected " + std::to_string(d) + " values, got " +
               std::to_string(fields.size() - 1));
    }
    std::string id(fields[0]);
    if (!seen.insert(id).second) csv.fail("duplicate identifier '" + id + "'");
    bool nonzero = false;
    for (std::size_t k = 0; k < d; ++k) {
      const double v = parse_real(fields[k + 1], csv);
      if (!std::isfinite(v)) csv.fail("non-finite value in column " + std::to_string(k + 1));
      nonzero = nonzero || v != 0.0;
      values.push_back(v);
    }
    if (!nonzero) csv.fail("zero vector for '" + id + "'");
    ids.push_back(std::move(id));
  }
  if (ids.empty()) csv.fail("no embedding rows");
  return EmbeddingMatrix(std::move(ids), std::move(values), d);
}

}  // namespace detail

inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  return format == EmbeddingFormat::csv ? detail::load_embedding_csv(path) : detail::load_emb1(path);
}

inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  return load_embeddings(path, format_from_path(path));
}

/// Writes an EMB1 file (float32 payload) and its `.manifest.csv` sidecar.
inline void save_emb1(const std::filesystem::path& path, const EmbeddingMatrix& emb) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.write("EMB1", 4);
  detail::write_u32_le(out, static_cast<std::uint32_t>(emb.n()));
  detail::write_u32_le(out, static_cast<std::uint32_t>(emb.d()));
  for (std::size_t i = 0; i < emb.n(); ++i) {
    for (double v : emb.row(i)) {
      detail::write_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  std::filesystem::path manifest = path;
  manifest += ".manifest.csv";
  std::ofstream m(manifest);
  m << "index,id\n";
  for (std::size_t i = 0; i < emb.n(); ++i) m << i << ',' << emb.items()[i] << '\n';
}

inline void save_embedding_csv(const std::filesystem::path& path, const EmbeddingMatrix& emb) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "id";
  for (std::size_t k = 0; k < emb.d(); ++k) out << ",f" << k;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < emb.n(); ++i) {
    out << emb.items()[i];
    for (double v : emb.row(i)) out << ',' << v;
    out << '\n';
  }
}

/// Symmetric cosine-similarity matrix with a unit diagonal. Only the strictly
/// upper triangle is stored, as float32.
class SimilarityMatrix {
 public:
  SimilarityMatrix(std::size_t n, std::vector<float> upper) : n_(n), upper_(std::move(upper)) {
    if (upper_.size() != pair_count(n_)) throw InputError("similarity triangle has wrong length");
  }

  std::size_t n() const noexcept { return n_; }
  std::span<const float> upper() const noexcept { return upper_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return i == j ? 1.0 : static_cast<double>(upper_[triangle_index_unordered(n_, i, j)]);
  }

 private:
  std::size_t n_;
  std::vector<float> upper_;
};

/// Pairwise cosine similarities; row blocks are spread over `threads` workers.
/// Every output entry is computed independently, so results do not depend on
/// the thread count.
inline SimilarityMatrix cosine_similarities(const EmbeddingMatrix& emb, unsigned threads = 1) {
  const std::size_t n = emb.n();
  const std::size_t d = emb.d();
  std::vector<float> upper(pair_count(n));

  auto fill_rows = [&](std::size_t worker, std::size_t workers) {
    // Interleaved rows balance the shrinking triangle rows across workers.
    for (std::size_t i = worker; i < n; i += workers) {
      const auto a = emb.unit_row(i);
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto b = emb.unit_row(j);
        double dot = 0.0;
        for (std::size_t k = 0; k < d; ++k) dot += a[k] * b[k];
        upper[triangle_index(n, i, j)] = static_cast<float>(std::clamp(dot, -1.0, 1.0));
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (workers == 1) {
    fill_rows(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(fill_rows, w, workers);
  }
  return SimilarityMatrix(n, std::move(upper));
}

struct DistributionStats {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  std::vector<std::size_t> histogram;  // equal-width bins over [-1, 1]
};

/// Statistics of the off-diagonal similarities (self-pairs excluded).
inline DistributionStats distribution_stats(const SimilarityMatrix& sim, std::size_t bins) {
  if (sim.n() < 2) throw InputError("distribution statistics need at least 2 items");
  if (bins == 0) throw InputError("histogram needs at least one bin");

  const auto values = sim.upper();
  DistributionStats s;
  s.histogram.assign(bins, 0);
  s.min = values[0];
  s.max = values[0];
  double sum = 0.0;
  for (float f : values) {
    const double v = f;
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    auto bin = static_cast<std::ptrdiff_t>(std::floor((v + 1.0) / 2.0 * static_cast<double>(bins)));
    bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++s.histogram[static_cast<std::size_t>(bin)];
  }
  const auto count = static_cast<double>(values.size());
  s.mean = sum / count;
  double sq = 0.0;
  for (float f : values) sq += (f - s.mean) * (f - s.mean);
  s.std = std::sqrt(sq / count);

  std::vector<float> sorted(values.begin(), values.end());
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  s.median = sorted[mid];
  if (sorted.size() % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
    s.median = (lower + s.median) / 2.0;
  }
  return s;
}

}  // namespace mcc
