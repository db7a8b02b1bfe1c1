#pragma once

#include <cassert>
#include <cstddef>
#include <utility>

namespace mcc {

// Number of unordered pairs {i, j}, i != j, over n items.
constexpr std::size_t pair_count(std::size_t n) noexcept {
  return n < 2 ? 0 : n * (n - 1) / 2;
}

// Flat offset of the pair (i, j), i < j, in a row-major strictly-upper
// triangle over n items.
constexpr std::size_t triangle_index(std::size_t n, std::size_t i, std::size_t j) noexcept {
  assert(i < j && j < n);
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

constexpr std::size_t triangle_index_unordered(std::size_t n, std::size_t i, std::size_t j) noexcept {
  return i < j ? triangle_index(n, i, j) : triangle_index(n, j, i);
}

}  // namespace mcc
