/*
 * Copyright 2026 The treeshap-hd Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "treeshap_hd/diagonal_cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "treeshap_hd/errors.hpp"

namespace treeshap_hd {
namespace {

constexpr char kMagic[8] = {'T', 'S', 'H', 'D', 'D', 'I', 'A', 'G'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ParseError("diagonal cache: truncated file");
  return to_little(v);
}

}  // namespace

int DiagonalCache::slots_for(Functional functional, int k) {
  return functional == Functional::kShapleyInteraction ? k * (k - 1) / 2 : k;
}

std::size_t DiagonalCache::entries_for(Functional functional, int max_k) {
  std::size_t total = 0;
  for (int k = 1; k <= max_k; ++k) {
    total += static_cast<std::size_t>(slots_for(functional, k)) << k;
  }
  return total;
}

int DiagonalCache::pair_slot(int k, int i, int j) {
  if (i == j) throw InvalidPairError("pair slot needs distinct positions");
  if (i > j) std::swap(i, j);
  return i * (2 * k - i - 1) / 2 + (j - i - 1);
}

DiagonalCache::DiagonalCache(int max_k, Functional functional)
    : max_k_(max_k), functional_(functional), block_offsets_(static_cast<std::size_t>(max_k) + 2, 0) {
  std::size_t offset = 0;
  for (int k = 1; k <= max_k; ++k) {
    block_offsets_[static_cast<std::size_t>(k)] = offset;
    offset += static_cast<std::size_t>(slots_for(functional, k)) << k;
  }
  block_offsets_[static_cast<std::size_t>(max_k) + 1] = offset;
  data_.assign(offset, 0.0);
}

std::size_t DiagonalCache::offset(int k, int slot) const {
  if (k < 1 || k > max_k_ || slot < 0 || slot >= slots(k)) {
    throw LengthError("diagonal cache: no vector for k=" + std::to_string(k) +
                      " slot=" + std::to_string(slot));
  }
  return block_offsets_[static_cast<std::size_t>(k)] + (static_cast<std::size_t>(slot) << k);
}

std::span<const double> DiagonalCache::vector(int k, int slot) const {
  return {data_.data() + offset(k, slot), std::size_t{1} << k};
}

std::span<double> DiagonalCache::vector(int k, int slot) {
  return {data_.data() + offset(k, slot), std::size_t{1} << k};
}

void DiagonalCache::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("diagonal cache: cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  write_le<std::uint32_t>(out, kVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(max_k_));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(functional_));
  for (double v : data_) write_le<double>(out, v);
}

DiagonalCache DiagonalCache::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("diagonal cache: cannot open " + path);
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("diagonal cache: bad magic");
  }
  if (read_le<std::uint32_t>(in) != kVersion) throw ParseError("diagonal cache: unknown version");
  const auto max_k = read_le<std::uint32_t>(in);
  const auto kind = read_le<std::uint32_t>(in);
  if (max_k > static_cast<std::uint32_t>(kMaxDiagonalK) || kind > 2) {
    throw ParseError("diagonal cache: bad header");
  }
  DiagonalCache cache(static_cast<int>(max_k), static_cast<Functional>(kind));
  for (double& v : cache.data_) v = read_le<double>(in);
  return cache;
}

DiagonalCache compute_ms(int max_k, Functional functional, std::size_t byte_budget) {
  if (max_k < 0 || max_k > kMaxDiagonalK) {
    throw DepthCapError("compute_ms: depth " + std::to_string(max_k) + " outside [0, " +
                        std::to_string(kMaxDiagonalK) + "]");
  }
  const std::size_t bytes = DiagonalCache::entries_for(functional, max_k) * sizeof(double);
  if (bytes > byte_budget) {
    throw OutOfMemoryBudget("diagonal cache for depth " + std::to_string(max_k) + " needs " +
                            std::to_string(bytes) + " bytes, budget is " +
                            std::to_string(byte_budget));
  }
  DiagonalCache cache(max_k, functional);
  for (int k = 1; k <= max_k; ++k) {
    const std::vector<Cube> diagonal = cubes_in_diagonal(k);
    if (functional == Functional::kShapleyInteraction) {
      for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
          auto out = cache.vector(k, DiagonalCache::pair_slot(k, i, j));
          for (std::size_t a = 0; a < diagonal.size(); ++a) {
            out[a] = shapley_interaction_of_cube(diagonal[a], i, j);
          }
        }
      }
    } else {
      for (int i = 0; i < k; ++i) {
        auto out = cache.vector(k, i);
        for (std::size_t a = 0; a < diagonal.size(); ++a) {
          out[a] = functional_of_cube(functional, diagonal[a], i);
        }
      }
    }
  }
  return cache;
}

}  // namespace treeshap_hd
