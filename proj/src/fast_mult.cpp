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

#include "treeshap_hd/fast_mult.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "treeshap_hd/errors.hpp"

namespace treeshap_hd {
namespace {

// Low-bit passes run block by block so each block stays in L1. Every
// element still sees its additions in ascending bit order, so the result is
// bit-identical to the plain pass-by-pass loop.
constexpr int kBlockBits = 11;
// Bits below this are finished segment by segment while a segment of every
// operand (2^15 doubles each) stays in L2; only the bits above it sweep the
// whole vector.
constexpr int kSegmentBits = 15;

void zeta_passes(double* v, std::size_t begin, std::size_t end, int first_bit, int last_bit,
                 std::uint64_t& adds) {
  for (int bit = first_bit; bit < last_bit; ++bit) {
    const std::size_t step = std::size_t{1} << bit;
    for (std::size_t base = begin; base < end; base += 2 * step) {
      double* lo = v + base;
      double* hi = lo + step;
      for (std::size_t i = 0; i < step; ++i) hi[i] += lo[i];
      adds += step;
    }
  }
}

void zeta_two_bits(double* v, std::size_t n, int bit, std::uint64_t& adds) {
  const std::size_t s = std::size_t{1} << bit;
  for (std::size_t base = 0; base < n; base += 4 * s) {
    double* p0 = v + base;
    double* p1 = p0 + s;
    double* p2 = p1 + s;
    double* p3 = p2 + s;
    for (std::size_t i = 0; i < s; ++i) {
      const double a0 = p0[i];
      const double a1 = p1[i] + a0;
      const double a2 = p2[i];
      const double a3 = p3[i] + a2;
      p1[i] = a1;
      p2[i] = a2 + a0;
      p3[i] = a3 + a1;
    }
  }
  adds += 2 * (n / 2);
}

// High bits go three at a time: each group of eight strided elements is
// loaded once and updated in registers, bit by bit in ascending order.
// Leftover bits are taken in pairs where possible.
void zeta_high_bits(double* v, std::size_t n, int first_bit, int last_bit, std::uint64_t& adds) {
  int bit = first_bit;
  while (last_bit - bit >= 3 && last_bit - bit != 4) {
    const std::size_t s = std::size_t{1} << bit;
    for (std::size_t base = 0; base < n; base += 8 * s) {
      double* p0 = v + base;
      double* p1 = p0 + s;
      double* p2 = p1 + s;
      double* p3 = p2 + s;
      double* p4 = p3 + s;
      double* p5 = p4 + s;
      double* p6 = p5 + s;
      double* p7 = p6 + s;
      for (std::size_t i = 0; i < s; ++i) {
        const double a0 = p0[i];
        const double a1 = p1[i] + a0;
        const double a2 = p2[i];
        const double a3 = p3[i] + a2;
        const double a4 = p4[i];
        const double a5 = p5[i] + a4;
        const double a6 = p6[i];
        const double a7 = p7[i] + a6;
        const double b2 = a2 + a0;
        const double b3 = a3 + a1;
        const double b6 = a6 + a4;
        const double b7 = a7 + a5;
        p1[i] = a1;
        p2[i] = b2;
        p3[i] = b3;
        p4[i] = a4 + a0;
        p5[i] = a5 + a1;
        p6[i] = b6 + b2;
        p7[i] = b7 + b3;
      }
    }
    adds += 3 * (n / 2);
    bit += 3;
  }
  for (; last_bit - bit >= 2; bit += 2) zeta_two_bits(v, n, bit, adds);
  zeta_passes(v, 0, n, bit, last_bit, adds);
}

std::vector<double> mv_rec(const DenseMatrix& m, std::size_t r0, std::size_t c0, std::size_t n,
                           std::span<const double> v, bool check) {
  if (n == 1) return {m.at(r0, c0) * v[0]};
  const std::size_t h = n / 2;
  if (check) {
    const double tol = 1e-9;
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < h; ++j) {
        const double q00 = m.at(r0 + i, c0 + j);
        const double q01 = m.at(r0 + i, c0 + h + j);
        const double q10 = m.at(r0 + h + i, c0 + j);
        const double q11 = m.at(r0 + h + i, c0 + h + j);
        const double scale = 1.0 + std::max({std::fabs(q01), std::fabs(q10), std::fabs(q11)});
        if (std::fabs(q00) > tol * scale || std::fabs(q11 - q01 - q10) > tol * scale) {
          throw StructureError("mv_recursive: quadrant identities violated at block (" +
                               std::to_string(r0) + ", " + std::to_string(c0) + ")");
        }
      }
    }
  }
  std::vector<double> sum(h);
  for (std::size_t i = 0; i < h; ++i) sum[i] = v[i] + v[h + i];
  std::vector<double> top = mv_rec(m, r0, c0 + h, h, v.subspan(h, h), check);
  std::vector<double> bottom = mv_rec(m, r0 + h, c0, h, sum, check);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < h; ++i) {
    out[i] = top[i];
    out[h + i] = top[i] + bottom[i];
  }
  return out;
}

}  // namespace

int log2_length(std::size_t n) {
  if (n == 0 || !std::has_single_bit(n)) {
    throw LengthError("vector length " + std::to_string(n) + " is not a power of two");
  }
  return std::countr_zero(n);
}

void subset_zeta_inplace(std::span<double> v, OpCounts* counts) {
  const int k = log2_length(v.size());
  const int low = std::min(k, kBlockBits);
  const int mid = std::min(k, kSegmentBits);
  const std::size_t block = std::size_t{1} << low;
  const std::size_t segment = std::size_t{1} << mid;
  std::uint64_t adds = 0;
  for (std::size_t seg = 0; seg < v.size(); seg += segment) {
    for (std::size_t begin = seg; begin < seg + segment; begin += block) {
      zeta_passes(v.data(), begin, begin + block, 0, low, adds);
    }
    zeta_high_bits(v.data() + seg, segment, low, mid, adds);
  }
  zeta_high_bits(v.data(), v.size(), mid, k, adds);
  if (counts) counts->adds += adds;
}

std::vector<double> subset_zeta(std::span<const double> v, OpCounts* counts) {
  std::vector<double> out(v.begin(), v.end());
  subset_zeta_inplace(out, counts);
  return out;
}

std::vector<double> strassen_like_mult(std::span<const double> diag, std::span<const double> f,
                                       OpCounts* counts) {
  if (diag.size() != f.size()) {
    throw LengthError("strassen_like_mult: diagonal length " + std::to_string(diag.size()) +
                      " != vector length " + std::to_string(f.size()));
  }
  SharedDownwardPass pass(f, counts);
  std::vector<double> out(f.size());
  pass.multiply(diag, out, counts);
  return out;
}

SharedDownwardPass::SharedDownwardPass(std::span<const double> f, OpCounts* counts) {
  reset(f, counts);
}

void SharedDownwardPass::reset(std::span<const double> f, OpCounts* counts) {
  log2_length(f.size());
  downward_.resize(f.size());
  std::reverse_copy(f.begin(), f.end(), downward_.begin());
  subset_zeta_inplace(downward_, counts);
}

void SharedDownwardPass::multiply(std::span<const double> diag, std::span<double> out,
                                  OpCounts* counts) const {
  if (diag.size() != downward_.size() || out.size() != downward_.size()) {
    throw LengthError("strassen_like_mult: length mismatch");
  }
  // The product is formed block by block and its low-bit passes run while
  // the block is still in L1.
  const std::size_t n = diag.size();
  const int k = log2_length(n);
  const int low = std::min(k, kBlockBits);
  const int mid = std::min(k, kSegmentBits);
  const std::size_t block = std::size_t{1} << low;
  const std::size_t segment = std::size_t{1} << mid;
  std::uint64_t adds = 0;
  for (std::size_t seg = 0; seg < n; seg += segment) {
    for (std::size_t begin = seg; begin < seg + segment; begin += block) {
      for (std::size_t a = begin; a < begin + block; ++a) out[a] = diag[a] * downward_[a];
      // The next block's operands load while this block's passes run.
      if (begin + 2 * block <= n) {
        for (std::size_t a = begin + block; a < begin + 2 * block; a += 8) {
          __builtin_prefetch(diag.data() + a, 0, 2);
          __builtin_prefetch(downward_.data() + a, 0, 2);
        }
      }
      zeta_passes(out.data(), begin, begin + block, 0, low, adds);
    }
    zeta_high_bits(out.data() + seg, segment, low, mid, adds);
  }
  zeta_high_bits(out.data(), n, mid, k, adds);
  if (counts) {
    counts->muls += n;
    counts->adds += adds;
  }
}

std::vector<double> mv_recursive(const DenseMatrix& m, std::span<const double> v,
                                 bool check_structure) {
  if (m.n != v.size()) throw LengthError("mv_recursive: size mismatch");
  log2_length(m.n);
  return mv_rec(m, 0, 0, m.n, v, check_structure);
}

std::vector<double> dense_mv(const DenseMatrix& m, std::span<const double> v) {
  if (m.n != v.size()) throw LengthError("dense_mv: size mismatch");
  std::vector<double> out(m.n, 0.0);
  for (std::size_t r = 0; r < m.n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.n; ++c) s += m.at(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

DenseMatrix reconstruct_dense(std::span<const double> diag) {
  const int k = log2_length(diag.size());
  if (k > kMaxDenseK) {
    throw SizeError("reconstruct_dense: k = " + std::to_string(k) + " exceeds " +
                    std::to_string(kMaxDenseK));
  }
  const std::size_t n = diag.size();
  const std::size_t full = n - 1;
  DenseMatrix m(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if ((a | b) != full) continue;
      const std::size_t forced = a & ~b;
      const std::size_t free = a & b;
      double sum = 0.0;
      for (std::size_t s = free;; s = (s - 1) & free) {
        sum += diag[forced | s];
        if (s == 0) break;
      }
      m.at(a, b) = sum;
    }
  }
  return m;
}

double max_quadrant_violation(const DenseMatrix& m) {
  log2_length(m.n);
  double worst = 0.0;
  for (std::size_t size = m.n; size >= 2; size /= 2) {
    const std::size_t h = size / 2;
    for (std::size_t r0 = 0; r0 < m.n; r0 += size) {
      for (std::size_t c0 = 0; c0 < m.n; c0 += size) {
        for (std::size_t i = 0; i < h; ++i) {
          for (std::size_t j = 0; j < h; ++j) {
            const double q00 = m.at(r0 + i, c0 + j);
            const double q01 = m.at(r0 + i, c0 + h + j);
            const double q10 = m.at(r0 + h + i, c0 + j);
            const double q11 = m.at(r0 + h + i, c0 + h + j);
            worst = std::max({worst, std::fabs(q00), std::fabs(q11 - q01 - q10)});
          }
        }
      }
    }
  }
  return worst;
}

double max_off_pattern_magnitude(const DenseMatrix& m) {
  const std::size_t full = m.n - 1;
  double worst = 0.0;
  for (std::size_t a = 0; a < m.n; ++a) {
    for (std::size_t b = 0; b < m.n; ++b) {
      if ((a | b) != full) worst = std::max(worst, std::fabs(m.at(a, b)));
    }
  }
  return worst;
}

}  // namespace treeshap_hd
