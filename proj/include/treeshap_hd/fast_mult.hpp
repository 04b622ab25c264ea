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

#ifndef TREESHAP_HD_FAST_MULT_HPP_
#define TREESHAP_HD_FAST_MULT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace treeshap_hd {

// Arithmetic counters for the multiplication kernels.
struct OpCounts {
  std::uint64_t adds = 0;
  std::uint64_t muls = 0;

  OpCounts& operator+=(const OpCounts& o) {
    adds += o.adds;
    muls += o.muls;
    return *this;
  }
};

// Row-major square matrix used by the reference paths and tests.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return a[r * n + c]; }
  double at(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

// Returns log2(n); throws LengthError unless n is a power of two.
int log2_length(std::size_t n);

// In place: v[x] <- sum over x' subset of x of v[x']. One pass per bit,
// lowest bit first, 2^(k-1) additions per pass.
void subset_zeta_inplace(std::span<double> v, OpCounts* counts = nullptr);
std::vector<double> subset_zeta(std::span<const double> v, OpCounts* counts = nullptr);

// M * f for the matrix whose secondary diagonal is `diag`, completed by
// M1 = 0 and M4 = M2 + M3 at every level:
//   out = zeta(diag .* zeta(g)),  g[a] = f[~a].
// Costs k * 2^k additions and 2^k multiplications.
std::vector<double> strassen_like_mult(std::span<const double> diag, std::span<const double> f,
                                       OpCounts* counts = nullptr);

// Several products against the same f share the first zeta pass.
class SharedDownwardPass {
 public:
  SharedDownwardPass() = default;
  explicit SharedDownwardPass(std::span<const double> f, OpCounts* counts = nullptr);
  void reset(std::span<const double> f, OpCounts* counts = nullptr);

  // out = zeta(diag .* zeta(g)); out must have the same length as f.
  void multiply(std::span<const double> diag, std::span<double> out,
                OpCounts* counts = nullptr) const;

  std::size_t size() const { return downward_.size(); }

 private:
  std::vector<double> downward_;
};

// Quadrant recursion: top = M[0,1] v2, bottom = top + M[1,0] (v1 + v2).
// With check_structure set (the default in debug builds) the quadrant
// identities are verified at every level and violations throw StructureError.
#ifdef NDEBUG
inline constexpr bool kCheckStructureByDefault = false;
#else
inline constexpr bool kCheckStructureByDefault = true;
#endif
std::vector<double> mv_recursive(const DenseMatrix& m, std::span<const double> v,
                                 bool check_structure = kCheckStructureByDefault);

// Plain O(n^2) product.
std::vector<double> dense_mv(const DenseMatrix& m, std::span<const double> v);

// M[a][b] = sum of diag[a'] over a' subset of a with ~a' subset of b.
// Limited to k <= 12; larger sizes raise SizeError.
DenseMatrix reconstruct_dense(std::span<const double> diag);
inline constexpr int kMaxDenseK = 12;

// Largest violation of M1 = 0 and M4 = M2 + M3 over every recursion level
// and every row/column prefix.
double max_quadrant_violation(const DenseMatrix& m);

// Largest |M[a][b]| over cells with (a | b) != all-ones.
double max_off_pattern_magnitude(const DenseMatrix& m);

}  // namespace treeshap_hd

#endif  // TREESHAP_HD_FAST_MULT_HPP_
