// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>

namespace adse::kernels {

// Dense double-precision inner loops used by the tensor tape and the
// attention op. Every variant follows the summation order of the scalar
// reference exactly, so all variants produce bit-identical results:
//
//  * row-update kernels (axpy, gemm_nn, gemm_tn) accumulate column-wise,
//    one multiply and one add per element, in increasing reduction index;
//  * reduction kernels (dot, gemm_nt) keep four interleaved partial sums
//    (lane l accumulates elements l, l+4, l+8, ...), combine them as
//    (s0 + s1) + (s2 + s3) and then add the tail in order.
//
// Builds must not contract a*b+c into FMA (see -ffp-contract=off in CMake).

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i a[i]*b[i]
  double (*dot)(std::size_t n, const double* a, const double* b);
  // y += alpha * x
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  // C[m x n] (+)= A[m x k] * B[k x n]
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c, bool accumulate);
  // C[m x n] (+)= A[m x k] * B[n x k]^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c, bool accumulate);
  // C[m x n] (+)= A[k x m]^T * B[k x n]
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c, bool accumulate);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// Best table for this CPU, unless ATTN_DSE_SIMD=scalar forces the reference.
const KernelTable& active();
// Overrides the active table (tests and benchmarks).
void set_active(const KernelTable& table);

}  // namespace adse::kernels
