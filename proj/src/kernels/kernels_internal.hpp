// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "attndse/kernels.hpp"

namespace adse::kernels {

namespace scalar {
double dot(std::size_t n, const double* a, const double* b);
void axpy(std::size_t n, double alpha, const double* x, double* y);
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate);
}  // namespace scalar

// Defined only when the matching variant is compiled in.
const KernelTable* make_avx2_table();
const KernelTable* make_neon_table();

}  // namespace adse::kernels
