// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "attndse/tape.hpp"

namespace adse {

// Sequence position 0 is the prediction token; positions 1..L hold the
// serialized parameters. The token attends to and is attended by every
// position; parameter i attends to parameter j when |i - j| <= window / 2.
bool attends(std::size_t i, std::size_t j, std::size_t window);

// (L+1) x (L+1) attention probabilities of one sequence, averaged over
// heads. Masked entries are exactly zero.
struct AttentionHeatmap {
  std::size_t n = 0;
  std::vector<double> weights;  // row-major n x n

  double at(std::size_t i, std::size_t j) const { return weights[i * n + j]; }
  // Column sums over parameter columns 1..L, indexed by serialized position
  // minus one.
  std::vector<double> parameter_column_sums() const;
};

// Cost counters of the attention op: query/key pairs scored and the
// multiply-adds spent on scores and weighted values.
struct AttentionStats {
  std::uint64_t pairs = 0;
  std::uint64_t multiply_adds = 0;
};

// Multi-head scaled dot-product attention over `batch` stacked sequences of
// `seq_len` rows each. q, k, v are [(batch * seq_len) x d] with heads taking
// consecutive column blocks of d / heads. Only unmasked pairs are scored and
// stored. When `heatmaps` is given it receives one map per sequence: the
// mean over heads, or head `heatmap_head` when that is non-negative.
Var windowed_attention(Tape& tape, Var q, Var k, Var v, std::size_t seq_len, std::size_t heads,
                       std::size_t window, AttentionStats* stats = nullptr,
                       std::vector<AttentionHeatmap>* heatmaps = nullptr, int heatmap_head = -1);

}  // namespace adse
