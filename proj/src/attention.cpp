// SPDX-License-Identifier: Apache-2.0
#include "attndse/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "attndse/error.hpp"
#include "attndse/kernels.hpp"

namespace adse {
namespace {

// Unmasked columns of every row, flattened; identical for all sequences and
// heads.
struct Band {
  std::vector<std::size_t> row_start;  // n + 1 offsets into cols
  std::vector<std::size_t> cols;
};

Band make_band(std::size_t n, std::size_t window) {
  Band b;
  b.row_start.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      for (std::size_t j = 0; j < n; ++j) b.cols.push_back(j);
    } else {
      const std::size_t r = window / 2;
      b.cols.push_back(0);
      const std::size_t lo = i > r ? std::max<std::size_t>(1, i - r) : 1;
      const std::size_t hi = std::min(n - 1, i + r);
      for (std::size_t j = lo; j <= hi; ++j) b.cols.push_back(j);
    }
    b.row_start.push_back(b.cols.size());
  }
  return b;
}

}  // namespace

bool attends(std::size_t i, std::size_t j, std::size_t window) {
  if (i == 0 || j == 0) return true;
  const std::size_t d = i > j ? i - j : j - i;
  return d <= window / 2;
}

std::vector<double> AttentionHeatmap::parameter_column_sums() const {
  std::vector<double> sums(n > 0 ? n - 1 : 0, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j) sums[j - 1] += at(i, j);
  return sums;
}

Var windowed_attention(Tape& tape, Var q, Var k, Var v, std::size_t seq_len, std::size_t heads,
                       std::size_t window, AttentionStats* stats,
                       std::vector<AttentionHeatmap>* heatmaps, int heatmap_head) {
  const Tensor& qv = tape.value(q);
  const Tensor& kv = tape.value(k);
  const Tensor& vv = tape.value(v);
  if (!qv.same_shape(kv) || !qv.same_shape(vv) || qv.rank() != 2)
    throw std::invalid_argument("windowed_attention: q, k, v must be equal rank-2 shapes");
  const std::size_t n = seq_len;
  const std::size_t d = qv.cols();
  if (n == 0 || qv.rows() % n != 0)
    throw std::invalid_argument("windowed_attention: rows not a multiple of the sequence length");
  if (heads == 0 || d % heads != 0)
    throw std::invalid_argument("windowed_attention: width not divisible by the head count");
  if (heatmap_head >= 0 && static_cast<std::size_t>(heatmap_head) >= heads)
    throw std::invalid_argument("windowed_attention: heatmap head out of range");
  const std::size_t batch = qv.rows() / n;
  const std::size_t dh = d / heads;
  const double inv = 1.0 / std::sqrt(static_cast<double>(dh));

  Band band = make_band(n, window);
  const std::size_t per_head = band.cols.size();
  std::vector<double> probs(batch * heads * per_head);
  Tensor out({batch * n, d});
  const auto& kt = kernels::active();
  const double* Q = qv.data().data();
  const double* K = kv.data().data();
  const double* V = vv.data().data();
  double* O = out.data().data();

  if (heatmaps) heatmaps->assign(batch, AttentionHeatmap{n, std::vector<double>(n * n, 0.0)});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      double* p = probs.data() + (b * heads + h) * per_head;
      for (std::size_t i = 0; i < n; ++i) {
        const double* qi = Q + (b * n + i) * d + h * dh;
        const std::size_t s0 = band.row_start[i], s1 = band.row_start[i + 1];
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t e = s0; e < s1; ++e) {
          p[e] = kt.dot(dh, qi, K + (b * n + band.cols[e]) * d + h * dh) * inv;
          if (std::isnan(p[e])) throw NumericalError("windowed_attention: NaN score");
          mx = std::max(mx, p[e]);
        }
        double total = 0.0;
        for (std::size_t e = s0; e < s1; ++e) {
          p[e] = std::exp(p[e] - mx);
          total += p[e];
        }
        double* oi = O + (b * n + i) * d + h * dh;
        for (std::size_t e = s0; e < s1; ++e) {
          p[e] /= total;
          kt.axpy(dh, p[e], V + (b * n + band.cols[e]) * d + h * dh, oi);
        }
        if (heatmaps && heatmap_head < 0) {
          auto& w = (*heatmaps)[b].weights;
          for (std::size_t e = s0; e < s1; ++e) w[i * n + band.cols[e]] += p[e] / static_cast<double>(heads);
        } else if (heatmaps && static_cast<std::size_t>(heatmap_head) == h) {
          auto& w = (*heatmaps)[b].weights;
          for (std::size_t e = s0; e < s1; ++e) w[i * n + band.cols[e]] = p[e];
        }
      }
    }
  }
  if (stats) {
    stats->pairs += batch * heads * per_head;
    stats->multiply_adds += 2 * batch * heads * per_head * dh;
  }

  return tape.record(
      std::move(out), {q, k, v},
      [q, k, v, n, d, dh, heads, batch, inv, per_head, band = std::move(band),
       probs = std::move(probs)](Tape& t, std::uint32_t self) {
        const auto& kt = kernels::active();
        const double* G = t.grad(Var{self}).data();
        const double* Q = t.value(q).data().data();
        const double* K = t.value(k).data().data();
        const double* V = t.value(v).data().data();
        double* gQ = t.grad(q).data();
        double* gK = t.grad(k).data();
        double* gV = t.grad(v).data();
        std::vector<double> dp(n);
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t h = 0; h < heads; ++h) {
            const double* p = probs.data() + (b * heads + h) * per_head;
            for (std::size_t i = 0; i < n; ++i) {
              const std::size_t row_i = (b * n + i) * d + h * dh;
              const double* gi = G + row_i;
              const std::size_t s0 = band.row_start[i], s1 = band.row_start[i + 1];
              double inner = 0.0;
              for (std::size_t e = s0; e < s1; ++e) {
                const std::size_t row_j = (b * n + band.cols[e]) * d + h * dh;
                dp[e - s0] = kt.dot(dh, gi, V + row_j);
                kt.axpy(dh, p[e], gi, gV + row_j);
                inner += p[e] * dp[e - s0];
              }
              for (std::size_t e = s0; e < s1; ++e) {
                const std::size_t row_j = (b * n + band.cols[e]) * d + h * dh;
                const double ds = p[e] * (dp[e - s0] - inner) * inv;
                kt.axpy(dh, ds, K + row_j, gQ + row_i);
                kt.axpy(dh, ds, Q + row_i, gK + row_j);
              }
            }
          }
        }
      },
      "windowed_attention");
}

}  // namespace adse
