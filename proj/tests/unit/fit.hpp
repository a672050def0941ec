// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace adse::testing {

// Least-squares polynomial fit of the given degree; returns R^2.
inline double polyfit_r2(const std::vector<double>& x, const std::vector<double>& y, int degree) {
  const std::size_t n = x.size(), m = static_cast<std::size_t>(degree) + 1;
  if (n < m) throw std::invalid_argument("polyfit: too few points");
  // Normal equations, solved by Gaussian elimination with partial pivoting.
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) a[r][c] += std::pow(x[i], static_cast<double>(r + c));
      a[r][m] += y[i] * std::pow(x[i], static_cast<double>(r));
    }
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= m; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> coef(m);
  for (std::size_t r = 0; r < m; ++r) coef[r] = a[r][m] / a[r][r];
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double pred = 0.0;
    for (std::size_t r = 0; r < m; ++r) pred += coef[r] * std::pow(x[i], static_cast<double>(r));
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
}

}  // namespace adse::testing
