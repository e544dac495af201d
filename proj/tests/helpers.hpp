#ifndef JPSN_TESTS_HELPERS_HPP
#define JPSN_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "jpsn/rng.hpp"

namespace jpsn::test {

// Kolmogorov asymptotic tail probability, Q_KS(lambda) = 2 sum (-1)^{j-1}
// exp(-2 j^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  double total = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    total += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * total, 0.0, 1.0);
}

/// One-sample KS p-value against a CDF.
inline double ks_test(std::vector<double> x,
                      const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max(d, std::fabs(f - i / n));
    d = std::max(d, std::fabs((i + 1) / n - f));
  }
  const double sn = std::sqrt(n);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

/// Two-sample KS p-value.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
}

/// Chi-squared histogram test of samples in [lo, hi) against a density;
/// returns the statistic. Compare against a critical value for bins-1 dof.
inline double chi2_statistic(const std::vector<double>& samples, double lo,
                             double hi, int bins,
                             const std::function<double(double)>& density) {
  std::vector<double> counts(bins, 0.0);
  int inside = 0;
  for (double v : samples) {
    if (v < lo || v >= hi) continue;
    const int b = std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
    counts[b] += 1.0;
    ++inside;
  }
  const double width = (hi - lo) / bins;
  double stat = 0.0;
  for (int b = 0; b < bins; ++b) {
    // expected mass by midpoint Simpson over the bin
    const double a = lo + b * width;
    const double m = a + 0.5 * width;
    const double e = (density(a) + 4.0 * density(m) + density(a + width)) / 6.0 *
                     width * inside;
    stat += (counts[b] - e) * (counts[b] - e) / std::max(e, 1e-12);
  }
  return stat;
}

// 99% quantiles of the chi-squared distribution for the dofs used in tests.
inline double chi2_crit99(int dof) {
  switch (dof) {
    case 9: return 21.666;
    case 19: return 36.191;
    case 29: return 49.588;
    case 39: return 62.428;
    case 49: return 74.919;
    default: break;
  }
  // Wilson-Hilferty approximation for other dofs.
  const double z = 2.3263478740408408;
  const double t = 1.0 - 2.0 / (9.0 * dof) + z * std::sqrt(2.0 / (9.0 * dof));
  return dof * t * t * t;
}

/// Mann-Kendall two-sided trend z-statistic.
inline double mann_kendall_z(const std::vector<double>& x) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  long long s = 0;
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t j = i + 1; j < n; ++j)
      s += (x[j] > x[i]) - (x[j] < x[i]);
  const double var = n * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
  if (s > 0) return (s - 1) / std::sqrt(var);
  if (s < 0) return (s + 1) / std::sqrt(var);
  return 0.0;
}

/// Adjusted Rand index between two labelings.
inline double adjusted_rand_index(const std::vector<int>& a,
                                  const std::vector<int>& b) {
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<std::vector<long long>> table(ka, std::vector<long long>(kb, 0));
  for (std::size_t i = 0; i < a.size(); ++i) table[a[i]][b[i]] += 1;
  auto choose2 = [](long long m) { return m * (m - 1) / 2.0; };
  double sum_cells = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (int i = 0; i < ka; ++i) {
    long long row = 0;
    for (int j = 0; j < kb; ++j) {
      sum_cells += choose2(table[i][j]);
      row += table[i][j];
    }
    sum_a += choose2(row);
  }
  for (int j = 0; j < kb; ++j) {
    long long col = 0;
    for (int i = 0; i < ka; ++i) col += table[i][j];
    sum_b += choose2(col);
  }
  const double total = choose2(static_cast<long long>(a.size()));
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  return (sum_cells - expected) / (max_index - expected);
}

inline double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

inline double var_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double v = 0.0;
  for (double xi : x) v += (xi - m) * (xi - m);
  return v / (x.size() - 1);
}

/// Standard error of the mean of an autocorrelated series via batch means.
inline double batch_means_se(const std::vector<double>& x, int batches = 40) {
  const std::size_t len = x.size() / batches;
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    double m = 0.0;
    for (std::size_t i = 0; i < len; ++i) m += x[b * len + i];
    means.push_back(m / len);
  }
  return std::sqrt(var_of(means) / batches);
}

}  // namespace jpsn::test

#endif
