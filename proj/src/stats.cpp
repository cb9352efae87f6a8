#include "cpdkit/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

#include "cpdkit/error.hpp"

namespace cpdkit::stats {

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges slowly; tail is 1 to 1e-20 here
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_exponential(std::span<const double> samples, double rate) {
  if (samples.empty()) throw ValidationError("KS statistic needs at least one sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = -std::expm1(-rate * s[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ValidationError("KS two-sample test needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double root = std::sqrt(ne);
  TestResult out;
  out.statistic = d;
  out.p_value = kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
  return out;
}

double chi_square_survival(double x, double dof) {
  if (dof <= 0.0) return 1.0;
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

TestResult chi_square_homogeneity(const std::vector<std::vector<double>>& table) {
  TestResult out;
  if (table.size() < 2) return out;
  const std::size_t cols = table.front().size();
  std::vector<double> col_total(cols, 0.0);
  std::vector<double> row_total(table.size(), 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (table[r].size() != cols) throw DimensionError("ragged contingency table");
    for (std::size_t c = 0; c < cols; ++c) {
      col_total[c] += table[r][c];
      row_total[r] += table[r][c];
    }
    total += row_total[r];
  }
  if (total <= 0.0) return out;
  std::size_t used_cols = 0;
  std::size_t used_rows = 0;
  for (double t : col_total) used_cols += t > 0.0;
  for (double t : row_total) used_rows += t > 0.0;
  double chi2 = 0.0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (row_total[r] <= 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) {
      if (col_total[c] <= 0.0) continue;
      const double expected = row_total[r] * col_total[c] / total;
      const double diff = table[r][c] - expected;
      chi2 += diff * diff / expected;
    }
  }
  out.statistic = chi2;
  out.dof = (used_rows > 0 && used_cols > 0) ? (used_rows - 1) * (used_cols - 1) : 0;
  out.p_value = chi_square_survival(chi2, static_cast<double>(out.dof));
  return out;
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw ValidationError("quantile of an empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

}  // namespace cpdkit::stats
