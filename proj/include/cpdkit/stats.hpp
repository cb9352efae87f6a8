#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cpdkit::stats {

// Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

// sup |F_n - F| against Exponential(rate). Sorts a copy of `samples`.
double ks_exponential(std::span<const double> samples, double rate);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic p-value
// (Stephens' small-sample correction on the effective size).
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Upper tail of the chi-square distribution.
double chi_square_survival(double x, double dof);

// Homogeneity test for a table of counts (rows = samples, cols = categories).
// Columns whose total is zero are dropped.
TestResult chi_square_homogeneity(const std::vector<std::vector<double>>& table);

double mean(std::span<const double> x);
// Unbiased sample variance.
double variance(std::span<const double> x);
double median(std::vector<double> x);
double quantile(std::vector<double> x, double q);

}  // namespace cpdkit::stats
