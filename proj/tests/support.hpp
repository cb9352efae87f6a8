#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cpdkit/quadform.hpp"
#include "cpdkit/rng.hpp"

namespace cpdkit::testing {

inline double uniform(SplitMixStream& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform01();
}

// Symmetric matrix with entries uniform in [lo, hi].
inline SymmetricMatrix random_symmetric(std::size_t n, SplitMixStream& rng, double lo = -2.0,
                                        double hi = 2.0) {
  SymmetricMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) a.set(i, j, uniform(rng, lo, hi));
  }
  return a;
}

inline SymmetricMatrix random_integer_symmetric(std::size_t n, SplitMixStream& rng, int bound) {
  SymmetricMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      a.set(i, j, static_cast<double>(static_cast<int>(rng.below(2 * bound + 1)) - bound));
    }
  }
  return a;
}

inline RowMatrix random_square(std::size_t n, SplitMixStream& rng, double lo = -2.0,
                               double hi = 2.0) {
  RowMatrix c(n, std::vector<double>(n));
  for (auto& row : c) {
    for (auto& v : row) v = uniform(rng, lo, hi);
  }
  return c;
}

// A^T A for a random k x n matrix A.
inline SymmetricMatrix random_gram(std::size_t n, std::size_t k, SplitMixStream& rng) {
  const auto a = random_square(std::max(n, k), rng, -1.0, 1.0);
  SymmetricMatrix g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < k; ++r) s += a[r][i] * a[r][j];
      g.set(i, j, s);
    }
  }
  return g;
}

inline std::vector<int> sign_bits(std::uint64_t code, std::size_t n) {
  std::vector<int> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (code >> i) & 1 ? -1 : 1;
  return x;
}

// Brute force over all 2^n sign vectors, no symmetry reduction.
inline double brute_hypercube_min(const SymmetricMatrix& a) {
  const std::size_t n = a.size();
  double best = 1e300;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    best = std::min(best, qf_value(a, sign_bits(code, n)));
  }
  return best;
}

}  // namespace cpdkit::testing
