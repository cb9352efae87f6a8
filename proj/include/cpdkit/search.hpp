#pragma once

// Quadratic-form optimization over the symmetric binary hypercube and the
// bounded symmetric lattice: serial sign dynamics, coordinate descent and
// exhaustive oracles.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cpdkit/quadform.hpp"

namespace cpdkit {

inline constexpr std::size_t kDefaultHypercubeCap = 24;
inline constexpr std::uint64_t kDefaultLatticeCap = std::uint64_t{1} << 24;

template <typename Point>
struct SearchResult {
  Point best_point;
  double best_value = 0.0;  // form value at best_point (no trace offset on the hypercube)
  int sweeps_used = 0;
  std::vector<double> energy_trace;  // value after each accepted change
};

template <typename Point>
struct EnumerationResult {
  double min_value = 0.0;
  std::vector<Point> argmin_set;  // canonical representatives (leading component > 0)
  std::uint64_t count_enumerated = 0;
  bool argmin_truncated = false;
};

enum class SweepOrder {
  ascending,
  random_permutation,  // reshuffled each sweep from SearchOptions::order_seed
};

struct SearchOptions {
  int max_sweeps = 1000;
  SweepOrder order = SweepOrder::ascending;
  std::uint64_t order_seed = 0;
};

struct EnumerationOptions {
  std::size_t hypercube_cap = kDefaultHypercubeCap;
  std::uint64_t lattice_cap = kDefaultLatticeCap;
  std::size_t argmin_limit = std::size_t{1} << 16;
};

// Energy change from flipping x_i: -4 x_i (E x)_i.
double flip_gain(const SymmetricSplit& e, const SignVector& x, std::size_t i);

struct SweepOutcome {
  SignVector x;
  bool changed = false;
};

// One serial pass x_i <- -sign((E x)_i); zero field keeps x_i.
SweepOutcome anti_stable_sweep(const SymmetricSplit& e, SignVector x);
// Mirror pass x_i <- sign((E x)_i).
SweepOutcome stable_sweep(const SymmetricSplit& e, SignVector x);

SearchResult<SignVector> run_anti_stable(const SymmetricSplit& e, SignVector x0,
                                         const SearchOptions& options = {});
SearchResult<SignVector> run_anti_stable(const SymmetricSplit& e, std::uint64_t seed,
                                         const SearchOptions& options = {});
SearchResult<SignVector> run_stable(const SymmetricSplit& e, SignVector x0,
                                    const SearchOptions& options = {});
SearchResult<SignVector> run_stable(const SymmetricSplit& e, std::uint64_t seed,
                                    const SearchOptions& options = {});

bool is_anti_stable(const SymmetricSplit& e, const SignVector& x);
bool is_stable(const SymmetricSplit& e, const SignVector& x);

SignVector random_sign_vector(std::size_t n, std::uint64_t seed);
LatticeVector random_lattice_vector(std::size_t n, int m_bound, std::uint64_t seed);

/// Multi-start serial dynamics. Start k begins at a uniform sign vector drawn
/// from substream k of `seed`; the reduction keeps the smallest value (largest
/// for maximize), then the lexicographically smallest canonical point, so the
/// result does not depend on `threads`.
SearchResult<SignVector> multi_start_anti_stable(const SymmetricSplit& e, std::size_t starts,
                                                 std::uint64_t seed, unsigned threads = 1,
                                                 const SearchOptions& options = {});
SearchResult<SignVector> multi_start_stable(const SymmetricSplit& e, std::size_t starts,
                                            std::uint64_t seed, unsigned threads = 1,
                                            const SearchOptions& options = {});

EnumerationResult<SignVector> enumerate_hypercube_min(const SymmetricMatrix& c,
                                                      const EnumerationOptions& options = {});
inline EnumerationResult<SignVector> enumerate_hypercube_min(
    const SymmetricSplit& e, const EnumerationOptions& options = {}) {
  return enumerate_hypercube_min(e.e, options);
}

// Every anti-stable representative, in Gray-code visiting order.
std::vector<SignVector> enumerate_anti_stable(const SymmetricSplit& e,
                                              const EnumerationOptions& options = {});

/// Serial coordinate descent on the full form x^T d x over the lattice.
/// Component i moves to the best value in {+-1..+-M} only on strict
/// improvement; ties prefer the current value, then smaller |v|, then v > 0.
SearchResult<LatticeVector> lattice_descent(const SymmetricMatrix& d, int m_bound,
                                            LatticeVector x0, const SearchOptions& options = {});
SearchResult<LatticeVector> lattice_descent(const SymmetricMatrix& d, int m_bound,
                                            std::uint64_t seed, const SearchOptions& options = {});

EnumerationResult<LatticeVector> enumerate_lattice_min(const SymmetricMatrix& d, int m_bound,
                                                       const EnumerationOptions& options = {});

}  // namespace cpdkit
