#include "cpdkit/search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "cpdkit/error.hpp"
#include "cpdkit/rng.hpp"

namespace cpdkit {

namespace {

// Components ranked 1, -1, 2, -2, ...; argmin sets are listed in that
// lexicographic order so the first entry is reproducible across methods.
int preference_rank(int v) { return 2 * (std::abs(v) - 1) + (v < 0 ? 1 : 0); }

template <typename Point>
void sort_argmins(std::vector<Point>& points) {
  std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
    return std::lexicographical_compare(
        a.values().begin(), a.values().end(), b.values().begin(), b.values().end(),
        [](int x, int y) { return preference_rank(x) < preference_rank(y); });
  });
}


constexpr std::uint64_t kResyncInterval = 4096;

void require_zero_diagonal(const SymmetricSplit& e) {
  for (std::size_t i = 0; i < e.e.size(); ++i) {
    if (e.e(i, i) != 0.0) throw ValidationError("split matrix must have a zero diagonal");
  }
}

void require_dim(const SymmetricMatrix& a, std::size_t n) {
  if (a.size() != n) throw DimensionError("vector length does not match matrix order");
}

std::vector<std::size_t> sweep_order(std::size_t n, const SearchOptions& options,
                                     SplitMixStream& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (options.order == SweepOrder::random_permutation) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }
  return order;
}

// direction = -1 for anti-stable (x_i <- -sign(h_i)), +1 for stable.
SweepOutcome signed_sweep(const SymmetricSplit& e, SignVector x, int direction,
                          std::span<const std::size_t> order, std::vector<double>* trace) {
  bool changed = false;
  for (std::size_t i : order) {
    const double h = local_field(e.e, x.values(), i);
    if (h == 0.0) continue;
    const int target = (h > 0.0 ? 1 : -1) * direction;
    if (target != x[i]) {
      x.flip(i);
      changed = true;
      if (trace) trace->push_back(qf_value(e.e, x));
    }
  }
  return {std::move(x), changed};
}

SearchResult<SignVector> run_signed(const SymmetricSplit& e, SignVector x0, int direction,
                                    const SearchOptions& options) {
  require_zero_diagonal(e);
  require_dim(e.e, x0.size());
  if (options.max_sweeps < 1) throw ValidationError("max_sweeps must be >= 1");
  SplitMixStream order_rng(options.order_seed);
  SearchResult<SignVector> result;
  SignVector x = std::move(x0);
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    const auto order = sweep_order(x.size(), options, order_rng);
    auto outcome = signed_sweep(e, std::move(x), direction, order, &result.energy_trace);
    x = std::move(outcome.x);
    if (!outcome.changed) {
      result.sweeps_used = sweep;
      result.best_value = qf_value(e.e, x);
      result.best_point = std::move(x);
      return result;
    }
  }
  throw ConvergenceError("sign dynamics did not reach a fixed point within " +
                             std::to_string(options.max_sweeps) + " sweeps",
                         std::vector<int>(x.values().begin(), x.values().end()));
}

template <typename Point>
bool better(const SearchResult<Point>& a, const SearchResult<Point>& b, bool maximize) {
  if (a.best_value != b.best_value) {
    return maximize ? a.best_value > b.best_value : a.best_value < b.best_value;
  }
  return a.best_point.canonical() < b.best_point.canonical();
}

SearchResult<SignVector> multi_start(const SymmetricSplit& e, std::size_t starts,
                                     std::uint64_t seed, unsigned threads,
                                     const SearchOptions& options, int direction) {
  if (starts == 0) throw ValidationError("at least one start is required");
  const std::size_t n = e.e.size();
  const SplitMixStream master(seed);
  std::vector<SearchResult<SignVector>> results(starts);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t k = begin; k < starts; k += stride) {
      SplitMixStream rng = master.substream(k);
      std::vector<int> bits(n);
      for (auto& b : bits) b = rng.sign();
      SearchOptions local = options;
      local.order_seed = rng();
      results[k] = run_signed(e, SignVector(std::move(bits)), direction, local);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(starts)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < starts; ++k) {
    if (better(results[k], results[best], direction > 0)) best = k;
  }
  return std::move(results[best]);
}

// Lattice component values in a fixed order: -M..-1, 1..M.
std::vector<int> lattice_values(int m_bound) {
  std::vector<int> vals;
  for (int v = -m_bound; v <= m_bound; ++v) {
    if (v != 0) vals.push_back(v);
  }
  return vals;
}

std::uint64_t checked_power(std::uint64_t base, std::size_t exp, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (total > cap / base) return cap + 1;
    total *= base;
  }
  return total;
}

double tie_slack(const SymmetricMatrix& c) {
  return 1e-9 * (1.0 + static_cast<double>(c.size() * c.size()) * c.max_abs());
}

}  // namespace

double flip_gain(const SymmetricSplit& e, const SignVector& x, std::size_t i) {
  require_dim(e.e, x.size());
  if (i >= x.size()) throw DimensionError("flip index out of range");
  return -4.0 * x[i] * local_field(e.e, x.values(), i);
}

SweepOutcome anti_stable_sweep(const SymmetricSplit& e, SignVector x) {
  require_zero_diagonal(e);
  require_dim(e.e, x.size());
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return signed_sweep(e, std::move(x), -1, order, nullptr);
}

SweepOutcome stable_sweep(const SymmetricSplit& e, SignVector x) {
  require_zero_diagonal(e);
  require_dim(e.e, x.size());
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return signed_sweep(e, std::move(x), +1, order, nullptr);
}

SearchResult<SignVector> run_anti_stable(const SymmetricSplit& e, SignVector x0,
                                         const SearchOptions& options) {
  return run_signed(e, std::move(x0), -1, options);
}

SearchResult<SignVector> run_anti_stable(const SymmetricSplit& e, std::uint64_t seed,
                                         const SearchOptions& options) {
  return run_signed(e, random_sign_vector(e.e.size(), seed), -1, options);
}

SearchResult<SignVector> run_stable(const SymmetricSplit& e, SignVector x0,
                                    const SearchOptions& options) {
  return run_signed(e, std::move(x0), +1, options);
}

SearchResult<SignVector> run_stable(const SymmetricSplit& e, std::uint64_t seed,
                                    const SearchOptions& options) {
  return run_signed(e, random_sign_vector(e.e.size(), seed), +1, options);
}

bool is_anti_stable(const SymmetricSplit& e, const SignVector& x) {
  require_dim(e.e, x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] * local_field(e.e, x.values(), i) > 0.0) return false;
  }
  return true;
}

bool is_stable(const SymmetricSplit& e, const SignVector& x) {
  require_dim(e.e, x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] * local_field(e.e, x.values(), i) < 0.0) return false;
  }
  return true;
}

SignVector random_sign_vector(std::size_t n, std::uint64_t seed) {
  SplitMixStream rng(seed);
  std::vector<int> bits(n);
  for (auto& b : bits) b = rng.sign();
  return SignVector(std::move(bits));
}

LatticeVector random_lattice_vector(std::size_t n, int m_bound, std::uint64_t seed) {
  if (m_bound < 1) throw ValidationError("lattice bound M must be >= 1");
  SplitMixStream rng(seed);
  std::vector<int> vals(n);
  for (auto& v : vals) v = rng.sign() * static_cast<int>(1 + rng.below(m_bound));
  return LatticeVector(std::move(vals), m_bound);
}

SearchResult<SignVector> multi_start_anti_stable(const SymmetricSplit& e, std::size_t starts,
                                                 std::uint64_t seed, unsigned threads,
                                                 const SearchOptions& options) {
  return multi_start(e, starts, seed, threads, options, -1);
}

SearchResult<SignVector> multi_start_stable(const SymmetricSplit& e, std::size_t starts,
                                            std::uint64_t seed, unsigned threads,
                                            const SearchOptions& options) {
  return multi_start(e, starts, seed, threads, options, +1);
}

EnumerationResult<SignVector> enumerate_hypercube_min(const SymmetricMatrix& c,
                                                      const EnumerationOptions& options) {
  const std::size_t n = c.size();
  if (n > options.hypercube_cap) {
    throw CapacityError("hypercube enumeration limited to n <= " +
                        std::to_string(options.hypercube_cap) + " (got " + std::to_string(n) +
                        "); use the anti-stable heuristic instead");
  }
  const double slack = tie_slack(c);
  std::vector<int> x(n, 1);
  std::vector<double> h(n);
  auto resync = [&] {
    for (std::size_t i = 0; i < n; ++i) h[i] = local_field(c, x, i);
  };
  resync();
  double value = qf_value(c, std::span<const int>(x));

  EnumerationResult<SignVector> out;
  out.min_value = std::numeric_limits<double>::infinity();
  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  for (std::uint64_t step = 0; step < total; ++step) {
    if (step > 0) {
      const std::size_t i = static_cast<std::size_t>(std::countr_zero(step)) + 1;
      const double xi = x[i];
      value += -4.0 * xi * (h[i] - c(i, i) * xi);
      x[i] = -x[i];
      for (std::size_t k = 0; k < n; ++k) h[k] += -2.0 * xi * c(k, i);
      if (step % kResyncInterval == 0) {
        resync();
        value = qf_value(c, std::span<const int>(x));
      }
    }
    if (value <= out.min_value + slack) {
      const double exact = qf_value(c, std::span<const int>(x));
      if (exact < out.min_value) {
        out.min_value = exact;
        out.argmin_set.clear();
        out.argmin_truncated = false;
      }
      if (exact == out.min_value) {
        if (out.argmin_set.size() < options.argmin_limit) {
          out.argmin_set.emplace_back(x);
        } else {
          out.argmin_truncated = true;
        }
      }
    }
    ++out.count_enumerated;
  }
  sort_argmins(out.argmin_set);
  return out;
}

std::vector<SignVector> enumerate_anti_stable(const SymmetricSplit& e,
                                              const EnumerationOptions& options) {
  require_zero_diagonal(e);
  const SymmetricMatrix& c = e.e;
  const std::size_t n = c.size();
  if (n > options.hypercube_cap) {
    throw CapacityError("anti-stable enumeration limited to n <= " +
                        std::to_string(options.hypercube_cap));
  }
  const double slack = tie_slack(c);
  std::vector<int> x(n, 1);
  std::vector<double> h(n);
  auto resync = [&] {
    for (std::size_t i = 0; i < n; ++i) h[i] = local_field(c, x, i);
  };
  resync();
  std::vector<SignVector> out;
  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  for (std::uint64_t step = 0; step < total; ++step) {
    if (step > 0) {
      const std::size_t i = static_cast<std::size_t>(std::countr_zero(step)) + 1;
      const double xi = x[i];
      x[i] = -x[i];
      for (std::size_t k = 0; k < n; ++k) h[k] += -2.0 * xi * c(k, i);
      if (step % kResyncInterval == 0) resync();
    }
    bool candidate = true;
    bool borderline = false;
    for (std::size_t i = 0; i < n && candidate; ++i) {
      const double s = x[i] * h[i];
      if (s > slack) candidate = false;
      else if (s > -slack) borderline = true;
    }
    if (!candidate) continue;
    SignVector point(x);
    if (borderline && !is_anti_stable(e, point)) continue;
    out.push_back(std::move(point));
  }
  return out;
}

SearchResult<LatticeVector> lattice_descent(const SymmetricMatrix& d, int m_bound,
                                            LatticeVector x0, const SearchOptions& options) {
  if (m_bound < 1) throw ValidationError("lattice bound M must be >= 1");
  require_dim(d, x0.size());
  if (x0.m_bound() != m_bound) x0 = LatticeVector({x0.values().begin(), x0.values().end()}, m_bound);
  if (options.max_sweeps < 1) throw ValidationError("max_sweeps must be >= 1");
  const std::size_t n = d.size();
  SplitMixStream order_rng(options.order_seed);
  SearchResult<LatticeVector> result;
  LatticeVector x = std::move(x0);
  std::vector<int> candidates;
  for (int mag = 1; mag <= m_bound; ++mag) {
    candidates.push_back(mag);
    candidates.push_back(-mag);
  }
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    bool changed = false;
    for (std::size_t i : sweep_order(n, options, order_rng)) {
      // g = sum_{j != i} d_ij x_j, same order as the zero-diagonal field.
      const auto r = d.row(i);
      double g = 0.0;
      for (std::size_t j = 0; j < n; ++j) g += (j == i ? 0.0 : r[j]) * x[j];
      auto cost = [&](int v) { return r[i] * v * v + 2.0 * v * g; };
      const int current = x[i];
      const double current_cost = cost(current);
      int best = current;
      double best_cost = current_cost;
      // candidates are ordered by |v| then positive first, so the first
      // strict improvement seen at the minimum wins the tie-break
      for (int v : candidates) {
        const double c = cost(v);
        if (c < best_cost) {
          best = v;
          best_cost = c;
        }
      }
      if (best != current) {
        x.set(i, best);
        changed = true;
        result.energy_trace.push_back(qf_value(d, x));
      }
    }
    if (!changed) {
      result.sweeps_used = sweep;
      result.best_value = qf_value(d, x);
      result.best_point = std::move(x);
      return result;
    }
  }
  throw ConvergenceError("lattice descent did not converge within " +
                             std::to_string(options.max_sweeps) + " sweeps",
                         std::vector<int>(x.values().begin(), x.values().end()));
}

SearchResult<LatticeVector> lattice_descent(const SymmetricMatrix& d, int m_bound,
                                            std::uint64_t seed, const SearchOptions& options) {
  return lattice_descent(d, m_bound, random_lattice_vector(d.size(), m_bound, seed), options);
}

EnumerationResult<LatticeVector> enumerate_lattice_min(const SymmetricMatrix& d, int m_bound,
                                                       const EnumerationOptions& options) {
  if (m_bound < 1) throw ValidationError("lattice bound M must be >= 1");
  const std::size_t n = d.size();
  const auto base = static_cast<std::uint64_t>(2 * m_bound);
  const std::uint64_t full = checked_power(base, n, options.lattice_cap);
  if (full > options.lattice_cap) {
    throw CapacityError("lattice enumeration limited to (2M)^n <= " +
                        std::to_string(options.lattice_cap));
  }
  const auto values = lattice_values(m_bound);
  // digit[0] only ranges over the positive half: one representative per +-pair
  std::vector<std::size_t> digit(n, 0);
  digit[0] = static_cast<std::size_t>(m_bound);
  std::vector<int> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = values[digit[i]];
  std::vector<double> h(n);
  auto resync = [&] {
    for (std::size_t i = 0; i < n; ++i) h[i] = local_field(d, x, i);
  };
  resync();
  double value = qf_value(d, std::span<const int>(x));
  const double slack = tie_slack(d) * m_bound * m_bound;

  EnumerationResult<LatticeVector> out;
  out.min_value = std::numeric_limits<double>::infinity();
  auto change = [&](std::size_t i, int b) {
    const double a = x[i];
    const double delta = b - a;
    value += (b * static_cast<double>(b) - a * a) * d(i, i) + 2.0 * delta * (h[i] - d(i, i) * a);
    x[i] = b;
    for (std::size_t k = 0; k < n; ++k) h[k] += d(k, i) * delta;
  };
  const std::uint64_t total = full / 2;
  for (std::uint64_t step = 0; step < total; ++step) {
    if (step > 0) {
      // odometer increment, least significant digit last
      std::size_t pos = n - 1;
      while (true) {
        const std::size_t limit = values.size();
        if (digit[pos] + 1 < limit) {
          ++digit[pos];
          change(pos, values[digit[pos]]);
          break;
        }
        digit[pos] = (pos == 0) ? static_cast<std::size_t>(m_bound) : 0;
        change(pos, values[digit[pos]]);
        --pos;
      }
      if (step % kResyncInterval == 0) {
        resync();
        value = qf_value(d, std::span<const int>(x));
      }
    }
    if (value <= out.min_value + slack) {
      const double exact = qf_value(d, std::span<const int>(x));
      if (exact < out.min_value) {
        out.min_value = exact;
        out.argmin_set.clear();
        out.argmin_truncated = false;
      }
      if (exact == out.min_value) {
        if (out.argmin_set.size() < options.argmin_limit) {
          out.argmin_set.emplace_back(x, m_bound);
        } else {
          out.argmin_truncated = true;
        }
      }
    }
    ++out.count_enumerated;
  }
  sort_argmins(out.argmin_set);
  return out;
}

}  // namespace cpdkit
