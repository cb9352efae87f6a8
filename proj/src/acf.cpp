#include "cpdkit/acf.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>

#include "cpdkit/error.hpp"
#include "cpdkit/simplex.hpp"

namespace cpdkit {

namespace {

constexpr double kFeasibilityTolerance = 1e-9;
constexpr double kNormalizationTolerance = 1e-12;
constexpr double kClampTolerance = 1e-9;
constexpr std::size_t kMaxPricingRounds = 20000;

void check_lags(std::vector<double>& rho, double bound, std::vector<std::string>& warnings) {
  for (std::size_t k = 0; k < rho.size(); ++k) {
    if (!std::isfinite(rho[k])) throw ValidationError("autocorrelation entry is not finite");
    if (k == 0) continue;
    const double over = std::abs(rho[k]) - bound;
    if (over > kClampTolerance) {
      throw ValidationError("|rho[" + std::to_string(k) + "]| = " + std::to_string(std::abs(rho[k])) +
                            " exceeds rho[0] = " + std::to_string(bound) +
                            " (Cauchy-Schwarz bound)");
    }
    if (over > 0.0) {
      rho[k] = std::copysign(bound, rho[k]);
      warnings.push_back("rho[" + std::to_string(k) + "] clamped to +-rho[0]");
    }
  }
}

// Row layout of the feasibility problem.
//   unit:    off-diagonal pairs (i < j) in row-major order, then sum of weights
//   lattice: all pairs (i <= j) in row-major order
struct RowLayout {
  std::size_t n = 0;
  bool unit = true;

  std::size_t rows() const { return unit ? n * (n - 1) / 2 + 1 : n * (n + 1) / 2; }

  std::vector<double> rhs(const SymmetricMatrix& r) const {
    std::vector<double> b;
    b.reserve(rows());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = unit ? i + 1 : i; j < n; ++j) b.push_back(r(i, j));
    }
    if (unit) b.push_back(r(0, 0));
    return b;
  }

  std::vector<double> column(std::span<const int> v) const {
    std::vector<double> a;
    a.reserve(rows());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = unit ? i + 1 : i; j < n; ++j) a.push_back(double(v[i]) * v[j]);
    }
    if (unit) a.push_back(1.0);
    return a;
  }

  // Matrix X with v^T X v == y^T column(v) and Trace(R X) == y^T rhs(R).
  SymmetricMatrix matrix_from_duals(std::span<const double> y) const {
    SymmetricMatrix x(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = unit ? i + 1 : i; j < n; ++j, ++k) {
        x.set(i, j, i == j ? y[k] : 0.5 * y[k]);
      }
    }
    if (unit) {
      const double d = y[k] / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) x.set(i, i, d);
    }
    return x;
  }
};

std::vector<std::vector<int>> all_representatives(std::size_t n, int m_bound) {
  std::vector<int> values;
  for (int v = -m_bound; v <= m_bound; ++v) {
    if (v != 0) values.push_back(v);
  }
  std::vector<std::vector<int>> out;
  std::vector<std::size_t> digit(n, 0);
  digit[0] = static_cast<std::size_t>(m_bound);
  while (true) {
    std::vector<int> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = values[digit[i]];
    out.push_back(std::move(v));
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (digit[pos] + 1 < values.size()) {
        ++digit[pos];
        break;
      }
      digit[pos] = pos == 0 ? values.size() : 0;
    }
    if (digit[0] >= values.size()) break;
  }
  return out;
}

std::vector<int> canonical(std::vector<int> v) {
  if (!v.empty() && v[0] < 0) {
    for (int& c : v) c = -c;
  }
  return v;
}

double min_form_on_set(const SymmetricMatrix& x, int m_bound, const EnumerationOptions& options) {
  return m_bound == 1 ? enumerate_hypercube_min(x, options).min_value
                      : enumerate_lattice_min(x, m_bound, options).min_value;
}

struct SolveState {
  PhaseOneSimplex master;
  std::vector<std::vector<int>> columns;
};

MembershipVerdict finish(const AcfSequence& acf, const RowLayout& layout, const SymmetricMatrix& r,
                         SolveState& state, FeasibilityMethod method) {
  MembershipVerdict out;
  out.order = layout.n;
  out.m_bound = acf.m_bound();
  out.method = method;
  out.columns = state.columns.size();
  out.infeasibility = state.master.objective();
  out.warnings = acf.warnings();

  if (out.infeasibility <= kFeasibilityTolerance) {
    const auto weights = state.master.primal();
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (weights[k] > 0.0) out.decomposition.push_back({weights[k], state.columns[k]});
    }
    const auto check = verify_decomposition(r, out.decomposition);
    if (check.residual <= kResidualTolerance) {
      out.verdict = Membership::member_up_to_order;
      out.residual = check.residual;
      out.weight_sum = check.weight_sum;
      return out;
    }
    out.decomposition.clear();
  }

  // Farkas alternative: w = -y satisfies w^T a_j >= 0 for every column and
  // w^T b = -infeasibility < 0.
  auto y = state.master.duals();
  for (double& v : y) v = -v;
  SymmetricMatrix x = layout.matrix_from_duals(y);
  const double scale = x.max_abs();
  if (scale == 0.0) throw InternalError("separating witness vanished");
  x = SymmetricMatrix::from_row_major(layout.n, [&] {
    auto d = x.data();
    for (double& v : d) v /= scale;
    return d;
  }());

  EnumerationOptions enum_opts;
  double min_form = min_form_on_set(x, acf.m_bound(), enum_opts);
  // Rounding can leave the form marginally negative somewhere; lifting the
  // diagonal by delta raises every v^T X v by at least n * delta.
  for (int attempt = 0; attempt < 4 && min_form < 0.0; ++attempt) {
    const double delta = (-min_form * (1.0 + 1e-6) + 1e-15) / static_cast<double>(layout.n);
    for (std::size_t i = 0; i < layout.n; ++i) x.set(i, i, x(i, i) + delta);
    min_form = min_form_on_set(x, acf.m_bound(), enum_opts);
  }
  const double trace = trace_product(r, x);
  if (min_form < 0.0 || trace > -kSeparationTolerance) {
    throw InternalError("feasibility problem produced neither a decomposition nor a verified "
                        "separating witness (phase-I value " +
                        std::to_string(out.infeasibility) + ")");
  }
  out.verdict = Membership::non_member;
  out.witness = std::move(x);
  out.witness_trace = trace;
  out.witness_min_form = min_form;
  return out;
}

MembershipVerdict solve_full(const AcfSequence& acf, const RowLayout& layout,
                             const SymmetricMatrix& r) {
  SolveState state{PhaseOneSimplex(layout.rhs(r)), all_representatives(layout.n, acf.m_bound())};
  for (const auto& v : state.columns) state.master.add_column(layout.column(v));
  if (!state.master.solve()) throw InternalError("simplex iteration limit reached");
  return finish(acf, layout, r, state, FeasibilityMethod::full_enumeration);
}

MembershipVerdict solve_column_generation(const AcfSequence& acf, const RowLayout& layout,
                                          const SymmetricMatrix& r,
                                          const MembershipOptions& options) {
  SolveState state{PhaseOneSimplex(layout.rhs(r)), {}};
  std::set<std::vector<int>> seen;
  auto add = [&](std::vector<int> v) {
    v = canonical(std::move(v));
    if (!seen.insert(v).second) return false;
    state.master.add_column(layout.column(v));
    state.columns.push_back(std::move(v));
    return true;
  };
  add(std::vector<int>(layout.n, 1));

  const SplitMixStream master_rng(options.seed);
  for (std::size_t round = 0; round < kMaxPricingRounds; ++round) {
    if (!state.master.solve()) throw InternalError("simplex iteration limit reached");
    if (state.master.objective() <= kFeasibilityTolerance) break;

    // Entering columns maximize v^T Y v with Y built from the current duals.
    const SymmetricMatrix price = layout.matrix_from_duals(state.master.duals());
    const double price_tol = 1e-10 * (1.0 + price.max_abs());
    const auto split = symmetrize_zero_diag(price);
    bool added = false;
    const SplitMixStream round_rng = master_rng.substream(round);
    for (std::size_t s = 0; s < options.pricing_starts; ++s) {
      const auto res = run_stable(split, round_rng.substream(s)());
      if (res.best_value + split.trace_offset > price_tol) {
        added |= add({res.best_point.values().begin(), res.best_point.values().end()});
      }
    }
    if (added) continue;

    SymmetricMatrix negated(layout.n);
    for (std::size_t i = 0; i < layout.n; ++i) {
      for (std::size_t j = i; j < layout.n; ++j) negated.set(i, j, -price(i, j));
    }
    EnumerationOptions enum_opts;
    enum_opts.argmin_limit = 8;
    const auto exact = enumerate_hypercube_min(negated, enum_opts);
    if (-exact.min_value > price_tol) {
      for (const auto& v : exact.argmin_set) {
        added |= add({v.values().begin(), v.values().end()});
      }
    }
    if (!added) break;
  }
  return finish(acf, layout, r, state, FeasibilityMethod::column_generation);
}

}  // namespace

double lattice_rho0(int m_bound) {
  if (m_bound < 1) throw ValidationError("lattice bound M must be >= 1");
  const double m = m_bound;
  return (m + 1.0) * (2.0 * m + 1.0) / 6.0;
}

AcfSequence AcfSequence::unit(std::vector<double> rho) {
  if (rho.empty()) throw ValidationError("autocorrelation sequence is empty");
  if (!(std::abs(rho[0] - 1.0) <= kNormalizationTolerance)) {
    throw ValidationError("unit autocorrelation requires rho[0] = 1 (got " +
                          std::to_string(rho[0]) + ")");
  }
  AcfSequence acf;
  rho[0] = 1.0;
  check_lags(rho, 1.0, acf.warnings_);
  acf.rho_ = std::move(rho);
  return acf;
}

AcfSequence AcfSequence::lattice(std::vector<double> rho, int m_bound) {
  if (rho.empty()) throw ValidationError("autocorrelation sequence is empty");
  const double expected = lattice_rho0(m_bound);
  if (!(std::abs(rho[0] - expected) <= kNormalizationTolerance)) {
    throw ValidationError("lattice autocorrelation requires rho[0] = (M+1)(2M+1)/6 = " +
                          std::to_string(expected) + " for M = " + std::to_string(m_bound) +
                          " (got " + std::to_string(rho[0]) + ")");
  }
  AcfSequence acf;
  rho[0] = expected;
  check_lags(rho, expected, acf.warnings_);
  acf.rho_ = std::move(rho);
  acf.m_bound_ = m_bound;
  acf.unit_ = false;
  return acf;
}

std::string_view to_string(Membership m) {
  return m == Membership::member_up_to_order ? "MEMBER_UP_TO_ORDER_N" : "NON_MEMBER";
}

std::string_view to_string(FeasibilityMethod m) {
  switch (m) {
    case FeasibilityMethod::automatic: return "automatic";
    case FeasibilityMethod::full_enumeration: return "full_enumeration";
    case FeasibilityMethod::column_generation: return "column_generation";
  }
  return "automatic";
}

MembershipVerdict mcmillan_test(const AcfSequence& acf, const MembershipOptions& options) {
  if (!acf.is_unit()) throw ValidationError("mcmillan_test expects a unit autocorrelation");
  const std::size_t n = acf.order();
  if (n > options.max_order) {
    throw CapacityError("membership order " + std::to_string(n) + " exceeds cap " +
                        std::to_string(options.max_order));
  }
  const auto r = build_toeplitz(acf.rho()).matrix();
  if (n == 1) {
    // Only the normalization constraint remains.
    MembershipVerdict out;
    out.verdict = Membership::member_up_to_order;
    out.order = 1;
    out.decomposition = {{1.0, {1}}};
    out.weight_sum = 1.0;
    out.columns = 1;
    return out;
  }
  const RowLayout layout{n, true};
  auto method = options.method;
  if (method == FeasibilityMethod::automatic) {
    method = n <= options.full_enumeration_max_order ? FeasibilityMethod::full_enumeration
                                                     : FeasibilityMethod::column_generation;
  }
  return method == FeasibilityMethod::full_enumeration
             ? solve_full(acf, layout, r)
             : solve_column_generation(acf, layout, r, options);
}

MembershipVerdict lattice_membership_test(const AcfSequence& acf,
                                          const MembershipOptions& options) {
  const std::size_t n = acf.order();
  const int m = acf.m_bound();
  std::uint64_t columns = 1;
  for (std::size_t k = 0; k < n; ++k) {
    columns *= static_cast<std::uint64_t>(2 * m);
    if (columns / 2 > options.lattice_column_cap) {
      throw CapacityError("lattice membership needs (2M)^N/2 columns above cap " +
                          std::to_string(options.lattice_column_cap));
    }
  }
  const auto r = build_toeplitz(acf.rho()).matrix();
  const RowLayout layout{n, false};
  return solve_full(acf, layout, r);
}

double mcmillan_trace_check(const AcfSequence& acf, const SymmetricMatrix& x) {
  if (x.size() != acf.order()) throw DimensionError("witness order does not match N = L + 1");
  return trace_product(build_toeplitz(acf.rho()).matrix(), x);
}

DecompositionCheck verify_decomposition(const SymmetricMatrix& r,
                                        std::span<const WeightedPoint> decomposition) {
  const std::size_t n = r.size();
  std::vector<double> acc(n * n, 0.0);
  DecompositionCheck out;
  for (const auto& wp : decomposition) {
    if (wp.weight < 0.0) throw ValidationError("decomposition weight is negative");
    if (wp.point.size() != n) throw DimensionError("decomposition point has wrong length");
    out.weight_sum += wp.weight;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) acc[i * n + j] += wp.weight * wp.point[i] * wp.point[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.residual = std::max(out.residual, std::abs(r(i, j) - acc[i * n + j]));
    }
  }
  return out;
}

WitnessCheck verify_witness(const SymmetricMatrix& r, const SymmetricMatrix& x, int m_bound,
                            const EnumerationOptions& options) {
  if (r.size() != x.size()) throw DimensionError("witness order does not match R");
  WitnessCheck out;
  out.min_form = min_form_on_set(x, m_bound, options);
  out.is_positive_on_set = out.min_form >= 0.0;
  out.trace_value = trace_product(r, x);
  return out;
}

double toeplitz_min_eigenvalue(std::span<const double> rho) {
  const auto t = build_toeplitz(rho);
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = t.matrix()(i, j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace cpdkit
