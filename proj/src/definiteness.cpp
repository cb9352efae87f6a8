#include "cpdkit/definiteness.hpp"

#include <limits>

#include "cpdkit/error.hpp"

namespace cpdkit {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::positive: return "POSITIVE";
    case Verdict::not_positive: return "NOT_POSITIVE";
    case Verdict::unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::string_view to_string(VerdictMethod m) {
  switch (m) {
    case VerdictMethod::exact_enum: return "EXACT_ENUM";
    case VerdictMethod::anti_stable: return "ANTI_STABLE";
    case VerdictMethod::heuristic: return "HEURISTIC";
  }
  return "HEURISTIC";
}

double verdict_tolerance(const SymmetricMatrix& c) {
  return c.is_integral() ? 0.0 : 1e-9 * (1.0 + c.max_abs());
}

namespace {

template <typename Point>
std::vector<int> components(const Point& p) {
  return {p.values().begin(), p.values().end()};
}

}  // namespace

DefinitenessVerdict cpd_exact(const SymmetricMatrix& c, const EnumerationOptions& options,
                              std::optional<double> tolerance) {
  const auto result = enumerate_hypercube_min(c, options);
  DefinitenessVerdict out;
  out.method = VerdictMethod::exact_enum;
  out.tolerance = tolerance.value_or(verdict_tolerance(c));
  out.margin = result.min_value;
  if (result.min_value >= -out.tolerance) {
    out.verdict = Verdict::positive;
  } else {
    out.verdict = Verdict::not_positive;
    out.witness = components(result.argmin_set.front());
    out.witness_value = result.min_value;
  }
  return out;
}

DefinitenessVerdict cpd_anti_stable(const SymmetricMatrix& c, const EnumerationOptions& options,
                                 std::optional<double> tolerance) {
  const auto split = symmetrize_zero_diag(c);
  const auto states = enumerate_anti_stable(split, options);
  DefinitenessVerdict out;
  out.method = VerdictMethod::anti_stable;
  out.tolerance = tolerance.value_or(verdict_tolerance(c));
  // The global minimizer is anti-stable, so the set is never empty.
  if (states.empty()) throw InternalError("no anti-stable state found");
  double best = std::numeric_limits<double>::infinity();
  const SignVector* arg = nullptr;
  for (const auto& x : states) {
    const double v = qf_value(split.e, x);
    if (v < best) {
      best = v;
      arg = &x;
    }
  }
  out.margin = best + split.trace_offset;
  if (best >= -split.trace_offset - out.tolerance) {
    out.verdict = Verdict::positive;
  } else {
    out.verdict = Verdict::not_positive;
    out.witness = components(*arg);
    out.witness_value = qf_value(c, *arg);
  }
  return out;
}

DefinitenessVerdict cpd_refute(const SymmetricMatrix& c, std::size_t starts, std::uint64_t seed,
                               unsigned threads, std::optional<double> tolerance) {
  const auto split = symmetrize_zero_diag(c);
  DefinitenessVerdict out;
  out.method = VerdictMethod::heuristic;
  out.tolerance = tolerance.value_or(verdict_tolerance(c));
  out.verdict = Verdict::unknown;
  const auto best = multi_start_anti_stable(split, starts, seed, threads);
  const double value = qf_value(c, best.best_point);
  if (value < -out.tolerance) {
    out.verdict = Verdict::not_positive;
    out.witness = components(best.best_point.canonical());
    out.witness_value = value;
  }
  return out;
}

DefinitenessVerdict lattice_positive_exact(const SymmetricMatrix& b, int m_bound,
                                           const EnumerationOptions& options,
                                           std::optional<double> tolerance) {
  const auto result = enumerate_lattice_min(b, m_bound, options);
  DefinitenessVerdict out;
  out.method = VerdictMethod::exact_enum;
  out.tolerance = tolerance.value_or(verdict_tolerance(b)) * m_bound * m_bound;
  out.margin = result.min_value;
  if (result.min_value >= -out.tolerance) {
    out.verdict = Verdict::positive;
  } else {
    out.verdict = Verdict::not_positive;
    out.witness = components(result.argmin_set.front());
    out.witness_value = result.min_value;
  }
  return out;
}

}  // namespace cpdkit
