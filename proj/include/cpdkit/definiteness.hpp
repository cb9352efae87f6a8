#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cpdkit/quadform.hpp"
#include "cpdkit/search.hpp"

namespace cpdkit {

enum class Verdict { positive, not_positive, unknown };
enum class VerdictMethod { exact_enum, anti_stable, heuristic };

std::string_view to_string(Verdict v);
std::string_view to_string(VerdictMethod m);

/// Outcome of a corner / lattice positivity check.
///
/// `margin` is the minimum of the form over the set when the method is
/// exhaustive. `witness` holds the components of a violating point
/// (sign or lattice) and is present exactly when the verdict is
/// not_positive.
struct DefinitenessVerdict {
  Verdict verdict = Verdict::unknown;
  std::optional<double> margin;
  std::optional<std::vector<int>> witness;
  std::optional<double> witness_value;
  VerdictMethod method = VerdictMethod::exact_enum;
  double tolerance = 0.0;
};

// 0 for integer matrices (enumeration is exact), else 1e-9 (1 + max|c_ij|).
double verdict_tolerance(const SymmetricMatrix& c);

// `tolerance` overrides verdict_tolerance() when given.
DefinitenessVerdict cpd_exact(const SymmetricMatrix& c, const EnumerationOptions& options = {},
                              std::optional<double> tolerance = {});

// Thresholds x^T E x against -Trace(C) over all anti-stable states.
DefinitenessVerdict cpd_anti_stable(const SymmetricMatrix& c,
                                 const EnumerationOptions& options = {},
                                 std::optional<double> tolerance = {});

// Multi-start anti-stable search for a violating vertex. Never returns positive.
DefinitenessVerdict cpd_refute(const SymmetricMatrix& c, std::size_t starts, std::uint64_t seed,
                               unsigned threads = 1, std::optional<double> tolerance = {});

// Tolerance is scaled by M^2.
DefinitenessVerdict lattice_positive_exact(const SymmetricMatrix& b, int m_bound,
                                           const EnumerationOptions& options = {},
                                           std::optional<double> tolerance = {});

}  // namespace cpdkit
