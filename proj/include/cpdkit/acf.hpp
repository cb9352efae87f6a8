#pragma once

// Membership of a candidate autocorrelation sequence in the class of +-1
// process autocorrelations (unit case) and in its lattice analogue with
// values in {+-1..+-M}. A finite order N = L + 1 is decided by a linear
// feasibility problem over outer products v v^T; the verdict is always
// backed by a checkable certificate: a nonnegative decomposition of the
// Toeplitz matrix, or a matrix that is nonnegative on the discrete set but
// pairs negatively with it.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpdkit/quadform.hpp"
#include "cpdkit/rng.hpp"
#include "cpdkit/search.hpp"

namespace cpdkit {

// rho(0) of a process uniform on {+-1..+-M}: (M + 1)(2M + 1) / 6.
double lattice_rho0(int m_bound);

class AcfSequence {
 public:
  // Unit class: rho[0] must be 1 and |rho[k]| <= 1.
  static AcfSequence unit(std::vector<double> rho);
  // Lattice class: rho[0] must equal lattice_rho0(M) and |rho[k]| <= rho[0].
  static AcfSequence lattice(std::vector<double> rho, int m_bound);

  const std::vector<double>& rho() const noexcept { return rho_; }
  int m_bound() const noexcept { return m_bound_; }
  bool is_unit() const noexcept { return unit_; }
  std::size_t order() const noexcept { return rho_.size(); }
  // Overshoots up to 1e-9 that were clamped during construction.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  AcfSequence() = default;
  std::vector<double> rho_;
  int m_bound_ = 1;
  bool unit_ = true;
  std::vector<std::string> warnings_;
};

enum class Membership { member_up_to_order, non_member };
enum class FeasibilityMethod { automatic, full_enumeration, column_generation };

std::string_view to_string(Membership m);
std::string_view to_string(FeasibilityMethod m);

struct WeightedPoint {
  double weight = 0.0;
  std::vector<int> point;
};

struct MembershipVerdict {
  Membership verdict = Membership::non_member;
  std::size_t order = 0;
  int m_bound = 1;
  FeasibilityMethod method = FeasibilityMethod::full_enumeration;
  std::vector<WeightedPoint> decomposition;  // present iff member
  std::optional<SymmetricMatrix> witness;    // present iff non_member
  double residual = 0.0;     // max |R - sum w v v^T| for members
  double weight_sum = 0.0;
  double witness_trace = 0.0;     // Trace(R X) for non-members
  double witness_min_form = 0.0;  // min of v^T X v over the set, >= 0
  double infeasibility = 0.0;     // phase-I optimum
  std::size_t columns = 0;        // columns in the final master problem
  std::vector<std::string> warnings;
};

struct MembershipOptions {
  FeasibilityMethod method = FeasibilityMethod::automatic;
  std::size_t full_enumeration_max_order = 10;  // automatic switches to column generation above
  std::size_t max_order = 16;
  std::uint64_t lattice_column_cap = std::uint64_t{1} << 16;
  std::size_t pricing_starts = 16;
  std::uint64_t seed = kDefaultSeed;
};

MembershipVerdict mcmillan_test(const AcfSequence& acf, const MembershipOptions& options = {});
MembershipVerdict lattice_membership_test(const AcfSequence& acf,
                                          const MembershipOptions& options = {});

// Trace(R x) with R the Toeplitz matrix of acf.
double mcmillan_trace_check(const AcfSequence& acf, const SymmetricMatrix& x);

struct DecompositionCheck {
  double residual = 0.0;
  double weight_sum = 0.0;
};
DecompositionCheck verify_decomposition(const SymmetricMatrix& r,
                                        std::span<const WeightedPoint> decomposition);

struct WitnessCheck {
  bool is_positive_on_set = false;
  double trace_value = 0.0;
  double min_form = 0.0;
};
// m_bound == 1 checks the hypercube, otherwise the lattice {+-1..+-M}^N.
WitnessCheck verify_witness(const SymmetricMatrix& r, const SymmetricMatrix& x, int m_bound = 1,
                            const EnumerationOptions& options = {});

// Smallest eigenvalue of the Toeplitz matrix; >= -tol is the PSD necessity check.
double toeplitz_min_eigenvalue(std::span<const double> rho);

inline constexpr double kResidualTolerance = 1e-8;
inline constexpr double kSeparationTolerance = 1e-8;

}  // namespace cpdkit
