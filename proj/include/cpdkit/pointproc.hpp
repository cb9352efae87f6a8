#pragma once

// Point processes and finite-state jump processes: renewal streams and their
// superposition, semi-Markov and continuous-time Markov simulation (competing
// exponential clocks, embedded chain, uniformization), transient analysis,
// Poissonness statistics and autocorrelation estimation.
//
// All simulators are deterministic functions of their seed. Independent
// sources draw from SplitMixStream substreams indexed by source number.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cpdkit/quadform.hpp"
#include "cpdkit/rng.hpp"

namespace cpdkit {

struct Exponential {
  double rate;
};
struct UniformInterval {
  double a;
  double b;
};
struct Deterministic {
  double d;
};
struct Weibull {
  double shape;
  double scale;
};

/// Interarrival / sojourn distribution.
class SojournModel {
 public:
  using Spec = std::variant<Exponential, UniformInterval, Deterministic, Weibull>;

  SojournModel(Spec spec);  // NOLINT(google-explicit-constructor)
  SojournModel(Exponential m) : SojournModel(Spec{m}) {}      // NOLINT
  SojournModel(UniformInterval m) : SojournModel(Spec{m}) {}  // NOLINT
  SojournModel(Deterministic m) : SojournModel(Spec{m}) {}    // NOLINT
  SojournModel(Weibull m) : SojournModel(Spec{m}) {}          // NOLINT

  // "exp:RATE", "uniform:A,B", "det:D", "weibull:SHAPE,SCALE"
  static SojournModel parse(const std::string& text);
  std::string to_string() const;

  const Spec& spec() const noexcept { return spec_; }
  double mean() const;
  double sample(SplitMixStream& rng) const;
  // Forward recurrence time of the stationary renewal process.
  double sample_residual(SplitMixStream& rng) const;
  // Same family with every draw multiplied by factor.
  SojournModel scaled(double factor) const;

 private:
  Spec spec_;
};

struct Event {
  double time;
  int source;
  friend bool operator==(const Event&, const Event&) = default;
};

struct EventStream {
  std::vector<Event> events;  // strictly increasing times in [0, horizon)
  double horizon = 0.0;
  std::size_t jittered_ties = 0;
};

enum class RenewalStart {
  ordinary,    // first event after one full interarrival
  stationary,  // first event after a forward recurrence time
};

EventStream sample_renewal(const SojournModel& model, double horizon, std::uint64_t seed,
                           RenewalStart start = RenewalStart::ordinary, int source_id = 0);

// Merged, time-sorted stream keeping source labels. Exact ties are separated
// by 1e-12 and counted in jittered_ties.
EventStream superpose(std::span<const EventStream> streams);

struct Segment {
  double enter_time;
  int state;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Trajectory {
  std::vector<Segment> segments;
  double horizon = 0.0;
  bool absorbed = false;

  std::size_t jumps() const noexcept { return segments.empty() ? 0 : segments.size() - 1; }
  int state_at(double t) const;
};

struct SimulationLimits {
  SimulationLimits(double h) : horizon(h) {}  // NOLINT(google-explicit-constructor)
  SimulationLimits(double h, std::uint64_t jumps) : horizon(h), max_jumps(jumps) {}

  double horizon;
  // When reached, the trajectory is cut at the last jump time.
  std::uint64_t max_jumps = std::numeric_limits<std::uint64_t>::max();
};

class GeneratorMatrix {
 public:
  static GeneratorMatrix from_rows(const RowMatrix& q);

  std::size_t size() const noexcept { return q_.size(); }
  double rate(std::size_t i, std::size_t j) const { return q_[i][j]; }
  double exit_rate(std::size_t i) const { return -q_[i][i]; }
  double max_exit_rate() const;
  const RowMatrix& rows() const noexcept { return q_; }

 private:
  RowMatrix q_;
};

// Rows sum to 1 within 1e-12, entries in [0, 1].
void validate_stochastic(const RowMatrix& p, bool require_zero_diagonal);

Trajectory semi_markov_simulate(const RowMatrix& p_embedded, std::span<const SojournModel> sojourns,
                                int init_state, const SimulationLimits& limits, std::uint64_t seed);

struct SojournSummary {
  std::map<int, std::vector<double>> completed;
  std::optional<std::pair<int, double>> censored;  // final visit (state, duration)
};
SojournSummary extract_sojourns(const Trajectory& t);

Trajectory ctmc_simulate_competing(const GeneratorMatrix& g, int init,
                                   const SimulationLimits& limits, std::uint64_t seed);
Trajectory ctmc_simulate_embedded(const GeneratorMatrix& g, int init,
                                  const SimulationLimits& limits, std::uint64_t seed);

struct UniformizedChain {
  RowMatrix p;
  double lambda_u = 0.0;
};
// p = I + Q / lambda_u; lambda_u defaults to the largest exit rate.
UniformizedChain uniformize(const GeneratorMatrix& g, std::optional<double> lambda_u = {});

Trajectory uniformized_simulate(const RowMatrix& p, double lambda_u, int init,
                                const SimulationLimits& limits, std::uint64_t seed);

// Poisson-weighted series sum_k Pois(k; lambda t) e_init^T P^k, truncated
// once the accumulated weight exceeds 1 - tol.
std::vector<double> transient_distribution(const GeneratorMatrix& g, double t, int init,
                                           double tol = 1e-12,
                                           std::optional<double> lambda_u = {});

struct PoissonnessReport {
  double ks_statistic = 0.0;
  double lambda_hat = 0.0;
  double dispersion_index = 0.0;
  std::size_t n_events = 0;
  std::size_t n_bins = 0;
};
PoissonnessReport poisson_stats(const EventStream& s, std::size_t n_bins);

struct SparseExperimentRow {
  std::size_t n_sources = 0;
  double median_ks = 0.0;
  double median_dispersion = 0.0;
  std::vector<double> ks;          // per seed
  std::vector<double> dispersion;  // per seed
};

struct SparseExperimentConfig {
  std::vector<std::size_t> n_sources{1, 5, 25, 125};
  SojournModel base{UniformInterval{0.5, 1.5}};
  double total_rate = 1.0;
  double horizon = 1e4;
  std::size_t seeds = 20;
  std::size_t n_bins = 0;  // 0: one bin per expected event
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
};

// n stationary copies of `base`, each stretched so the merged rate stays
// total_rate, superposed and summarized per n.
std::vector<SparseExperimentRow> sparse_superposition_experiment(
    const SparseExperimentConfig& config);

// q-quantile of the fitted-rate KS statistic for genuine Poisson streams.
double calibrate_ks_null(double rate, double horizon, std::size_t replicates, double q,
                         std::uint64_t seed);

std::vector<int> map_states_pm(const Trajectory& t, const std::map<int, int>& mapping,
                               double sample_dt);

enum class AcfDenominator { unbiased, biased };

struct AcfEstimate {
  std::vector<double> raw;         // (1/(T-k)) sum x_m x_{m+k}, or 1/T
  std::vector<double> normalized;  // raw / raw[0]
};
AcfEstimate acf_estimate(std::span<const double> x, std::size_t max_lag,
                         AcfDenominator denominator = AcfDenominator::unbiased);
AcfEstimate acf_estimate(std::span<const int> x, std::size_t max_lag,
                         AcfDenominator denominator = AcfDenominator::unbiased);

std::vector<int> telegraph_simulate(double p_flip, std::size_t length, std::uint64_t seed);

}  // namespace cpdkit
