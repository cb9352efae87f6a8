#include "cpdkit/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "cpdkit/error.hpp"
#include "cpdkit/stats.hpp"

namespace cpdkit {

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr double kTieJitter = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void validate(const SojournModel::Spec& spec) {
  std::visit(Overloaded{
                 [](const Exponential& m) {
                   if (!positive_finite(m.rate)) throw ValidationError("exponential rate must be > 0");
                 },
                 [](const UniformInterval& m) {
                   if (!positive_finite(m.a) || !positive_finite(m.b) || !(m.a < m.b)) {
                     throw ValidationError("uniform interval needs 0 < a < b");
                   }
                 },
                 [](const Deterministic& m) {
                   if (!positive_finite(m.d)) throw ValidationError("deterministic delay must be > 0");
                 },
                 [](const Weibull& m) {
                   if (!positive_finite(m.shape) || !positive_finite(m.scale)) {
                     throw ValidationError("weibull shape and scale must be > 0");
                   }
                 },
             },
             spec);
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw ValidationError("trailing characters in number '" + item + "'");
    } catch (const std::logic_error&) {
      throw ValidationError("cannot parse number '" + item + "'");
    }
  }
  return out;
}

std::size_t categorical(std::span<const double> weights, double total, SplitMixStream& rng,
                        std::size_t skip) {
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  std::size_t last = skip;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (j == skip || weights[j] <= 0.0) continue;
    acc += weights[j];
    last = j;
    if (u < acc) return j;
  }
  return last;
}

void require_state(int s, std::size_t n) {
  if (s < 0 || static_cast<std::size_t>(s) >= n) throw ValidationError("state index out of range");
}

void require_horizon(double h) {
  if (!positive_finite(h)) throw ValidationError("horizon must be positive and finite");
}

// Drives a jump process: next(state, rng) returns (sojourn, next_state) or
// nullopt when the state is absorbing.
template <typename Step>
Trajectory run_jump_process(int init, const SimulationLimits& limits, SplitMixStream& rng,
                            Step&& next) {
  require_horizon(limits.horizon);
  Trajectory t;
  t.horizon = limits.horizon;
  t.segments.push_back({0.0, init});
  double now = 0.0;
  int state = init;
  while (true) {
    if (t.jumps() >= limits.max_jumps) {
      t.horizon = now;
      break;
    }
    const auto step = next(state, rng);
    if (!step) {
      t.absorbed = true;
      break;
    }
    now += step->first;
    if (!(now < limits.horizon)) break;
    if (step->second != state) {
      state = step->second;
      t.segments.push_back({now, state});
    }
  }
  return t;
}

}  // namespace

SojournModel::SojournModel(Spec spec) : spec_(spec) { validate(spec_); }

SojournModel SojournModel::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("model must look like 'kind:params'");
  const std::string kind = text.substr(0, colon);
  const auto p = parse_numbers(text.substr(colon + 1));
  auto need = [&](std::size_t k) {
    if (p.size() != k) throw ValidationError("model '" + kind + "' takes " + std::to_string(k) + " parameters");
  };
  if (kind == "exp") {
    need(1);
    return SojournModel(Exponential{p[0]});
  }
  if (kind == "uniform") {
    need(2);
    return SojournModel(UniformInterval{p[0], p[1]});
  }
  if (kind == "det") {
    need(1);
    return SojournModel(Deterministic{p[0]});
  }
  if (kind == "weibull") {
    need(2);
    return SojournModel(Weibull{p[0], p[1]});
  }
  throw ValidationError("unknown model kind '" + kind + "'");
}

std::string SojournModel::to_string() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Exponential& m) { os << "exp:" << m.rate; },
                 [&](const UniformInterval& m) { os << "uniform:" << m.a << ',' << m.b; },
                 [&](const Deterministic& m) { os << "det:" << m.d; },
                 [&](const Weibull& m) { os << "weibull:" << m.shape << ',' << m.scale; },
             },
             spec_);
  return os.str();
}

double SojournModel::mean() const {
  return std::visit(Overloaded{
                        [](const Exponential& m) { return 1.0 / m.rate; },
                        [](const UniformInterval& m) { return 0.5 * (m.a + m.b); },
                        [](const Deterministic& m) { return m.d; },
                        [](const Weibull& m) { return m.scale * std::tgamma(1.0 + 1.0 / m.shape); },
                    },
                    spec_);
}

double SojournModel::sample(SplitMixStream& rng) const {
  return std::visit(Overloaded{
                        [&](const Exponential& m) { return rng.exponential(m.rate); },
                        [&](const UniformInterval& m) { return m.a + (m.b - m.a) * rng.uniform01(); },
                        [&](const Deterministic& m) { return m.d; },
                        [&](const Weibull& m) {
                          return m.scale * std::pow(-std::log(rng.uniform_open0()), 1.0 / m.shape);
                        },
                    },
                    spec_);
}

double SojournModel::sample_residual(SplitMixStream& rng) const {
  // Residual = U * L with L drawn from the length-biased interarrival law.
  return std::visit(
      Overloaded{
          [&](const Exponential& m) { return rng.exponential(m.rate); },
          [&](const UniformInterval& m) {
            const double u = rng.uniform01();
            const double len = std::sqrt(m.a * m.a + u * (m.b * m.b - m.a * m.a));
            return rng.uniform01() * len;
          },
          [&](const Deterministic& m) { return rng.uniform01() * m.d; },
          [&](const Weibull& m) {
            // (L / scale)^shape ~ Gamma(1 + 1/shape, 1)
            std::gamma_distribution<double> gamma(1.0 + 1.0 / m.shape, 1.0);
            const double len = m.scale * std::pow(gamma(rng), 1.0 / m.shape);
            return rng.uniform01() * len;
          },
      },
      spec_);
}

SojournModel SojournModel::scaled(double factor) const {
  if (!positive_finite(factor)) throw ValidationError("scale factor must be > 0");
  return std::visit(Overloaded{
                        [&](const Exponential& m) { return SojournModel(Exponential{m.rate / factor}); },
                        [&](const UniformInterval& m) {
                          return SojournModel(UniformInterval{m.a * factor, m.b * factor});
                        },
                        [&](const Deterministic& m) { return SojournModel(Deterministic{m.d * factor}); },
                        [&](const Weibull& m) { return SojournModel(Weibull{m.shape, m.scale * factor}); },
                    },
                    spec_);
}

EventStream sample_renewal(const SojournModel& model, double horizon, std::uint64_t seed,
                           RenewalStart start, int source_id) {
  require_horizon(horizon);
  SplitMixStream rng(seed);
  EventStream s;
  s.horizon = horizon;
  double t = start == RenewalStart::stationary ? model.sample_residual(rng) : model.sample(rng);
  while (t < horizon) {
    s.events.push_back({t, source_id});
    t += model.sample(rng);
  }
  return s;
}

EventStream superpose(std::span<const EventStream> streams) {
  if (streams.empty()) throw ValidationError("nothing to superpose");
  EventStream out;
  out.horizon = streams.front().horizon;
  std::size_t total = 0;
  for (const auto& s : streams) {
    if (s.horizon != out.horizon) throw ValidationError("superposed streams must share a horizon");
    total += s.events.size();
    out.jittered_ties += s.jittered_ties;
  }
  out.events.reserve(total);
  for (const auto& s : streams) out.events.insert(out.events.end(), s.events.begin(), s.events.end());
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const Event& a, const Event& b) { return a.time < b.time; });
  for (std::size_t i = 1; i < out.events.size(); ++i) {
    if (out.events[i].time <= out.events[i - 1].time) {
      out.events[i].time = out.events[i - 1].time + kTieJitter;
      ++out.jittered_ties;
    }
  }
  return out;
}

int Trajectory::state_at(double t) const {
  if (segments.empty()) throw ValidationError("empty trajectory");
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](double value, const Segment& s) { return value < s.enter_time; });
  if (it == segments.begin()) return segments.front().state;
  return std::prev(it)->state;
}

GeneratorMatrix GeneratorMatrix::from_rows(const RowMatrix& q) {
  const std::size_t n = q.size();
  if (n < 2) throw ValidationError("generator needs at least 2 states");
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i].size() != n) throw DimensionError("generator is not square");
    double sum = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = q[i][j];
      if (!std::isfinite(v)) throw ValidationError("generator entry is not finite");
      if (i != j && v < 0.0) throw ValidationError("generator off-diagonal entries must be >= 0");
      if (i == j && v > 0.0) throw ValidationError("generator diagonal entries must be <= 0");
      sum += v;
      scale = std::max(scale, std::abs(v));
    }
    if (std::abs(sum) > kRowSumTolerance * std::max(1.0, scale)) {
      throw ValidationError("generator row " + std::to_string(i) + " does not sum to 0");
    }
  }
  GeneratorMatrix g;
  g.q_ = q;
  return g;
}

double GeneratorMatrix::max_exit_rate() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, exit_rate(i));
  return m;
}

void validate_stochastic(const RowMatrix& p, bool require_zero_diagonal) {
  const std::size_t n = p.size();
  if (n == 0) throw ValidationError("stochastic matrix is empty");
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i].size() != n) throw DimensionError("stochastic matrix is not square");
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = p[i][j];
      if (!std::isfinite(v) || v < 0.0 || v > 1.0 + kRowSumTolerance) {
        throw ValidationError("transition probabilities must lie in [0, 1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ValidationError("transition row " + std::to_string(i) + " does not sum to 1");
    }
    if (require_zero_diagonal && p[i][i] != 0.0) {
      throw ValidationError("embedded chain must have a zero diagonal");
    }
  }
}

Trajectory semi_markov_simulate(const RowMatrix& p_embedded, std::span<const SojournModel> sojourns,
                                int init_state, const SimulationLimits& limits, std::uint64_t seed) {
  validate_stochastic(p_embedded, true);
  const std::size_t n = p_embedded.size();
  if (sojourns.size() != n) throw DimensionError("one sojourn model per state is required");
  require_state(init_state, n);
  SplitMixStream rng(seed);
  return run_jump_process(init_state, limits, rng,
                          [&](int s, SplitMixStream& r) -> std::optional<std::pair<double, int>> {
                            const double hold = sojourns[s].sample(r);
                            const auto next = categorical(p_embedded[s], 1.0, r, s);
                            return std::pair{hold, static_cast<int>(next)};
                          });
}

SojournSummary extract_sojourns(const Trajectory& t) {
  SojournSummary out;
  if (t.segments.empty()) return out;
  for (std::size_t k = 0; k + 1 < t.segments.size(); ++k) {
    out.completed[t.segments[k].state].push_back(t.segments[k + 1].enter_time -
                                                 t.segments[k].enter_time);
  }
  const auto& last = t.segments.back();
  out.censored = std::pair{last.state, t.horizon - last.enter_time};
  return out;
}

Trajectory ctmc_simulate_competing(const GeneratorMatrix& g, int init,
                                   const SimulationLimits& limits, std::uint64_t seed) {
  const std::size_t n = g.size();
  require_state(init, n);
  SplitMixStream rng(seed);
  return run_jump_process(init, limits, rng,
                          [&](int s, SplitMixStream& r) -> std::optional<std::pair<double, int>> {
                            double best = std::numeric_limits<double>::infinity();
                            int owner = -1;
                            for (std::size_t j = 0; j < n; ++j) {
                              const double q = g.rate(s, j);
                              if (static_cast<int>(j) == s || q <= 0.0) continue;
                              const double clock = r.exponential(q);
                              if (clock < best) {
                                best = clock;
                                owner = static_cast<int>(j);
                              }
                            }
                            if (owner < 0) return std::nullopt;
                            return std::pair{best, owner};
                          });
}

Trajectory ctmc_simulate_embedded(const GeneratorMatrix& g, int init,
                                  const SimulationLimits& limits, std::uint64_t seed) {
  const std::size_t n = g.size();
  require_state(init, n);
  SplitMixStream rng(seed);
  return run_jump_process(init, limits, rng,
                          [&](int s, SplitMixStream& r) -> std::optional<std::pair<double, int>> {
                            const double exit = g.exit_rate(s);
                            if (exit <= 0.0) return std::nullopt;
                            const double hold = r.exponential(exit);
                            const auto& row = g.rows()[s];
                            const auto next = categorical(row, exit, r, s);
                            return std::pair{hold, static_cast<int>(next)};
                          });
}

UniformizedChain uniformize(const GeneratorMatrix& g, std::optional<double> lambda_u) {
  const double max_rate = g.max_exit_rate();
  const double lambda = lambda_u.value_or(max_rate);
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw ValidationError("uniformization rate must be positive");
  }
  if (lambda < max_rate) {
    throw ValidationError("uniformization rate " + std::to_string(lambda) +
                          " is below the largest exit rate " + std::to_string(max_rate));
  }
  const std::size_t n = g.size();
  UniformizedChain out{RowMatrix(n, std::vector<double>(n)), lambda};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.p[i][j] = (i == j ? 1.0 : 0.0) + g.rate(i, j) / lambda;
    }
    out.p[i][i] = std::max(0.0, out.p[i][i]);
  }
  return out;
}

Trajectory uniformized_simulate(const RowMatrix& p, double lambda_u, int init,
                                const SimulationLimits& limits, std::uint64_t seed) {
  validate_stochastic(p, false);
  if (!positive_finite(lambda_u)) throw ValidationError("uniformization rate must be positive");
  const std::size_t n = p.size();
  require_state(init, n);
  SplitMixStream rng(seed);
  return run_jump_process(init, limits, rng,
                          [&](int s, SplitMixStream& r) -> std::optional<std::pair<double, int>> {
                            if (p[s][s] >= 1.0) return std::nullopt;
                            const double tick = r.exponential(lambda_u);
                            const auto next = categorical(p[s], 1.0, r, n);
                            return std::pair{tick, static_cast<int>(next)};
                          });
}

std::vector<double> transient_distribution(const GeneratorMatrix& g, double t, int init,
                                           double tol, std::optional<double> lambda_u) {
  const std::size_t n = g.size();
  require_state(init, n);
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("time must be >= 0");
  if (!(tol > 0.0)) throw ValidationError("tolerance must be > 0");
  std::vector<double> v(n, 0.0);
  v[init] = 1.0;
  const double max_rate = g.max_exit_rate();
  if (t == 0.0 || (max_rate == 0.0 && !lambda_u)) return v;
  const auto chain = uniformize(g, lambda_u);
  const double mu = chain.lambda_u * t;
  std::vector<double> out(n, 0.0);
  std::vector<double> next(n);
  double accumulated = 0.0;
  const double log_mu = std::log(mu);
  for (std::size_t k = 0;; ++k) {
    const double w = std::exp(-mu + static_cast<double>(k) * log_mu - std::lgamma(k + 1.0));
    for (std::size_t j = 0; j < n; ++j) out[j] += w * v[j];
    accumulated += w;
    if (accumulated >= 1.0 - tol && static_cast<double>(k) >= mu) break;
    if (k > 100 + static_cast<std::size_t>(10.0 * mu + 50.0 * std::sqrt(mu))) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) next[j] += v[i] * chain.p[i][j];
    }
    v.swap(next);
  }
  return out;
}

PoissonnessReport poisson_stats(const EventStream& s, std::size_t n_bins) {
  if (s.events.size() < 10) throw ValidationError("Poissonness statistics need at least 10 events");
  if (n_bins < 10) throw ValidationError("Poissonness statistics need at least 10 bins");
  PoissonnessReport out;
  out.n_events = s.events.size();
  out.n_bins = n_bins;
  out.lambda_hat = static_cast<double>(s.events.size()) / s.horizon;
  std::vector<double> gaps;
  gaps.reserve(s.events.size() - 1);
  for (std::size_t i = 1; i < s.events.size(); ++i) {
    gaps.push_back(s.events[i].time - s.events[i - 1].time);
  }
  out.ks_statistic = stats::ks_exponential(gaps, out.lambda_hat);
  std::vector<double> counts(n_bins, 0.0);
  const double width = s.horizon / static_cast<double>(n_bins);
  for (const auto& e : s.events) {
    const auto b = std::min(n_bins - 1, static_cast<std::size_t>(e.time / width));
    counts[b] += 1.0;
  }
  const double m = stats::mean(counts);
  out.dispersion_index = m > 0.0 ? stats::variance(counts) / m : 0.0;
  return out;
}

std::vector<SparseExperimentRow> sparse_superposition_experiment(
    const SparseExperimentConfig& config) {
  require_horizon(config.horizon);
  if (!positive_finite(config.total_rate)) throw ValidationError("total rate must be > 0");
  if (config.seeds == 0) throw ValidationError("at least one seed is required");
  const std::size_t bins = config.n_bins != 0
                               ? config.n_bins
                               : std::max<std::size_t>(10, static_cast<std::size_t>(
                                                               config.horizon * config.total_rate));
  const SplitMixStream master(config.seed);
  std::vector<SparseExperimentRow> rows;
  for (const std::size_t n : config.n_sources) {
    if (n == 0) throw ValidationError("n_sources must be >= 1");
    SparseExperimentRow row;
    row.n_sources = n;
    row.ks.resize(config.seeds);
    row.dispersion.resize(config.seeds);
    const double factor = static_cast<double>(n) / (config.base.mean() * config.total_rate);
    const SojournModel model = config.base.scaled(factor);
    const SplitMixStream per_n = master.substream(n);
    auto work = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t s = begin; s < config.seeds; s += stride) {
        const SplitMixStream per_seed = per_n.substream(s);
        std::vector<EventStream> sources;
        sources.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
          sources.push_back(sample_renewal(model, config.horizon, per_seed.substream(i)(),
                                           RenewalStart::stationary, static_cast<int>(i)));
        }
        const auto report = poisson_stats(superpose(sources), bins);
        row.ks[s] = report.ks_statistic;
        row.dispersion[s] = report.dispersion_index;
      }
    };
    const unsigned threads =
        std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.seeds)));
    if (threads == 1) {
      work(0, 1);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }
    row.median_ks = stats::median(row.ks);
    row.median_dispersion = stats::median(row.dispersion);
    rows.push_back(std::move(row));
  }
  return rows;
}

double calibrate_ks_null(double rate, double horizon, std::size_t replicates, double q,
                         std::uint64_t seed) {
  if (replicates == 0) throw ValidationError("at least one replicate is required");
  const SplitMixStream master(seed);
  const SojournModel model(Exponential{rate});
  std::vector<double> ks(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto s = sample_renewal(model, horizon, master.substream(r)());
    ks[r] = poisson_stats(s, 10).ks_statistic;
  }
  return stats::quantile(std::move(ks), q);
}

std::vector<int> map_states_pm(const Trajectory& t, const std::map<int, int>& mapping,
                               double sample_dt) {
  if (!positive_finite(sample_dt)) throw ValidationError("sample_dt must be > 0");
  for (const auto& [state, value] : mapping) {
    if (value == 0) throw ValidationError("state mapping values must be nonzero");
  }
  const auto count = static_cast<std::size_t>(std::floor(t.horizon / sample_dt + 1e-9)) + 1;
  std::vector<int> out;
  out.reserve(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double time = static_cast<double>(k) * sample_dt;
    while (seg + 1 < t.segments.size() && t.segments[seg + 1].enter_time <= time) ++seg;
    const auto it = mapping.find(t.segments[seg].state);
    if (it == mapping.end()) {
      throw ValidationError("state " + std::to_string(t.segments[seg].state) + " has no mapping");
    }
    out.push_back(it->second);
  }
  return out;
}

namespace {

template <typename T>
AcfEstimate acf_impl(std::span<const T> x, std::size_t max_lag, AcfDenominator denominator) {
  if (x.size() <= max_lag) throw ValidationError("sequence is too short for the requested lag");
  const std::size_t len = x.size();
  AcfEstimate out;
  out.raw.resize(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t m = 0; m + k < len; ++m) {
      acc += static_cast<double>(x[m]) * static_cast<double>(x[m + k]);
    }
    const double denom =
        denominator == AcfDenominator::unbiased ? static_cast<double>(len - k) : static_cast<double>(len);
    out.raw[k] = acc / denom;
  }
  out.normalized = out.raw;
  if (out.raw[0] != 0.0) {
    for (double& v : out.normalized) v /= out.raw[0];
  }
  return out;
}

}  // namespace

AcfEstimate acf_estimate(std::span<const double> x, std::size_t max_lag,
                         AcfDenominator denominator) {
  return acf_impl(x, max_lag, denominator);
}

AcfEstimate acf_estimate(std::span<const int> x, std::size_t max_lag, AcfDenominator denominator) {
  return acf_impl(x, max_lag, denominator);
}

std::vector<int> telegraph_simulate(double p_flip, std::size_t length, std::uint64_t seed) {
  if (!(p_flip > 0.0 && p_flip < 1.0)) throw ValidationError("p_flip must lie in (0, 1)");
  SplitMixStream rng(seed);
  std::vector<int> out(length);
  if (length == 0) return out;
  out[0] = rng.sign();
  for (std::size_t k = 1; k < length; ++k) {
    out[k] = rng.uniform01() < p_flip ? -out[k - 1] : out[k - 1];
  }
  return out;
}

}  // namespace cpdkit
