#include <doctest.h>

#include <cmath>

#include "cpdkit/error.hpp"
#include "cpdkit/pointproc.hpp"
#include "cpdkit/stats.hpp"
#include "support.hpp"

using namespace cpdkit;

namespace {

const RowMatrix kTwoState{{-1, 1}, {1, -1}};

std::vector<double> gaps(const EventStream& s) {
  std::vector<double> out;
  double prev = 0.0;
  for (const auto& e : s.events) {
    out.push_back(e.time - prev);
    prev = e.time;
  }
  return out;
}

}  // namespace

TEST_CASE("SojournModel parsing and validation") {
  CHECK(SojournModel::parse("exp:2").mean() == 0.5);
  CHECK(SojournModel::parse("uniform:0.5,1.5").mean() == 1.0);
  CHECK(SojournModel::parse("det:3").mean() == 3.0);
  CHECK(SojournModel::parse("weibull:1,2").mean() == doctest::Approx(2.0));
  CHECK(SojournModel::parse(SojournModel::parse("uniform:0.5,1.5").to_string()).mean() == 1.0);
  CHECK_THROWS_AS(SojournModel::parse("uniform:2,1"), ValidationError);
  CHECK_THROWS_AS(SojournModel::parse("exp:0"), ValidationError);
  CHECK_THROWS_AS(SojournModel::parse("gamma:1"), ValidationError);
  CHECK(SojournModel::parse("uniform:0.5,1.5").scaled(10).mean() == doctest::Approx(10.0));
}

TEST_CASE("sample_renewal examples") {
  auto s = sample_renewal(Deterministic{1.0}, 3.5, 1);
  REQUIRE(s.events.size() == 3);
  CHECK(s.events[0].time == 1.0);
  CHECK(s.events[1].time == 2.0);
  CHECK(s.events[2].time == 3.0);

  s = sample_renewal(Exponential{1.0}, 1e4, 2);
  const auto g = gaps(s);
  // standard error of the mean interarrival is about 1/sqrt(count)
  CHECK(std::abs(stats::mean(g) - 1.0) <= 3.0 / std::sqrt(1e4));
  CHECK(std::abs(static_cast<double>(s.events.size()) - 1e4) <= 3.0 * 100.0);

  s = sample_renewal(UniformInterval{0.5, 1.5}, 1e4, 3);
  CHECK(std::abs(stats::mean(gaps(s)) - 1.0) <= 3.0 * (1.0 / std::sqrt(12.0)) / 100.0);

  CHECK_THROWS_AS(sample_renewal(Exponential{1.0}, 0.0, 1), ValidationError);
  CHECK(sample_renewal(Exponential{1.0}, 100, 9).events ==
        sample_renewal(Exponential{1.0}, 100, 9).events);
}

TEST_CASE("stationary starts have the forward-recurrence law") {
  // For Uniform(0.5, 1.5) the mean residual is E[L^2] / (2 E[L]) = (1 + 1/12) / 2.
  std::vector<double> first;
  for (std::uint64_t seed = 0; seed < 20000; ++seed) {
    const auto s = sample_renewal(UniformInterval{0.5, 1.5}, 10.0, seed, RenewalStart::stationary);
    first.push_back(s.events.front().time);
  }
  const double expected = (1.0 + 1.0 / 12.0) / 2.0;
  const double sd = std::sqrt(stats::variance(first) / first.size());
  CHECK(std::abs(stats::mean(first) - expected) <= 4.0 * sd);
}

TEST_CASE("superpose examples") {
  EventStream a{{{0.5, 0}, {2.0, 0}}, 3.0, 0};
  EventStream b{{{1.0, 1}}, 3.0, 0};
  auto m = superpose(std::vector<EventStream>{a, b});
  CHECK(m.events == std::vector<Event>{{0.5, 0}, {1.0, 1}, {2.0, 0}});
  m = superpose(std::vector<EventStream>{a});
  CHECK(m.events == a.events);
  EventStream c{{{1.0, 2}}, 4.0, 0};
  CHECK_THROWS_AS(superpose(std::vector<EventStream>{a, c}), ValidationError);

  EventStream d{{{1.0, 3}}, 3.0, 0};
  m = superpose(std::vector<EventStream>{b, d});
  CHECK(m.jittered_ties == 1);
  CHECK(m.events[1].time > m.events[0].time);
}

TEST_CASE("superposing many sparse exponential streams is Poisson-like") {
  std::vector<EventStream> streams;
  const SplitMixStream master(5);
  for (int k = 0; k < 100; ++k) {
    streams.push_back(sample_renewal(Exponential{0.01}, 1e4, master.substream(k)(),
                                     RenewalStart::ordinary, k));
  }
  const auto merged = superpose(streams);
  std::size_t total = 0;
  for (const auto& s : streams) total += s.events.size();
  CHECK(merged.events.size() == total);
  const auto report = poisson_stats(merged, 10000);
  CHECK(report.lambda_hat == doctest::Approx(1.0).epsilon(0.05));
  CHECK(report.dispersion_index == doctest::Approx(1.0).epsilon(0.1));
  // source labels partition the merged stream back into the inputs
  std::vector<std::vector<double>> back(100);
  for (const auto& e : merged.events) back[e.source].push_back(e.time);
  for (int k = 0; k < 100; ++k) {
    REQUIRE(back[k].size() == streams[k].events.size());
    for (std::size_t i = 0; i < back[k].size(); ++i) CHECK(back[k][i] == streams[k].events[i].time);
  }
}

TEST_CASE("semi_markov_simulate examples") {
  const RowMatrix swap{{0, 1}, {1, 0}};
  const std::vector<SojournModel> det{Deterministic{1.0}, Deterministic{1.0}};
  const auto t = semi_markov_simulate(swap, det, 0, 5.5, 1);
  REQUIRE(t.segments.size() == 6);
  for (std::size_t k = 0; k < t.segments.size(); ++k) {
    CHECK(t.segments[k].enter_time == static_cast<double>(k));
    CHECK(t.segments[k].state == static_cast<int>(k % 2));
  }
  const auto so = extract_sojourns(t);
  for (const auto& [state, list] : so.completed) {
    for (double d : list) CHECK(d == 1.0);
  }

  const std::vector<SojournModel> expo{Exponential{1.0}, Exponential{2.0}};
  const auto long_run = semi_markov_simulate(swap, expo, 0, SimulationLimits(1e9, 10000), 2);
  const auto s = extract_sojourns(long_run);
  const auto& s0 = s.completed.at(0);
  const auto& s1 = s.completed.at(1);
  CHECK(std::abs(stats::mean(s0) - 1.0) <= 3.0 / std::sqrt(s0.size()));
  CHECK(std::abs(stats::mean(s1) - 0.5) <= 3.0 * 0.5 / std::sqrt(s1.size()));

  CHECK_THROWS_AS(semi_markov_simulate({{0.5, 0.5}, {1, 0}}, det, 0, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(semi_markov_simulate({{0, 1}, {1, 0}}, std::vector<SojournModel>{Deterministic{1}},
                                       0, 1.0, 1),
                  DimensionError);
}

TEST_CASE("semi-Markov with exponential sojourns matches the embedded CTMC") {
  const RowMatrix q{{-1, 0.25, 0.75}, {2, -3, 1}, {0.5, 0.5, -1}};
  const auto g = GeneratorMatrix::from_rows(q);
  RowMatrix p(3, std::vector<double>(3, 0.0));
  std::vector<SojournModel> sojourns;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) p[i][j] = q[i][j] / g.exit_rate(i);
    }
    sojourns.emplace_back(Exponential{g.exit_rate(i)});
  }
  const SimulationLimits limits(1e12, 30000);
  const auto a = extract_sojourns(semi_markov_simulate(p, sojourns, 0, limits, 11));
  const auto b = extract_sojourns(ctmc_simulate_embedded(g, 0, limits, 12));
  for (int s = 0; s < 3; ++s) {
    CHECK(stats::ks_two_sample(a.completed.at(s), b.completed.at(s)).p_value > 0.001);
  }
}

TEST_CASE("extract_sojourns examples") {
  Trajectory t{{{0.0, 0}, {1.5, 1}, {2.0, 0}}, 3.7, false};
  auto s = extract_sojourns(t);
  CHECK(s.completed.at(0) == std::vector<double>{1.5});
  CHECK(s.completed.at(1) == std::vector<double>{0.5});
  REQUIRE(s.censored);
  CHECK(s.censored->first == 0);
  CHECK(s.censored->second == doctest::Approx(1.7));

  s = extract_sojourns(Trajectory{{{0.0, 2}}, 4.0, false});
  CHECK(s.completed.empty());
  REQUIRE(s.censored);
  CHECK(s.censored->second == 4.0);
}

TEST_CASE("GeneratorMatrix validation") {
  CHECK_NOTHROW(GeneratorMatrix::from_rows(kTwoState));
  CHECK_THROWS_AS(GeneratorMatrix::from_rows({{0.0}}), ValidationError);
  CHECK_THROWS_AS(GeneratorMatrix::from_rows({{-1, 0.5}, {1, -1}}), ValidationError);
  CHECK_THROWS_AS(GeneratorMatrix::from_rows({{1, -1}, {1, -1}}), ValidationError);
  CHECK_THROWS(GeneratorMatrix::from_rows({{-1, 1, 0}, {1, -1}}));
}

TEST_CASE("ctmc_simulate_competing examples") {
  const auto g = GeneratorMatrix::from_rows(kTwoState);
  const auto t = ctmc_simulate_competing(g, 0, SimulationLimits(1e12, 10000), 3);
  CHECK(t.jumps() == 10000);
  const auto s = extract_sojourns(t);
  for (int st = 0; st < 2; ++st) {
    const auto& d = s.completed.at(st);
    CHECK(std::abs(stats::mean(d) - 1.0) <= 3.0 / std::sqrt(d.size()));
  }

  const auto absorbing = GeneratorMatrix::from_rows({{-1, 1}, {0, 0}});
  const auto ta = ctmc_simulate_competing(absorbing, 0, 100.0, 4);
  CHECK(ta.segments.size() == 2);
  CHECK(ta.absorbed);
  CHECK(ta.segments.back().state == 1);

  const auto cycle = GeneratorMatrix::from_rows({{-2, 1, 1}, {1, -2, 1}, {1, 1, -2}});
  const auto tc = ctmc_simulate_competing(cycle, 0, SimulationLimits(1e12, 30000), 5);
  std::vector<std::vector<double>> counts(3, std::vector<double>(3, 0.0));
  for (std::size_t k = 1; k < tc.segments.size(); ++k) {
    counts[tc.segments[k - 1].state][tc.segments[k].state] += 1.0;
  }
  for (int i = 0; i < 3; ++i) {
    std::vector<double> succ;
    for (int j = 0; j < 3; ++j) {
      if (j != i) succ.push_back(counts[i][j]);
    }
    const double total = succ[0] + succ[1];
    const double x2 = (succ[0] - total / 2) * (succ[0] - total / 2) / (total / 2) * 2;
    CHECK(stats::chi_square_survival(x2, 1) > 0.001);
  }
}

TEST_CASE("ctmc_simulate_embedded examples") {
  const auto g2 = GeneratorMatrix::from_rows({{-2, 2}, {0, 0}});
  const auto t = ctmc_simulate_embedded(g2, 0, 100.0, 6);
  CHECK(t.segments.size() == 2);
  CHECK(t.absorbed);

  const auto g = GeneratorMatrix::from_rows(kTwoState);
  const SimulationLimits limits(1e12, 10000);
  const auto a = extract_sojourns(ctmc_simulate_embedded(g, 0, limits, 7));
  const auto b = extract_sojourns(ctmc_simulate_competing(g, 0, limits, 8));
  CHECK(stats::ks_two_sample(a.completed.at(0), b.completed.at(0)).p_value > 0.001);

  const auto g4 = GeneratorMatrix::from_rows(
      {{-3, 1, 1, 1}, {0.5, -1, 0.25, 0.25}, {2, 2, -5, 1}, {0.1, 0.1, 0.3, -0.5}});
  const auto s4 = extract_sojourns(ctmc_simulate_embedded(g4, 0, SimulationLimits(1e12, 200000), 9));
  for (int st = 0; st < 4; ++st) {
    CHECK(stats::mean(s4.completed.at(st)) * g4.exit_rate(st) == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("uniformize examples") {
  const auto g = GeneratorMatrix::from_rows(kTwoState);
  auto u = uniformize(g, 2.0);
  CHECK(u.p == RowMatrix{{0.5, 0.5}, {0.5, 0.5}});
  u = uniformize(g);
  CHECK(u.lambda_u == 1.0);
  CHECK(u.p == RowMatrix{{0, 1}, {1, 0}});
  CHECK_THROWS_AS(uniformize(g, 0.5), ValidationError);
}

TEST_CASE("uniformized_simulate examples") {
  const auto t = uniformized_simulate({{1, 0}, {0, 1}}, 3.0, 1, 100.0, 1);
  CHECK(t.segments.size() == 1);

  const auto g = GeneratorMatrix::from_rows(kTwoState);
  const auto lo = uniformize(g);
  const auto hi = uniformize(g, 10.0);
  const SimulationLimits limits(1e12, 20000);
  const auto a = extract_sojourns(uniformized_simulate(lo.p, lo.lambda_u, 0, limits, 2));
  const auto b = extract_sojourns(uniformized_simulate(hi.p, hi.lambda_u, 0, limits, 3));
  CHECK(stats::ks_two_sample(a.completed.at(0), b.completed.at(0)).p_value > 0.001);
  CHECK(stats::ks_two_sample(a.completed.at(1), b.completed.at(1)).p_value > 0.001);
}

TEST_CASE("transient_distribution examples") {
  const auto g = GeneratorMatrix::from_rows(kTwoState);
  auto d = transient_distribution(g, 0.0, 1);
  CHECK(d == std::vector<double>{0.0, 1.0});
  d = transient_distribution(g, 1.0, 0);
  CHECK(d[0] == doctest::Approx(0.5 + 0.5 * std::exp(-2.0)).epsilon(1e-10));
  CHECK(d[1] == doctest::Approx(0.5 - 0.5 * std::exp(-2.0)).epsilon(1e-10));
  d = transient_distribution(g, 50.0, 0);
  CHECK(std::abs(d[0] - 0.5) <= 1e-10);
  CHECK(std::abs(d[1] - 0.5) <= 1e-10);
  d = transient_distribution(g, 2000.0, 0);
  CHECK(std::abs(d[0] + d[1] - 1.0) <= 1e-10);
}

TEST_CASE("poisson_stats examples") {
  auto r = poisson_stats(sample_renewal(Deterministic{1.0}, 1000.0, 1), 100);
  CHECK(r.dispersion_index < 0.01);
  CHECK(r.ks_statistic > 0.3);

  int passes = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    r = poisson_stats(sample_renewal(Exponential{1.0}, 1e4, seed), 10000);
    passes += r.ks_statistic < 1.36 / std::sqrt(static_cast<double>(r.n_events));
    CHECK(r.dispersion_index >= 0.9);
    CHECK(r.dispersion_index <= 1.1);
  }
  CHECK(passes >= 18);

  EventStream a = sample_renewal(Deterministic{1.0}, 1000.0, 1);
  EventStream b = a;
  for (auto& e : b.events) {
    e.time -= 0.5;
    e.source = 1;
  }
  r = poisson_stats(superpose(std::vector<EventStream>{a, b}), 100);
  CHECK(r.dispersion_index < 0.01);

  CHECK_THROWS_AS(poisson_stats(sample_renewal(Deterministic{1.0}, 5.0, 1), 10), ValidationError);
  CHECK_THROWS_AS(poisson_stats(sample_renewal(Deterministic{1.0}, 500.0, 1), 5), ValidationError);
}

TEST_CASE("sparse superposition experiment") {
  SparseExperimentConfig cfg;
  cfg.n_sources = {1, 25};
  cfg.seeds = 5;
  cfg.horizon = 2000;
  const auto rows = sparse_superposition_experiment(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].median_dispersion < 0.5);
  CHECK(rows[1].median_ks < rows[0].median_ks);

  cfg.base = SojournModel(Exponential{1.0});
  cfg.n_sources = {1, 5};
  const auto expo = sparse_superposition_experiment(cfg);
  for (const auto& row : expo) {
    CHECK(row.median_dispersion == doctest::Approx(1.0).epsilon(0.15));
    CHECK(row.median_ks < 1.36 / std::sqrt(2000.0));
  }

  cfg.threads = 3;
  const auto threaded = sparse_superposition_experiment(cfg);
  for (std::size_t k = 0; k < expo.size(); ++k) CHECK(threaded[k].ks == expo[k].ks);
}

TEST_CASE("map_states_pm examples") {
  const Trajectory constant{{{0.0, 0}}, 5.0, false};
  CHECK(map_states_pm(constant, {{0, 1}}, 1.0) == std::vector<int>(6, 1));
  const Trajectory alt{{{0.0, 0}, {1.0, 1}, {2.0, 0}, {3.0, 1}}, 4.0, false};
  CHECK(map_states_pm(alt, {{0, 1}, {1, -1}}, 1.0) == std::vector<int>{1, -1, 1, -1, -1});
  CHECK_THROWS_AS(map_states_pm(alt, {{0, 1}}, 1.0), ValidationError);

  const auto g = GeneratorMatrix::from_rows(kTwoState);
  const auto t = ctmc_simulate_competing(g, 0, 1e5, 10);
  const auto x = map_states_pm(t, {{0, 1}, {1, -1}}, 0.1);
  const auto est = acf_estimate(std::span<const int>(x), 5);
  for (std::size_t k = 0; k <= 5; ++k) {
    CHECK(std::abs(est.normalized[k] - std::exp(-0.2 * static_cast<double>(k))) <= 0.03);
  }
}

TEST_CASE("acf_estimate examples") {
  const std::vector<int> ones(100, 1);
  auto e = acf_estimate(std::span<const int>(ones), 4);
  for (double v : e.normalized) CHECK(v == 1.0);
  std::vector<int> alt(100);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? -1 : 1;
  e = acf_estimate(std::span<const int>(alt), 4);
  for (std::size_t k = 0; k <= 4; ++k) CHECK(e.normalized[k] == (k % 2 ? -1.0 : 1.0));
  CHECK(e.raw[0] == 1.0);
  CHECK_THROWS_AS(acf_estimate(std::span<const int>(ones), 100), ValidationError);

  const std::vector<double> x{1, 2, 3};
  e = acf_estimate(x, 1, AcfDenominator::biased);
  CHECK(e.raw[0] == doctest::Approx(14.0 / 3.0));
  CHECK(e.raw[1] == doctest::Approx(8.0 / 3.0));
  e = acf_estimate(x, 1);
  CHECK(e.raw[1] == doctest::Approx(4.0));
}

TEST_CASE("telegraph_simulate examples") {
  const auto quiet = telegraph_simulate(1e-9, 1000, 1);
  for (int v : quiet) CHECK(v == quiet[0]);

  const std::size_t len = 200000;
  const auto iid = telegraph_simulate(0.5, len, 2);
  const auto e = acf_estimate(std::span<const int>(iid), 4);
  for (std::size_t k = 1; k <= 4; ++k) CHECK(std::abs(e.normalized[k]) <= 3.0 / std::sqrt(len));

  const auto tel = telegraph_simulate(0.25, len, 3);
  const auto et = acf_estimate(std::span<const int>(tel), 4);
  for (std::size_t k = 0; k <= 4; ++k) CHECK(std::abs(et.normalized[k] - std::pow(0.5, k)) <= 0.02);

  CHECK_THROWS_AS(telegraph_simulate(0.0, 10, 1), ValidationError);
  CHECK_THROWS_AS(telegraph_simulate(1.0, 10, 1), ValidationError);
}

TEST_CASE("statistics helpers") {
  CHECK(stats::median({3, 1, 2}) == 2.0);
  CHECK(stats::median({4, 1, 2, 3}) == 2.5);
  CHECK(stats::variance(std::vector<double>{1, 2, 3, 4}) == doctest::Approx(5.0 / 3.0));
  CHECK(stats::kolmogorov_survival(0.0) == 1.0);
  CHECK(stats::kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(0.01));
  CHECK(stats::chi_square_survival(3.841, 1) == doctest::Approx(0.05).epsilon(0.01));
  const auto same = stats::chi_square_homogeneity({{10, 20, 30}, {10, 20, 30}});
  CHECK(same.statistic == doctest::Approx(0.0));
  CHECK(same.dof == 2);
  CHECK(stats::ks_exponential(std::vector<double>{1.0, 1.0, 1.0}, 1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)));
}
