#include "cpdkit/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cpdkit/acf.hpp"
#include "cpdkit/definiteness.hpp"
#include "cpdkit/error.hpp"
#include "cpdkit/io.hpp"
#include "cpdkit/pointproc.hpp"
#include "cpdkit/search.hpp"
#include "cpdkit/stats.hpp"

namespace cpdkit::cli {

namespace {

using io::json;

constexpr int kMaxEnumCap = 30;

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  std::optional<int> cap_enum;
  std::optional<double> tol;
  std::string out;
};

struct Outcome {
  json doc;
  std::string summary;
  int code = kSuccess;
};

EnumerationOptions enumeration_options(const Globals& g) {
  EnumerationOptions opts;
  if (g.cap_enum) {
    if (*g.cap_enum < 1 || *g.cap_enum > kMaxEnumCap) {
      throw ValidationError("--cap-enum must lie in [1, " + std::to_string(kMaxEnumCap) + "]");
    }
    opts.hypercube_cap = static_cast<std::size_t>(*g.cap_enum);
    opts.lattice_cap = std::uint64_t{1} << *g.cap_enum;
  }
  return opts;
}

SymmetricMatrix load_matrix(const std::string& path) {
  return SymmetricMatrix::from_rows(io::matrix_from_json(io::read_json_file(path)),
                                    AsymmetryPolicy::symmetrize);
}

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::positive: return kSuccess;
    case Verdict::not_positive: return kNegative;
    case Verdict::unknown: return kUnknown;
  }
  return kInternal;
}

int membership_code(Membership m) {
  return m == Membership::member_up_to_order ? kSuccess : kNegative;
}

Verdict parse_verdict(const std::string& s) {
  if (s == "POSITIVE") return Verdict::positive;
  if (s == "NOT_POSITIVE") return Verdict::not_positive;
  if (s == "UNKNOWN") return Verdict::unknown;
  throw ValidationError("unknown verdict '" + s + "' in certificate");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Re-checks a definiteness certificate against the matrix. m_bound == 0
// means the hypercube.
Outcome verify_definiteness(const std::string& command, const SymmetricMatrix& c, int m_bound,
                            const json& cert, const Globals& g) {
  const Verdict claimed = parse_verdict(cert.at("verdict").get<std::string>());
  const double tol = cert.value("tolerance", 0.0);
  Outcome o;
  o.doc["command"] = command;
  o.doc["verify"] = true;
  o.doc["verdict"] = to_string(claimed);
  bool ok = true;
  if (claimed == Verdict::not_positive) {
    const auto w = cert.at("witness").get<std::vector<int>>();
    const double value = m_bound == 0 ? qf_value(c, SignVector(w))
                                      : qf_value(c, LatticeVector(w, m_bound));
    o.doc["witness_value"] = value;
    ok = value < -tol;
  } else if (claimed == Verdict::positive) {
    const auto opts = enumeration_options(g);
    const double min = m_bound == 0 ? enumerate_hypercube_min(c, opts).min_value
                                    : enumerate_lattice_min(c, m_bound, opts).min_value;
    o.doc["recomputed_margin"] = min;
    const double margin = cert.at("margin").get<double>();
    ok = min >= -tol && std::abs(min - margin) <= tol + 1e-12 * (1.0 + std::abs(min));
  }
  if (!ok) throw ValidationError("certificate rejected: claimed " + std::string(to_string(claimed)));
  o.doc["certificate_ok"] = true;
  o.summary = command + " --verify: " + std::string(to_string(claimed)) + " certificate confirmed";
  o.code = verdict_code(claimed);
  return o;
}

Outcome verify_membership(const std::string& command, const AcfSequence& acf, const json& cert,
                          const Globals& g) {
  const auto r = build_toeplitz(acf.rho()).matrix();
  const std::string claimed = cert.at("verdict").get<std::string>();
  Outcome o;
  o.doc["command"] = command;
  o.doc["verify"] = true;
  o.doc["verdict"] = claimed;
  if (claimed == to_string(Membership::member_up_to_order)) {
    const auto decomposition = io::decomposition_from_json(cert.at("decomposition"));
    for (const auto& wp : decomposition) {
      // validates the support points
      if (acf.is_unit()) SignVector{wp.point};
      else LatticeVector(wp.point, acf.m_bound());
    }
    const auto check = verify_decomposition(r, decomposition);
    o.doc["residual"] = check.residual;
    o.doc["weight_sum"] = check.weight_sum;
    bool ok = check.residual <= kResidualTolerance;
    if (acf.is_unit()) ok = ok && std::abs(check.weight_sum - 1.0) <= kResidualTolerance;
    if (!ok) throw ValidationError("certificate rejected: decomposition residual too large");
    o.code = kSuccess;
  } else if (claimed == to_string(Membership::non_member)) {
    const auto x = SymmetricMatrix::from_rows(io::matrix_from_json(cert.at("witness")));
    const auto check = verify_witness(r, x, acf.m_bound(), enumeration_options(g));
    o.doc["witness_min_form"] = check.min_form;
    o.doc["witness_trace"] = check.trace_value;
    if (!check.is_positive_on_set || check.trace_value > -kSeparationTolerance) {
      throw ValidationError("certificate rejected: witness does not separate");
    }
    o.code = kNegative;
  } else {
    throw ValidationError("unknown membership verdict '" + claimed + "'");
  }
  o.doc["certificate_ok"] = true;
  o.summary = command + " --verify: " + claimed + " certificate confirmed";
  return o;
}

AcfSequence load_acf(const std::string& rho_text, const std::string& acf_path,
                     std::optional<int> m_flag, bool lattice) {
  io::AcfInput in;
  if (!acf_path.empty()) {
    in = io::acf_from_json(io::read_json_file(acf_path));
  } else if (!rho_text.empty()) {
    in.rho = io::parse_reals(rho_text);
  } else {
    throw ValidationError("provide --rho or --acf");
  }
  if (m_flag) in.m_bound = *m_flag;
  if (!lattice) {
    if (in.m_bound != 1) throw ValidationError("acf-test handles the unit class; use acf-lattice-test");
    return AcfSequence::unit(in.rho);
  }
  return AcfSequence::lattice(in.rho, in.m_bound);
}

FeasibilityMethod parse_method(const std::string& s) {
  if (s == "auto") return FeasibilityMethod::automatic;
  if (s == "full") return FeasibilityMethod::full_enumeration;
  if (s == "colgen") return FeasibilityMethod::column_generation;
  throw ValidationError("unknown --method '" + s + "'");
}

json trajectory_summary(const Trajectory& t) {
  return json{{"segments", t.segments.size()},
              {"jumps", t.jumps()},
              {"horizon", t.horizon},
              {"absorbed", t.absorbed},
              {"final_state", t.segments.back().state}};
}

void write_csv(const std::string& path, auto&& writer) {
  std::ostringstream os;
  writer(os);
  io::write_text_file(path, os.str());
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cpdkit: corner/lattice positive definiteness, autocorrelation membership and "
               "point-process tools"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed (default fixed constant)");
  app.add_option("--threads", g.threads, "Worker threads for multi-start / experiments")
      ->check(CLI::Range(1u, 256u));
  app.add_option("--cap-enum", g.cap_enum,
                 "Exact enumeration cap: hypercube dimension, lattice points 2^cap");
  app.add_option("--tol", g.tol, "Tolerance override (verdict boundary / series truncation)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out, "Write the JSON result here");

  std::function<Outcome()> handler;

  // --- definiteness -------------------------------------------------------
  std::string matrix_path, method = "exact", verify_path;
  auto* cpd_check = app.add_subcommand("cpd-check", "Corner positive definiteness (exact)");
  cpd_check->add_option("--matrix", matrix_path, "Matrix JSON")->required();
  cpd_check->add_option("--method", method, "exact | anti-stable");
  cpd_check->add_option("--verify", verify_path, "Re-check a result document");
  cpd_check->callback([&] {
    handler = [&] {
      const auto c = load_matrix(matrix_path);
      if (!verify_path.empty()) {
        return verify_definiteness("cpd-check", c, 0, io::read_json_file(verify_path), g);
      }
      DefinitenessVerdict v;
      if (method == "exact") v = cpd_exact(c, enumeration_options(g), g.tol);
      else if (method == "anti-stable") v = cpd_anti_stable(c, enumeration_options(g), g.tol);
      else throw ValidationError("unknown --method '" + method + "'");
      Outcome o{io::to_json(v), "", verdict_code(v.verdict)};
      o.doc["command"] = "cpd-check";
      o.doc["n"] = c.size();
      o.summary = "cpd-check: " + std::string(to_string(v.verdict)) + " (margin " +
                  fmt(*v.margin) + ", n = " + std::to_string(c.size()) + ")";
      return o;
    };
  });

  std::size_t starts = 64;
  auto* cpd_refute_cmd = app.add_subcommand("cpd-refute", "Heuristic search for a violating vertex");
  cpd_refute_cmd->add_option("--matrix", matrix_path, "Matrix JSON")->required();
  cpd_refute_cmd->add_option("--starts", starts, "Number of random starts")->check(CLI::PositiveNumber);
  cpd_refute_cmd->add_option("--verify", verify_path, "Re-check a result document");
  cpd_refute_cmd->callback([&] {
    handler = [&] {
      const auto c = load_matrix(matrix_path);
      if (!verify_path.empty()) {
        return verify_definiteness("cpd-refute", c, 0, io::read_json_file(verify_path), g);
      }
      const auto v = cpd_refute(c, starts, g.seed, g.threads, g.tol);
      Outcome o{io::to_json(v), "", verdict_code(v.verdict)};
      o.doc["command"] = "cpd-refute";
      o.doc["n"] = c.size();
      o.doc["starts"] = starts;
      o.doc["seed"] = g.seed;
      o.summary = "cpd-refute: " + std::string(to_string(v.verdict));
      if (v.witness_value) o.summary += " (witness value " + fmt(*v.witness_value) + ")";
      return o;
    };
  });

  int m_bound = 1;
  auto* lattice_check = app.add_subcommand("lattice-check", "Bounded-lattice positive definiteness");
  lattice_check->add_option("--matrix", matrix_path, "Matrix JSON")->required();
  lattice_check->add_option("--m", m_bound, "Lattice bound M")->required()->check(CLI::PositiveNumber);
  lattice_check->add_option("--verify", verify_path, "Re-check a result document");
  lattice_check->callback([&] {
    handler = [&] {
      const auto c = load_matrix(matrix_path);
      if (!verify_path.empty()) {
        return verify_definiteness("lattice-check", c, m_bound, io::read_json_file(verify_path), g);
      }
      const auto v = lattice_positive_exact(c, m_bound, enumeration_options(g), g.tol);
      Outcome o{io::to_json(v), "", verdict_code(v.verdict)};
      o.doc["command"] = "lattice-check";
      o.doc["n"] = c.size();
      o.doc["m"] = m_bound;
      o.summary = "lattice-check: " + std::string(to_string(v.verdict)) + " (margin " +
                  fmt(*v.margin) + ", M = " + std::to_string(m_bound) + ")";
      return o;
    };
  });

  std::string x0_text;
  bool stable = false, enumerate = false;
  int max_sweeps = 1000;
  auto* antistable = app.add_subcommand("antistable", "Serial sign dynamics on x^T E x");
  antistable->add_option("--matrix", matrix_path, "Matrix JSON")->required();
  antistable->add_option("--x0", x0_text, "Start vector, e.g. \"1,-1,1\" (default: random from --seed)");
  antistable->add_flag("--stable", stable, "Maximize (x <- sign(Ex)) instead of minimize");
  antistable->add_option("--max-sweeps", max_sweeps, "Sweep limit")->check(CLI::PositiveNumber);
  antistable->add_flag("--enumerate", enumerate, "List every anti-stable state");
  antistable->callback([&] {
    handler = [&] {
      const auto split = symmetrize_zero_diag(load_matrix(matrix_path));
      Outcome o;
      o.doc["command"] = "antistable";
      o.doc["trace_offset"] = split.trace_offset;
      if (enumerate) {
        json states = json::array();
        for (const auto& x : enumerate_anti_stable(split, enumeration_options(g))) {
          states.push_back({{"point", std::vector<int>(x.values().begin(), x.values().end())},
                            {"value", qf_value(split.e, x)}});
        }
        o.summary = "antistable: " + std::to_string(states.size()) + " anti-stable representatives";
        o.doc["anti_stable"] = std::move(states);
        return o;
      }
      SearchOptions opts;
      opts.max_sweeps = max_sweeps;
      const SignVector x0 = x0_text.empty() ? random_sign_vector(split.e.size(), g.seed)
                                            : SignVector(io::parse_ints(x0_text));
      const auto res = stable ? run_stable(split, x0, opts) : run_anti_stable(split, x0, opts);
      o.doc["mode"] = stable ? "stable" : "anti_stable";
      o.doc["start"] = std::vector<int>(x0.values().begin(), x0.values().end());
      o.doc["point"] = std::vector<int>(res.best_point.values().begin(), res.best_point.values().end());
      o.doc["value"] = res.best_value;
      o.doc["value_with_trace"] = res.best_value + split.trace_offset;
      o.doc["sweeps"] = res.sweeps_used;
      o.doc["energy_trace"] = res.energy_trace;
      o.summary = "antistable: fixed point value " + fmt(res.best_value) + " after " +
                  std::to_string(res.sweeps_used) + " sweeps";
      return o;
    };
  });

  // --- autocorrelation membership ----------------------------------------
  std::string rho_text, acf_path, acf_method = "auto";
  std::optional<int> m_flag;
  auto membership = [&](const std::string& command, bool lattice) {
    return [&, command, lattice] {
      const auto acf = load_acf(rho_text, acf_path, m_flag, lattice);
      if (!verify_path.empty()) {
        return verify_membership(command, acf, io::read_json_file(verify_path), g);
      }
      MembershipOptions opts;
      opts.method = parse_method(acf_method);
      opts.seed = g.seed;
      const auto v = lattice ? lattice_membership_test(acf, opts) : mcmillan_test(acf, opts);
      Outcome o{io::to_json(v), "", membership_code(v.verdict)};
      o.doc["command"] = command;
      o.doc["rho"] = acf.rho();
      o.summary = command + ": " + std::string(to_string(v.verdict)) + " at N = " +
                  std::to_string(v.order);
      if (v.verdict == Membership::non_member) {
        o.summary += " (witness verified, Trace(RX) = " + fmt(v.witness_trace) + ")";
      } else {
        o.summary += " (" + std::to_string(v.decomposition.size()) + " support points, residual " +
                     fmt(v.residual) + ")";
      }
      return o;
    };
  };
  auto* acf_test = app.add_subcommand("acf-test", "Membership in the +-1 autocorrelation class");
  acf_test->add_option("--rho", rho_text, "Comma-separated lags rho(0..L)");
  acf_test->add_option("--acf", acf_path, "acf JSON");
  acf_test->add_option("--method", acf_method, "auto | full | colgen");
  acf_test->add_option("--verify", verify_path, "Re-check a result document");
  acf_test->callback([&] { handler = membership("acf-test", false); });

  auto* acf_lattice = app.add_subcommand("acf-lattice-test", "Membership in the lattice class");
  acf_lattice->add_option("--rho", rho_text, "Comma-separated lags rho(0..L)");
  acf_lattice->add_option("--acf", acf_path, "acf JSON");
  acf_lattice->add_option("--m", m_flag, "Lattice bound M (overrides the file)");
  acf_lattice->add_option("--verify", verify_path, "Re-check a result document");
  acf_lattice->callback([&] { handler = membership("acf-lattice-test", true); });

  std::string input_path;
  std::size_t max_lag = 5;
  bool biased = false;
  auto* acf_est = app.add_subcommand("acf-estimate", "Sample autocorrelation of a sequence");
  acf_est->add_option("--input", input_path, "File of numbers")->required();
  acf_est->add_option("--max-lag", max_lag, "Largest lag");
  acf_est->add_flag("--biased", biased, "Divide by T instead of T - k");
  acf_est->callback([&] {
    handler = [&] {
      const auto x = io::read_reals_file(input_path);
      const auto est = acf_estimate(x, max_lag,
                                    biased ? AcfDenominator::biased : AcfDenominator::unbiased);
      Outcome o;
      o.doc = json{{"command", "acf-estimate"},
                   {"length", x.size()},
                   {"denominator", biased ? "T" : "T-k"},
                   {"raw", est.raw},
                   {"normalized", est.normalized}};
      o.summary = "acf-estimate: " + std::to_string(max_lag + 1) + " lags from " +
                  std::to_string(x.size()) + " samples";
      return o;
    };
  });

  // --- point processes -----------------------------------------------------
  std::string model_text = "exp:1", csv_path;
  double horizon = 1.0;
  bool stationary = false;
  int source_id = 0;
  auto* pp_sim = app.add_subcommand("pp-simulate", "Simulate a renewal stream");
  pp_sim->add_option("--model", model_text, "exp:R | uniform:A,B | det:D | weibull:K,S");
  pp_sim->add_option("--horizon", horizon, "Horizon in seconds")->required();
  pp_sim->add_flag("--stationary", stationary, "Start from the stationary residual law");
  pp_sim->add_option("--source", source_id, "Source id written to the CSV");
  pp_sim->add_option("--csv", csv_path, "EventStream CSV output")->required();
  pp_sim->callback([&] {
    handler = [&] {
      const auto model = SojournModel::parse(model_text);
      const auto s = sample_renewal(model, horizon, g.seed,
                                    stationary ? RenewalStart::stationary : RenewalStart::ordinary,
                                    source_id);
      write_csv(csv_path, [&](std::ostream& os) { io::write_events_csv(os, s); });
      Outcome o;
      o.doc = json{{"command", "pp-simulate"},   {"model", model.to_string()},
                   {"horizon", horizon},         {"seed", g.seed},
                   {"n_events", s.events.size()}, {"csv", csv_path}};
      o.summary = "pp-simulate: " + std::to_string(s.events.size()) + " events";
      return o;
    };
  });

  std::vector<std::string> inputs;
  auto* pp_sup = app.add_subcommand("pp-superpose", "Merge event streams");
  pp_sup->add_option("--inputs", inputs, "EventStream CSV files")->required()->expected(1, -1);
  pp_sup->add_option("--horizon", horizon, "Common horizon")->required();
  pp_sup->add_option("--csv", csv_path, "Merged CSV output")->required();
  pp_sup->callback([&] {
    handler = [&] {
      std::vector<EventStream> streams;
      for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) throw ValidationError("cannot open '" + path + "'");
        streams.push_back(io::read_events_csv(in, horizon));
      }
      const auto merged = superpose(streams);
      write_csv(csv_path, [&](std::ostream& os) { io::write_events_csv(os, merged); });
      Outcome o;
      o.doc = json{{"command", "pp-superpose"},
                   {"inputs", inputs.size()},
                   {"n_events", merged.events.size()},
                   {"jittered_ties", merged.jittered_ties},
                   {"csv", csv_path}};
      o.summary = "pp-superpose: " + std::to_string(merged.events.size()) + " events";
      if (merged.jittered_ties > 0) {
        o.summary += " (warning: " + std::to_string(merged.jittered_ties) + " ties jittered by 1e-12)";
      }
      return o;
    };
  });

  std::string events_path;
  std::size_t bins = 100;
  auto* pp_poisson = app.add_subcommand("pp-poisson-test", "Poissonness statistics of a stream");
  pp_poisson->add_option("--events", events_path, "EventStream CSV")->required();
  pp_poisson->add_option("--horizon", horizon, "Stream horizon")->required();
  pp_poisson->add_option("--bins", bins, "Count bins for the dispersion index");
  pp_poisson->callback([&] {
    handler = [&] {
      std::ifstream in(events_path);
      if (!in) throw ValidationError("cannot open '" + events_path + "'");
      const auto report = poisson_stats(io::read_events_csv(in, horizon), bins);
      Outcome o{io::to_json(report), "", kSuccess};
      o.doc["command"] = "pp-poisson-test";
      o.doc["ks_critical_5pct_asymptotic"] = 1.36 / std::sqrt(static_cast<double>(report.n_events));
      o.summary = "pp-poisson-test: KS " + fmt(report.ks_statistic) + ", dispersion " +
                  fmt(report.dispersion_index);
      return o;
    };
  });

  // --- CTMC ----------------------------------------------------------------
  std::string q_path, ctmc_method = "competing";
  int init = 0;
  std::uint64_t max_jumps = std::numeric_limits<std::uint64_t>::max();
  std::optional<double> lambda;
  auto* ctmc_sim = app.add_subcommand("ctmc-simulate", "Simulate a CTMC trajectory");
  ctmc_sim->add_option("--q", q_path, "Generator matrix JSON")->required();
  ctmc_sim->add_option("--init", init, "Initial state");
  ctmc_sim->add_option("--horizon", horizon, "Horizon")->required();
  ctmc_sim->add_option("--max-jumps", max_jumps, "Stop after this many jumps");
  ctmc_sim->add_option("--method", ctmc_method, "competing | embedded | uniformized");
  ctmc_sim->add_option("--lambda", lambda, "Uniformization rate (uniformized method)");
  ctmc_sim->add_option("--csv", csv_path, "Trajectory CSV output")->required();
  ctmc_sim->callback([&] {
    handler = [&] {
      const auto gen = GeneratorMatrix::from_rows(io::matrix_from_json(io::read_json_file(q_path)));
      const SimulationLimits limits(horizon, max_jumps);
      Trajectory t;
      if (ctmc_method == "competing") {
        t = ctmc_simulate_competing(gen, init, limits, g.seed);
      } else if (ctmc_method == "embedded") {
        t = ctmc_simulate_embedded(gen, init, limits, g.seed);
      } else if (ctmc_method == "uniformized") {
        const auto chain = uniformize(gen, lambda);
        t = uniformized_simulate(chain.p, chain.lambda_u, init, limits, g.seed);
      } else {
        throw ValidationError("unknown --method '" + ctmc_method + "'");
      }
      write_csv(csv_path, [&](std::ostream& os) { io::write_trajectory_csv(os, t); });
      Outcome o;
      o.doc = trajectory_summary(t);
      o.doc["command"] = "ctmc-simulate";
      o.doc["method"] = ctmc_method;
      o.doc["seed"] = g.seed;
      o.doc["csv"] = csv_path;
      o.summary = "ctmc-simulate: " + std::to_string(t.jumps()) + " jumps" +
                  (t.absorbed ? " (absorbed)" : "");
      return o;
    };
  });

  auto* ctmc_unif = app.add_subcommand("ctmc-uniformize", "P = I + Q / lambda");
  ctmc_unif->add_option("--q", q_path, "Generator matrix JSON")->required();
  ctmc_unif->add_option("--lambda", lambda, "Uniformization rate (default: max exit rate)");
  ctmc_unif->callback([&] {
    handler = [&] {
      const auto gen = GeneratorMatrix::from_rows(io::matrix_from_json(io::read_json_file(q_path)));
      const auto chain = uniformize(gen, lambda);
      Outcome o;
      o.doc = json{{"command", "ctmc-uniformize"},
                   {"lambda_u", chain.lambda_u},
                   {"p", io::matrix_to_json(chain.p)}};
      o.summary = "ctmc-uniformize: lambda_u = " + fmt(chain.lambda_u);
      return o;
    };
  });

  double t_query = 1.0;
  auto* ctmc_tr = app.add_subcommand("ctmc-transient", "Transient distribution by uniformization");
  ctmc_tr->add_option("--q", q_path, "Generator matrix JSON")->required();
  ctmc_tr->add_option("--t", t_query, "Time")->required();
  ctmc_tr->add_option("--init", init, "Initial state");
  ctmc_tr->add_option("--lambda", lambda, "Uniformization rate");
  ctmc_tr->callback([&] {
    handler = [&] {
      const auto gen = GeneratorMatrix::from_rows(io::matrix_from_json(io::read_json_file(q_path)));
      const double tol = g.tol.value_or(1e-12);
      const auto dist = transient_distribution(gen, t_query, init, tol > 0.0 ? tol : 1e-12, lambda);
      Outcome o;
      o.doc = json{{"command", "ctmc-transient"}, {"t", t_query}, {"init", init},
                   {"distribution", dist}};
      o.summary = "ctmc-transient: distribution at t = " + fmt(t_query);
      return o;
    };
  });

  // --- experiments ---------------------------------------------------------
  std::string ns_text = "1,5,25,125";
  std::size_t seeds = 20, null_replicates = 200;
  double total_rate = 1.0;
  auto* exp_sparse = app.add_subcommand("experiment-sparse",
                                        "Superposition of n sparse renewal sources vs n");
  exp_sparse->add_option("--model", model_text, "Base interarrival model")
      ->default_str("uniform:0.5,1.5");
  exp_sparse->add_option("--ns", ns_text, "Source counts, comma-separated");
  exp_sparse->add_option("--seeds", seeds, "Replicates per n");
  exp_sparse->add_option("--horizon", horizon, "Horizon")->default_str("1e4");
  exp_sparse->add_option("--rate", total_rate, "Merged rate");
  exp_sparse->add_option("--bins", bins, "Count bins (0: one per expected event)");
  exp_sparse->add_option("--null-replicates", null_replicates, "Poisson replicates for the KS threshold");
  exp_sparse->callback([&] {
    handler = [&] {
      SparseExperimentConfig cfg;
      if (exp_sparse->count("--model") > 0) cfg.base = SojournModel::parse(model_text);
      if (exp_sparse->count("--horizon") > 0) cfg.horizon = horizon;
      cfg.n_sources.clear();
      for (int n : io::parse_ints(ns_text)) {
        if (n < 1) throw ValidationError("--ns entries must be >= 1");
        cfg.n_sources.push_back(static_cast<std::size_t>(n));
      }
      cfg.total_rate = total_rate;
      cfg.seeds = seeds;
      cfg.n_bins = exp_sparse->count("--bins") > 0 ? bins : 0;
      cfg.seed = g.seed;
      cfg.threads = g.threads;
      const auto rows = sparse_superposition_experiment(cfg);
      const double threshold =
          calibrate_ks_null(cfg.total_rate, cfg.horizon, null_replicates, 0.95, SplitMixStream(g.seed).substream(0x5eed)());
      json jr = json::array();
      bool monotone = true;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (k > 0 && rows[k].median_ks > rows[k - 1].median_ks) monotone = false;
        jr.push_back({{"n", rows[k].n_sources},
                      {"median_ks", rows[k].median_ks},
                      {"median_dispersion", rows[k].median_dispersion},
                      {"ks", rows[k].ks},
                      {"dispersion", rows[k].dispersion}});
      }
      const auto& last = rows.back();
      const bool poisson_like = last.median_ks < threshold && last.median_dispersion >= 0.9 &&
                                last.median_dispersion <= 1.1;
      Outcome o;
      o.doc = json{{"command", "experiment-sparse"},
                   {"model", cfg.base.to_string()},
                   {"total_rate", cfg.total_rate},
                   {"horizon", cfg.horizon},
                   {"seeds", cfg.seeds},
                   {"ks_null_95", threshold},
                   {"rows", std::move(jr)},
                   {"median_ks_non_increasing", monotone},
                   {"largest_n_poisson_like", poisson_like}};
      o.summary = "experiment-sparse: median KS " + fmt(rows.front().median_ks) + " -> " +
                  fmt(last.median_ks) + " (null 95% " + fmt(threshold) + ")";
      o.code = monotone && poisson_like ? kSuccess : kNegative;
      return o;
    };
  });

  double p_flip = 0.25;
  std::size_t length = 1000000;
  auto* exp_tel = app.add_subcommand("experiment-telegraph",
                                     "Telegraph chain -> acf estimate -> membership test");
  exp_tel->add_option("--p", p_flip, "Flip probability");
  exp_tel->add_option("--length", length, "Sequence length");
  exp_tel->add_option("--max-lag", max_lag, "Largest lag (order N = max-lag + 1)");
  exp_tel->add_option("--seeds", seeds, "Replicates")->default_str("5");
  exp_tel->callback([&] {
    handler = [&] {
      const std::size_t reps = exp_tel->count("--seeds") > 0 ? seeds : 5;
      const SplitMixStream master(g.seed);
      json runs = json::array();
      bool all_members = true;
      for (std::size_t s = 0; s < reps; ++s) {
        const auto x = telegraph_simulate(p_flip, length, master.substream(s)());
        const auto est = acf_estimate(std::span<const int>(x), max_lag);
        double dev = 0.0;
        for (std::size_t k = 0; k <= max_lag; ++k) {
          dev = std::max(dev, std::abs(est.normalized[k] - std::pow(1.0 - 2.0 * p_flip, k)));
        }
        const auto v = mcmillan_test(AcfSequence::unit(est.normalized));
        all_members = all_members && v.verdict == Membership::member_up_to_order;
        runs.push_back({{"rho_hat", est.normalized},
                        {"max_abs_deviation", dev},
                        {"verdict", to_string(v.verdict)}});
      }
      Outcome o;
      o.doc = json{{"command", "experiment-telegraph"},
                   {"p", p_flip},
                   {"length", length},
                   {"order", max_lag + 1},
                   {"runs", std::move(runs)}};
      o.summary = std::string("experiment-telegraph: ") +
                  (all_members ? "all runs MEMBER" : "some runs NON_MEMBER");
      o.code = all_members ? kSuccess : kNegative;
      return o;
    };
  });

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    Outcome o = handler();
    const std::string text = o.doc.dump(2) + "\n";
    if (!g.out.empty()) {
      io::write_text_file(g.out, text);
      out << o.summary << '\n';
    } else {
      out << text;
      err << o.summary << '\n';
    }
    return o.code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace cpdkit::cli
