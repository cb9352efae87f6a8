#include "cpdkit/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "cpdkit/error.hpp"

namespace cpdkit::io {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

RowMatrix matrix_from_json(const json& doc) {
  try {
    const auto n = doc.at("n").get<std::size_t>();
    auto data = doc.at("data").get<RowMatrix>();
    if (data.size() != n) throw DimensionError("matrix 'data' has " + std::to_string(data.size()) +
                                               " rows but n = " + std::to_string(n));
    for (const auto& row : data) {
      if (row.size() != n) throw DimensionError("matrix is not square");
    }
    return data;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed matrix document: ") + e.what());
  }
}

json matrix_to_json(const RowMatrix& m) { return json{{"n", m.size()}, {"data", m}}; }

json matrix_to_json(const SymmetricMatrix& m) { return matrix_to_json(m.to_rows()); }

AcfInput acf_from_json(const json& doc) {
  try {
    AcfInput in;
    in.rho = doc.at("rho").get<std::vector<double>>();
    if (doc.contains("m")) in.m_bound = doc.at("m").get<int>();
    return in;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed acf document: ") + e.what());
  }
}

std::vector<double> parse_reals(const std::string& text) {
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',' || c == ';' || c == '\n' || c == '\t' || c == '\r') c = ' ';
  }
  std::istringstream is(cleaned);
  std::vector<double> out;
  std::string token;
  while (is >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::logic_error&) {
      throw ValidationError("cannot parse number '" + token + "'");
    }
    if (used != token.size()) throw ValidationError("cannot parse number '" + token + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_reals(text)) {
    if (v != static_cast<int>(v)) throw ValidationError("expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<double> read_reals_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_reals(ss.str());
}

namespace {

template <typename Row>
std::vector<Row> read_two_column_csv(std::istream& is, const std::string& header,
                                     auto&& make_row) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ValidationError("expected CSV header '" + header + "'");
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("malformed CSV line '" + line + "'");
    try {
      rows.push_back(make_row(std::stod(line.substr(0, comma)), std::stoi(line.substr(comma + 1))));
    } catch (const std::logic_error&) {
      throw ValidationError("malformed CSV line '" + line + "'");
    }
  }
  return rows;
}

}  // namespace

void write_events_csv(std::ostream& os, const EventStream& s) {
  os << "time,source\n" << std::setprecision(17);
  for (const auto& e : s.events) os << e.time << ',' << e.source << '\n';
}

EventStream read_events_csv(std::istream& is, double horizon) {
  EventStream s;
  s.horizon = horizon;
  s.events = read_two_column_csv<Event>(is, "time,source",
                                        [](double t, int src) { return Event{t, src}; });
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const double t = s.events[i].time;
    if (t < 0.0 || t > horizon) throw ValidationError("event time outside [0, horizon]");
    if (i > 0 && t <= s.events[i - 1].time) throw ValidationError("event times must increase");
  }
  return s;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  os << "time,state\n" << std::setprecision(17);
  for (const auto& seg : t.segments) os << seg.enter_time << ',' << seg.state << '\n';
}

Trajectory read_trajectory_csv(std::istream& is, double horizon) {
  Trajectory t;
  t.horizon = horizon;
  t.segments = read_two_column_csv<Segment>(is, "time,state",
                                            [](double time, int st) { return Segment{time, st}; });
  if (t.segments.empty() || t.segments.front().enter_time != 0.0) {
    throw ValidationError("trajectory must start at time 0");
  }
  for (std::size_t i = 1; i < t.segments.size(); ++i) {
    if (t.segments[i].enter_time <= t.segments[i - 1].enter_time) {
      throw ValidationError("trajectory times must increase");
    }
    if (t.segments[i].state == t.segments[i - 1].state) {
      throw ValidationError("consecutive trajectory segments must change state");
    }
  }
  return t;
}

json to_json(const DefinitenessVerdict& v) {
  json j;
  j["verdict"] = to_string(v.verdict);
  j["method"] = to_string(v.method);
  j["tolerance"] = v.tolerance;
  j["margin"] = v.margin ? json(*v.margin) : json(nullptr);
  if (v.witness) {
    j["witness"] = *v.witness;
    j["witness_value"] = *v.witness_value;
  }
  return j;
}

json to_json(const MembershipVerdict& v) {
  json j;
  j["verdict"] = to_string(v.verdict);
  j["order"] = v.order;
  j["m"] = v.m_bound;
  j["method"] = to_string(v.method);
  j["columns"] = v.columns;
  j["infeasibility"] = v.infeasibility;
  if (v.verdict == Membership::member_up_to_order) {
    json d = json::array();
    for (const auto& wp : v.decomposition) d.push_back({{"weight", wp.weight}, {"point", wp.point}});
    j["decomposition"] = std::move(d);
    j["residual"] = v.residual;
    j["weight_sum"] = v.weight_sum;
  } else {
    j["witness"] = matrix_to_json(*v.witness);
    j["witness_trace"] = v.witness_trace;
    j["witness_min_form"] = v.witness_min_form;
    j["witness_verified"] = true;
  }
  if (!v.warnings.empty()) j["warnings"] = v.warnings;
  return j;
}

json to_json(const PoissonnessReport& r) {
  return json{{"ks_statistic", r.ks_statistic},
              {"lambda_hat", r.lambda_hat},
              {"dispersion_index", r.dispersion_index},
              {"n_events", r.n_events},
              {"n_bins", r.n_bins}};
}

std::vector<WeightedPoint> decomposition_from_json(const json& doc) {
  try {
    std::vector<WeightedPoint> out;
    for (const auto& item : doc) {
      out.push_back({item.at("weight").get<double>(), item.at("point").get<std::vector<int>>()});
    }
    return out;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed decomposition: ") + e.what());
  }
}

}  // namespace cpdkit::io
