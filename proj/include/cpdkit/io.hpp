#pragma once

// File formats used by the command-line tool.
//
//   matrix JSON     {"n": N, "data": [[row-major reals]]}
//   acf JSON        {"rho": [reals], "m": M}   ("m" optional, default 1)
//   EventStream CSV header "time,source", 17 significant digits
//   Trajectory CSV  header "time,state",  17 significant digits

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpdkit/acf.hpp"
#include "cpdkit/definiteness.hpp"
#include "cpdkit/pointproc.hpp"
#include "cpdkit/quadform.hpp"

namespace cpdkit::io {

using nlohmann::json;

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

RowMatrix matrix_from_json(const json& doc);
json matrix_to_json(const RowMatrix& m);
json matrix_to_json(const SymmetricMatrix& m);

struct AcfInput {
  std::vector<double> rho;
  int m_bound = 1;
};
AcfInput acf_from_json(const json& doc);

// Comma- or whitespace-separated reals.
std::vector<double> parse_reals(const std::string& text);
std::vector<int> parse_ints(const std::string& text);
std::vector<double> read_reals_file(const std::string& path);

void write_events_csv(std::ostream& os, const EventStream& s);
EventStream read_events_csv(std::istream& is, double horizon);

void write_trajectory_csv(std::ostream& os, const Trajectory& t);
Trajectory read_trajectory_csv(std::istream& is, double horizon);

json to_json(const DefinitenessVerdict& v);
json to_json(const MembershipVerdict& v);
json to_json(const PoissonnessReport& r);

std::vector<WeightedPoint> decomposition_from_json(const json& doc);

}  // namespace cpdkit::io
