#pragma once

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

#include "hmvp/operators.hpp"

namespace hmvp {

using json = nlohmann::ordered_json;

/// Scientific notation with 17 significant digits; round-trips any double.
std::string format_number(double v);

/// RFC-4180 CSV: fields holding commas, quotes or newlines get quoted, with
/// embedded quotes doubled.  Numeric cells go through format_number.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void row(const std::vector<std::string>& cells);
  void numeric_row(const std::vector<double>& cells);

 private:
  std::ofstream out_;
};

/// JSON value for a double; infinities serialize as the strings "inf"/"-inf"
/// so the files stay standard JSON.
json json_number(double v);

json to_json(const MomentReport& rep);
json to_json(const ExpansionReport& rep);
json to_json(const CounterexampleReport& rep);

struct RunManifest {
  std::string command;
  json parameters;  // flat key-value map
  std::string tool_version;
  std::vector<std::string> outputs;
  double wall_time_seconds = 0.0;
};

json to_json(const RunManifest& m);
void write_json(const std::string& path, const json& value);

}  // namespace hmvp
