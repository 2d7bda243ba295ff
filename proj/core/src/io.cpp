#include "hmvp/io.hpp"

#include <cmath>
#include <sstream>

namespace hmvp {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << std::scientific << v;
  return os.str();
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path);
}

namespace {
std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += "\"";
  return quoted;
}
}  // namespace

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ",";
    out_ << csv_escape(cells[i]);
  }
  out_ << "\r\n";
}

void CsvWriter::numeric_row(const std::vector<double>& cells) {
  std::vector<std::string> text;
  text.reserve(cells.size());
  for (double v : cells) text.push_back(format_number(v));
  row(text);
}

json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  if (std::isnan(v)) return json("nan");
  return json(v);
}

json to_json(const MomentReport& rep) {
  json j;
  j["n"] = rep.n;
  j["epsilon"] = rep.epsilon;
  j["odd_moments"] = json_number(rep.odd_moments);
  j["vertical_moment"] = json_number(rep.vertical_moment);
  j["cross_moments"] = json_number(rep.cross_moments);
  j["diagonal_moments"] = rep.diagonal_moments;
  j["M_estimate"] = json_number(rep.M_estimate);
  return j;
}

json to_json(const ExpansionReport& rep) {
  json j;
  j["eps_ladder"] = rep.eps_ladder;
  j["residuals"] = rep.residuals;
  j["predicted_terms"] = rep.predicted_terms;
  j["values"] = rep.values;
  j["fitted_order"] = json_number(rep.fitted_order);
  j["exact"] = rep.exact;
  return j;
}

json to_json(const CounterexampleReport& rep) {
  json j;
  j["eps_ladder"] = rep.eps_ladder;
  j["pde_residual_max"] = json_number(rep.pde_residual_max);
  j["psi_mass_rel_err_max"] = json_number(rep.psi_mass_rel_err_max);
  j["spatial_mean_rel_err_max"] = json_number(rep.spatial_mean_rel_err_max);
  j["mean_minus_value"] = rep.mean_minus_value;
  j["predicted"] = rep.predicted;
  j["fitted_order"] = json_number(rep.fitted_order);
  return j;
}

json to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["parameters"] = m.parameters;
  j["tool_version"] = m.tool_version;
  j["outputs"] = m.outputs;
  j["wall_time_seconds"] = m.wall_time_seconds;
  return j;
}

void write_json(const std::string& path, const json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << value.dump(2) << "\n";
}

}  // namespace hmvp
