#include "cwpaint/table_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cwpaint {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

const char* method_name(HittingMethod m) {
  return m == HittingMethod::transitive ? "transitive" : "per_target";
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail(ErrorCode::io, "malformed number '" + s + "' in hitting table");
  return v;
}

}  // namespace

std::string hitting_table_header_json(const HittingTable& table) {
  nlohmann::ordered_json j;
  j["spec"] = table.spec;
  j["laziness"] = table.laziness;
  j["c"] = table.c;
  j["t_mix"] = table.t_mix;
  j["horizon"] = table.horizon;
  j["base"] = table.base;
  j["method"] = method_name(table.method);
  j["vertex_count"] = table.f_values.size();
  j["f_bar"] = table.f_bar;
  j["F"] = table.f_statistic;
  if (table.full_f_statistic) j["full_F"] = *table.full_f_statistic;
  return j.dump(2) + "\n";
}

void write_hitting_table(const HittingTable& table, const std::string& csv_path,
                         const std::string& json_path) {
  if (table.f_values.size() != table.green_values.size())
    fail(ErrorCode::invalid_argument, "hitting table columns differ in length");
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) fail(ErrorCode::io, "cannot write " + csv_path);
  csv << "y_index,f_value,g_value\n";
  for (std::size_t y = 0; y < table.f_values.size(); ++y)
    csv << y << ',' << format_double(table.f_values[y]) << ',' << format_double(table.green_values[y])
        << '\n';
  if (!csv) fail(ErrorCode::io, "write failed for " + csv_path);

  std::ofstream js(json_path, std::ios::binary);
  if (!js) fail(ErrorCode::io, "cannot write " + json_path);
  js << hitting_table_header_json(table);
  if (!js) fail(ErrorCode::io, "write failed for " + json_path);
}

HittingTable read_hitting_table(const std::string& csv_path, const std::string& json_path) {
  std::ifstream js(json_path);
  if (!js) fail(ErrorCode::io, "cannot read " + json_path);
  nlohmann::json j;
  try {
    js >> j;
  } catch (const std::exception& e) {
    fail(ErrorCode::io, json_path + ": " + e.what());
  }
  HittingTable t;
  try {
    t.spec = j.at("spec").get<std::string>();
    t.laziness = j.at("laziness").get<double>();
    t.c = j.at("c").get<double>();
    t.t_mix = j.at("t_mix").get<std::uint64_t>();
    t.horizon = j.at("horizon").get<std::uint64_t>();
    t.base = j.at("base").get<Vertex>();
    t.method = j.at("method").get<std::string>() == "per_target" ? HittingMethod::per_target
                                                                  : HittingMethod::transitive;
    t.f_bar = j.at("f_bar").get<double>();
    t.f_statistic = j.at("F").get<double>();
    if (j.contains("full_F")) t.full_f_statistic = j.at("full_F").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::io, json_path + ": " + e.what());
  }
  const auto count = j.at("vertex_count").get<std::size_t>();

  std::ifstream csv(csv_path);
  if (!csv) fail(ErrorCode::io, "cannot read " + csv_path);
  std::string line;
  std::getline(csv, line);
  if (line != "y_index,f_value,g_value") fail(ErrorCode::io, csv_path + ": unexpected header");
  t.f_values.reserve(count);
  t.green_values.reserve(count);
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string idx, f, g;
    if (!std::getline(ss, idx, ',') || !std::getline(ss, f, ',') || !std::getline(ss, g))
      fail(ErrorCode::io, csv_path + ": malformed row '" + line + "'");
    if (std::stoull(idx) != t.f_values.size()) fail(ErrorCode::io, csv_path + ": rows out of order");
    t.f_values.push_back(parse_double(f));
    t.green_values.push_back(parse_double(g));
  }
  if (t.f_values.size() != count) fail(ErrorCode::io, csv_path + ": row count does not match header");
  return t;
}

}  // namespace cwpaint
