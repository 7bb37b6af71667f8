#include "sbos/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sbos {

namespace {

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kResultHeader << "\n";
  for (const ResultRow& r : rows) {
    out << r.experiment << ',' << r.policy << ',' << r.family << ','
        << r.system_count << ',' << r.budget << ',' << r.replications << ','
        << format_double("%.6f", r.pcs) << ',' << format_double("%.6f", r.stderr_)
        << ',' << format_double("%.3f", r.mean_evaluations) << ',' << r.base_seed
        << ',' << format_double("%.3f", r.wall_time_s) << "\n";
  }
  return out.str();
}

std::vector<ResultRow> parse_result_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("csv: empty input, expected header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultHeader) {
    const std::vector<std::string> expected = split_line(kResultHeader);
    const std::vector<std::string> got = split_line(line);
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i >= got.size() || got[i] != expected[i])
        throw std::runtime_error("csv: header mismatch, expected column '" +
                                 expected[i] + "' at position " +
                                 std::to_string(i + 1));
    }
    throw std::runtime_error("csv: header has extra trailing columns");
  }

  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_line(line);
    if (f.size() != 11)
      throw std::runtime_error("csv: line " + std::to_string(line_no) +
                               " has " + std::to_string(f.size()) +
                               " fields, expected 11");
    try {
      ResultRow r;
      r.experiment = f[0];
      r.policy = f[1];
      r.family = f[2];
      r.system_count = std::stoi(f[3]);
      r.budget = std::stoll(f[4]);
      r.replications = std::stoi(f[5]);
      r.pcs = std::stod(f[6]);
      r.stderr_ = std::stod(f[7]);
      r.mean_evaluations = std::stod(f[8]);
      r.base_seed = std::stoull(f[9]);
      r.wall_time_s = std::stod(f[10]);
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      throw std::runtime_error("csv: line " + std::to_string(line_no) +
                               " has a malformed numeric field");
    }
  }
  return rows;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace sbos
