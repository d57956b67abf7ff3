#include "evsim/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "evsim/errors.hpp"

namespace evsim {

std::string format_number(double value) {
  char buffer[48];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                       std::chars_format::general, 12);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buffer, ptr);
}

std::string epochs_csv_header(int station_count) {
  std::string header =
      "epoch,demand,max_queue,max_sojourn,mean_utility,overflow,fallback,"
      "stability_relaxed";
  for (int i = 1; i <= station_count; ++i) {
    header += ",quota_" + std::to_string(i);
  }
  return header;
}

std::string epoch_report_csv_row(const EpochReport& report) {
  std::string row = std::to_string(report.epoch);
  row += ',' + std::to_string(report.demand);
  row += ',' + format_number(report.max_queue);
  row += ',' + format_number(report.max_sojourn);
  row += ',' + format_number(report.mean_utility);
  row += ',' + std::to_string(report.overflow_count);
  row += ',' + std::to_string(report.fallback_count);
  row += ',';
  row += report.stability_relaxed ? '1' : '0';
  for (long long quota : report.quotas) {
    row += ',' + std::to_string(quota);
  }
  return row;
}

std::string reports_to_csv(const std::vector<EpochReport>& reports,
                           int station_count) {
  std::string out = epochs_csv_header(station_count);
  out += '\n';
  for (const auto& report : reports) {
    out += epoch_report_csv_row(report);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad numeric field: " + text);
  }
  return value;
}

}  // namespace

std::vector<EpochReport> parse_epochs_csv(const std::string& text) {
  std::vector<EpochReport> reports;
  std::stringstream stream(text);
  std::string line;
  bool header = true;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() < 8) {
      throw std::invalid_argument("short CSV row: " + line);
    }
    EpochReport report;
    report.epoch = std::stoi(fields[0]);
    report.demand = std::stoi(fields[1]);
    report.max_queue = parse_double(fields[2]);
    report.max_sojourn = parse_double(fields[3]);
    report.mean_utility = parse_double(fields[4]);
    report.overflow_count = std::stoi(fields[5]);
    report.fallback_count = std::stoi(fields[6]);
    report.stability_relaxed = fields[7] == "1";
    for (std::size_t k = 8; k < fields.size(); ++k) {
      report.quotas.push_back(std::stoll(fields[k]));
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

void write_text_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path fs_path(path);
  if (fs_path.has_parent_path()) {
    std::filesystem::create_directories(fs_path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace evsim
