#pragma once

#include <string>
#include <vector>

#include "evsim/sim.hpp"

namespace evsim {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Locale-independent decimal formatting at 12 significant digits, the
// fixed precision of every CSV the tool emits.
std::string format_number(double value);

std::string epochs_csv_header(int station_count);
std::string epoch_report_csv_row(const EpochReport& report);
std::string reports_to_csv(const std::vector<EpochReport>& reports,
                           int station_count);
std::vector<EpochReport> parse_epochs_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace evsim
