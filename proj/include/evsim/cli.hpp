#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace evsim::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct CommonArgs {
  std::string config_path;  // empty = built-in defaults
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::string out_dir = "out";
};

// Runs one scenario; writes epochs.csv and summary.json.
int run_simulate(const CommonArgs& args, std::ostream& diag);

// Runs each policy on shared seeds; writes compare.csv plus long-format
// per-epoch series files.
int run_compare(const CommonArgs& args, const std::vector<std::string>& policies,
                int seed_count, std::ostream& diag);

// Station-count sweep; writes scaling.csv and scaling_series.csv.
int run_scaling(const CommonArgs& args, const std::vector<int>& station_counts,
                int seed_count, std::ostream& diag);

struct ParticipationArgs {
  double network_benefit = 2.0;  // A
  double spillover = 0.0;        // G
  double overhead = 1.0;         // B
  double join_cost = 0.75;       // c
  std::string cdf_spec;          // uniform(lo,hi) | point(c) | table(path)
  int grid_points = 10000;
  std::string out_dir = "out";
};

// Prints the discriminant, roots, and sustainable interval; with a CDF
// spec also computes adoption fixed points. Writes participation.json.
int run_participation(const ParticipationArgs& args, std::ostream& diag);

// Full argv dispatcher used by the binary.
int dispatch_main(int argc, char** argv);

}  // namespace evsim::cli
