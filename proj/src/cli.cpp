#include "evsim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "evsim/config.hpp"
#include "evsim/errors.hpp"
#include "evsim/io.hpp"
#include "evsim/participation.hpp"
#include "json.hpp"

namespace evsim::cli {

namespace {

using nlohmann::json;

ScenarioConfig resolve_config(const CommonArgs& args) {
  ScenarioConfig config;
  if (args.config_path.empty()) {
    json empty = json::object();
    config = config_from_json_text("{}", "<defaults>", args.overrides);
  } else {
    config = load_config_file(args.config_path, args.overrides);
  }
  if (args.seed) config.seed = *args.seed;
  if (args.policy) config.policy = parse_policy(*args.policy);
  return config;
}

std::string out_path(const std::string& out_dir, const std::string& name) {
  return (std::filesystem::path(out_dir) / name).string();
}

json summary_json(const ScenarioConfig& config,
                  const std::vector<EpochReport>& reports) {
  long long total_evs = 0;
  long long total_overflow = 0;
  long long total_fallback = 0;
  bool any_relaxed = false;
  for (const auto& r : reports) {
    total_evs += r.demand;
    total_overflow += r.overflow_count;
    total_fallback += r.fallback_count;
    any_relaxed = any_relaxed || r.stability_relaxed;
  }
  json summary;
  summary["artifact_version"] = kArtifactVersion;
  summary["seed"] = config.seed;
  summary["aggregates"] = {
      {"epochs", static_cast<long long>(reports.size())},
      {"total_evs", total_evs},
      {"mean_utility", mean_utility_per_ev(reports)},
      {"avg_max_queue", average_max_queue(reports)},
      {"avg_max_sojourn", average_max_sojourn(reports)},
      {"total_overflow", total_overflow},
      {"total_fallback", total_fallback},
      {"any_stability_relaxed", any_relaxed},
  };
  summary["config"] = json::parse(config_to_json_text(config));
  return summary;
}

// Runs independent jobs across threads, preserving result order.
template <typename Job, typename Result>
std::vector<Result> parallel_run(const std::vector<Job>& jobs,
                                 Result (*runner)(const Job&)) {
  std::vector<Result> results(jobs.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(jobs.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t k = next.fetch_add(1);
        if (k >= jobs.size()) break;
        results[k] = runner(jobs[k]);
      }
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

struct CompareJob {
  ScenarioConfig config;
};

std::vector<EpochReport> run_compare_job(const CompareJob& job) {
  return run_scenario(job.config);
}

int guard(std::ostream& diag, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    diag << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    diag << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    diag << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

std::function<double(double)> parse_cdf_spec(const std::string& spec) {
  const auto open = spec.find('(');
  const auto close = spec.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw ConfigError("cdf spec '" + spec +
                      "' must be uniform(lo,hi), point(c), or table(path)");
  }
  const std::string kind = spec.substr(0, open);
  const std::string body = spec.substr(open + 1, close - open - 1);
  if (kind == "uniform") {
    const auto comma = body.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("uniform cdf needs two bounds: uniform(lo,hi)");
    }
    const double lo = std::stod(body.substr(0, comma));
    const double hi = std::stod(body.substr(comma + 1));
    if (lo < 0.0 || hi <= lo) {
      throw ConfigError("uniform cdf needs 0 <= lo < hi");
    }
    return [lo, hi](double v) {
      if (v < lo) return 0.0;
      if (v >= hi) return 1.0;
      return (v - lo) / (hi - lo);
    };
  }
  if (kind == "point") {
    const double c = std::stod(body);
    if (c < 0.0) throw ConfigError("point cdf needs a nonnegative cost");
    return [c](double v) { return v >= c && v >= 0.0 ? 1.0 : 0.0; };
  }
  if (kind == "table") {
    const std::string text = read_text_file(body);
    std::vector<std::pair<double, double>> points;
    std::size_t start = 0;
    int line_no = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      const std::string line = text.substr(start, end - start);
      start = end + 1;
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) {
        throw ConfigError(body + ": line " + std::to_string(line_no) +
                          ": expected 'cost,cumulative_probability'");
      }
      const double cost = std::stod(line.substr(0, comma));
      const double prob = std::stod(line.substr(comma + 1));
      if (cost < 0.0 || prob < 0.0 || prob > 1.0) {
        throw ConfigError(body + ": line " + std::to_string(line_no) +
                          ": cost must be >= 0 and probability in [0, 1]");
      }
      if (!points.empty() &&
          (cost < points.back().first || prob < points.back().second)) {
        throw ConfigError(body + ": line " + std::to_string(line_no) +
                          ": table must be nondecreasing");
      }
      points.emplace_back(cost, prob);
    }
    if (points.size() < 2) {
      throw ConfigError(body + ": table needs at least two rows");
    }
    return [points](double v) {
      if (v < points.front().first) return 0.0;
      if (v >= points.back().first) return points.back().second;
      for (std::size_t k = 1; k < points.size(); ++k) {
        if (v <= points[k].first) {
          const auto& [c0, p0] = points[k - 1];
          const auto& [c1, p1] = points[k];
          if (c1 == c0) return p1;
          return p0 + (p1 - p0) * (v - c0) / (c1 - c0);
        }
      }
      return points.back().second;
    };
  }
  throw ConfigError("unknown cdf kind '" + kind + "'");
}

}  // namespace

int run_simulate(const CommonArgs& args, std::ostream& diag) {
  return guard(diag, [&]() {
    const ScenarioConfig config = resolve_config(args);
    const std::vector<EpochReport> reports = run_scenario(config);
    write_text_file(out_path(args.out_dir, "epochs.csv"),
                    reports_to_csv(reports,
                                   static_cast<int>(config.stations.size())));
    write_text_file(out_path(args.out_dir, "summary.json"),
                    summary_json(config, reports).dump(2) + "\n");
    diag << "wrote " << out_path(args.out_dir, "epochs.csv") << " ("
         << reports.size() << " epochs)\n";
    return kExitOk;
  });
}

int run_compare(const CommonArgs& args, const std::vector<std::string>& policies,
                int seed_count, std::ostream& diag) {
  return guard(diag, [&]() {
    if (policies.empty()) throw ConfigError("at least one policy required");
    if (seed_count < 1) throw ConfigError("at least one seed required");
    const ScenarioConfig base = resolve_config(args);
    std::vector<Policy> parsed;
    for (const auto& name : policies) parsed.push_back(parse_policy(name));

    std::vector<CompareJob> jobs;
    for (int s = 0; s < seed_count; ++s) {
      for (Policy policy : parsed) {
        CompareJob job;
        job.config = base;
        job.config.seed = base.seed + static_cast<std::uint64_t>(s);
        job.config.policy = policy;
        jobs.push_back(std::move(job));
      }
    }
    const auto results =
        parallel_run<CompareJob, std::vector<EpochReport>>(jobs,
                                                           &run_compare_job);

    // Per-seed reference for time saving: the two-stage run, if present.
    std::map<std::uint64_t, const std::vector<EpochReport>*> reference;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      if (jobs[k].config.policy == Policy::kTwoStage) {
        reference[jobs[k].config.seed] = &results[k];
      }
    }

    std::string compare_csv =
        "seed,policy,avg_max_queue,avg_max_sojourn,mean_utility,time_saving\n";
    std::string q_series = "seed,policy,epoch,value\n";
    std::string w_series = "seed,policy,epoch,value\n";
    std::string u_series = "seed,policy,epoch,value\n";
    std::string t_series = "seed,policy,epoch,value,cumulative\n";
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      const auto& config = jobs[k].config;
      const auto& reports = results[k];
      const std::string policy = policy_name(config.policy);
      const auto* ref = reference.count(config.seed) ? reference[config.seed]
                                                     : nullptr;
      double time_saving = 0.0;
      if (ref != nullptr) {
        for (std::size_t e = 0; e < reports.size(); ++e) {
          time_saving += reports[e].max_sojourn - (*ref)[e].max_sojourn;
        }
        time_saving /= static_cast<double>(reports.size());
      }
      compare_csv += std::to_string(config.seed) + ',' + policy + ',' +
                     format_number(average_max_queue(reports)) + ',' +
                     format_number(average_max_sojourn(reports)) + ',' +
                     format_number(mean_utility_per_ev(reports)) + ',' +
                     format_number(time_saving) + '\n';
      double cumulative = 0.0;
      for (std::size_t e = 0; e < reports.size(); ++e) {
        const std::string prefix = std::to_string(config.seed) + ',' + policy +
                                   ',' + std::to_string(reports[e].epoch) + ',';
        q_series += prefix + format_number(reports[e].max_queue) + '\n';
        w_series += prefix + format_number(reports[e].max_sojourn) + '\n';
        u_series += prefix + format_number(reports[e].mean_utility) + '\n';
        if (ref != nullptr && config.policy != Policy::kTwoStage) {
          const double saving =
              reports[e].max_sojourn - (*ref)[e].max_sojourn;
          cumulative += saving;
          t_series += prefix + format_number(saving) + ',' +
                      format_number(cumulative) + '\n';
        }
      }
    }
    write_text_file(out_path(args.out_dir, "compare.csv"), compare_csv);
    write_text_file(out_path(args.out_dir, "series_max_queue.csv"), q_series);
    write_text_file(out_path(args.out_dir, "series_max_sojourn.csv"), w_series);
    write_text_file(out_path(args.out_dir, "series_utility.csv"), u_series);
    write_text_file(out_path(args.out_dir, "series_time_saving.csv"), t_series);
    diag << "wrote " << out_path(args.out_dir, "compare.csv") << " ("
         << jobs.size() << " rows)\n";
    return kExitOk;
  });
}

namespace {

struct ScalingJob {
  ScenarioConfig base;
  std::vector<int> counts;
};

std::vector<ScalingRow> run_scaling_job(const ScalingJob& job) {
  return run_scaling_experiment(job.base, job.counts, 1);
}

}  // namespace

int run_scaling(const CommonArgs& args, const std::vector<int>& station_counts,
                int seed_count, std::ostream& diag) {
  return guard(diag, [&]() {
    if (station_counts.empty()) {
      throw ConfigError("at least one station count required");
    }
    if (seed_count < 1) throw ConfigError("at least one seed required");
    const ScenarioConfig base = resolve_config(args);

    std::vector<ScalingJob> jobs;
    for (int s = 0; s < seed_count; ++s) {
      ScalingJob job;
      job.base = base;
      job.base.seed = base.seed + static_cast<std::uint64_t>(s);
      job.counts = station_counts;
      jobs.push_back(std::move(job));
    }
    const auto per_seed =
        parallel_run<ScalingJob, std::vector<ScalingRow>>(jobs,
                                                          &run_scaling_job);
    std::vector<ScalingRow> rows;
    for (const auto& seed_rows : per_seed) {
      rows.insert(rows.end(), seed_rows.begin(), seed_rows.end());
    }

    // Aggregate over seeds per (S, policy), in station-count order.
    std::string scaling_csv =
        "stations,policy,mean_utility,avg_max_sojourn,worst_seed_max_sojourn,"
        "avg_max_queue\n";
    for (int count : station_counts) {
      for (Policy policy :
           {Policy::kTwoStage, Policy::kNearest, Policy::kMatching}) {
        double utility = 0.0, sojourn = 0.0, worst_sojourn = 0.0, queue = 0.0;
        int n = 0;
        for (const auto& row : rows) {
          if (row.station_count != count || row.policy != policy) continue;
          utility += row.mean_utility;
          sojourn += row.avg_max_sojourn;
          worst_sojourn = std::max(worst_sojourn, row.avg_max_sojourn);
          queue += row.avg_max_queue;
          ++n;
        }
        scaling_csv += std::to_string(count) + ',' + policy_name(policy) + ',' +
                       format_number(utility / n) + ',' +
                       format_number(sojourn / n) + ',' +
                       format_number(worst_sojourn) + ',' +
                       format_number(queue / n) + '\n';
      }
    }
    std::string series =
        "stations,policy,seed,mean_utility,avg_max_sojourn,avg_max_queue\n";
    for (const auto& row : rows) {
      series += std::to_string(row.station_count) + ',' +
                policy_name(row.policy) + ',' + std::to_string(row.seed) + ',' +
                format_number(row.mean_utility) + ',' +
                format_number(row.avg_max_sojourn) + ',' +
                format_number(row.avg_max_queue) + '\n';
    }
    write_text_file(out_path(args.out_dir, "scaling.csv"), scaling_csv);
    write_text_file(out_path(args.out_dir, "scaling_series.csv"), series);
    diag << "wrote " << out_path(args.out_dir, "scaling.csv") << "\n";
    return kExitOk;
  });
}

int run_participation(const ParticipationArgs& args, std::ostream& diag) {
  return guard(diag, [&]() {
    ParticipationParams params;
    params.network_benefit = args.network_benefit;
    params.spillover = args.spillover;
    params.overhead = args.overhead;
    params.join_cost = args.join_cost;

    ParticipationOutcome outcome;
    try {
      outcome = sustainable_interval(params);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }

    json out;
    out["artifact_version"] = kArtifactVersion;
    out["params"] = {{"A", params.network_benefit},
                     {"G", params.spillover},
                     {"B", params.overhead},
                     {"c", params.join_cost}};
    out["discriminant"] = outcome.discriminant;
    diag << "discriminant = " << format_number(outcome.discriminant) << "\n";
    if (outcome.roots) {
      out["roots"] = {outcome.roots->first, outcome.roots->second};
      diag << "roots = [" << format_number(outcome.roots->first) << ", "
           << format_number(outcome.roots->second) << "]\n";
    } else {
      out["roots"] = nullptr;
      diag << "roots = none\n";
    }
    if (outcome.sustainable) {
      out["sustainable_interval"] = {outcome.sustainable->first,
                                     outcome.sustainable->second};
      diag << "sustainable interval = [" << format_number(outcome.sustainable->first)
           << ", " << format_number(outcome.sustainable->second) << "]\n";
    } else {
      out["sustainable_interval"] = nullptr;
      diag << "sustainable interval = empty\n";
    }

    if (!args.cdf_spec.empty()) {
      const auto cdf = parse_cdf_spec(args.cdf_spec);
      std::vector<AdoptionFixedPoint> points;
      try {
        points = heterogeneous_fixed_points(params.network_benefit,
                                            params.spillover, params.overhead,
                                            cdf, args.grid_points);
      } catch (const InvalidCdfError& e) {
        throw ConfigError(e.what());
      }
      json fixed = json::array();
      for (const auto& p : points) {
        fixed.push_back({{"m", p.participation}, {"stable", p.stable}});
        diag << "fixed point m = " << format_number(p.participation)
             << (p.stable ? " (stable)" : " (unstable)") << "\n";
      }
      out["cdf"] = args.cdf_spec;
      out["fixed_points"] = fixed;
    }

    write_text_file(out_path(args.out_dir, "participation.json"),
                    out.dump(2) + "\n");
    return kExitOk;
  });
}

int dispatch_main(int argc, char** argv) {
  CLI::App app{"Two-stage EV charging allocation simulator"};
  app.require_subcommand(1);

  CommonArgs common;
  std::uint64_t seed_value = 0;
  std::string policy_value;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", common.config_path,
                    "Scenario config file (JSON, // comments allowed)");
    cmd->add_option("--override", common.overrides,
                    "Dotted-path override key=value (repeatable)");
    cmd->add_option("--out", common.out_dir, "Output directory");
    cmd->add_option("--seed", seed_value, "Base seed override");
    cmd->add_option("--policy", policy_value,
                    "Policy override: two_stage | nearest | matching");
  };
  auto finish_common = [&](CLI::App* cmd) {
    if (cmd->count("--seed") > 0) common.seed = seed_value;
    if (cmd->count("--policy") > 0) common.policy = policy_value;
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Run one scenario");
  add_common(simulate);

  CLI::App* compare =
      app.add_subcommand("compare", "Run policies on shared seeds");
  add_common(compare);
  std::vector<std::string> policies{"two_stage", "nearest", "matching"};
  int compare_seeds = 20;
  compare->add_option("--policies", policies, "Policies to compare")
      ->delimiter(',');
  compare->add_option("--seeds", compare_seeds, "Number of seeds");

  CLI::App* scaling =
      app.add_subcommand("scaling", "Station-count scaling sweep");
  add_common(scaling);
  std::vector<int> station_counts{3, 5, 8, 12};
  int scaling_seeds = 20;
  scaling->add_option("--stations", station_counts, "Station counts")
      ->delimiter(',');
  scaling->add_option("--seeds", scaling_seeds, "Number of seeds");

  CLI::App* participation =
      app.add_subcommand("participation", "Adoption threshold analysis");
  ParticipationArgs part;
  participation->add_option("--A,--network-benefit", part.network_benefit,
                            "Network benefit A");
  participation->add_option("--G,--spillover", part.spillover, "Spillover G");
  participation->add_option("--B,--overhead", part.overhead, "Overhead B");
  participation->add_option("--c,--join-cost", part.join_cost, "Join cost c");
  participation->add_option(
      "--cdf", part.cdf_spec,
      "Heterogeneous cost CDF: uniform(lo,hi) | point(c) | table(path)");
  participation->add_option("--grid", part.grid_points, "Fixed-point grid size");
  participation->add_option("--out", part.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (simulate->parsed()) {
    finish_common(simulate);
    return run_simulate(common, std::cout);
  }
  if (compare->parsed()) {
    finish_common(compare);
    return run_compare(common, policies, compare_seeds, std::cout);
  }
  if (scaling->parsed()) {
    finish_common(scaling);
    return run_scaling(common, station_counts, scaling_seeds, std::cout);
  }
  if (participation->parsed()) return run_participation(part, std::cout);
  return kExitConfig;
}

}  // namespace evsim::cli
