// trajfair: fairness audits of trajectory privacy models.
//
// Exit codes: 0 success, 1 input error, 2 configuration error,
// 3 internal invariant failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trajfair/audit.h"
#include "trajfair/csv.h"
#include "trajfair/error.h"
#include "trajfair/report.h"

namespace fs = std::filesystem;
using namespace trajfair;

namespace {

constexpr const char* kConfigEnv = "TRAJFAIR_CONFIG";

struct TrajectoryArgs {
  std::string path;
  std::string geolife;
  TrajectorySchema schema;

  void Register(CLI::App* app) {
    auto* csv = app->add_option("--trajectories", path, "Trajectory CSV");
    auto* plt = app->add_option("--geolife", geolife, "Geolife directory of PLT files");
    csv->excludes(plt);
    app->add_option("--user-column", schema.user, "CSV user column")
        ->capture_default_str();
    app->add_option("--time-column", schema.timestamp, "CSV timestamp column")
        ->capture_default_str();
    app->add_option("--lat-column", schema.latitude, "CSV latitude column")
        ->capture_default_str();
    app->add_option("--lon-column", schema.longitude, "CSV longitude column")
        ->capture_default_str();
  }

  std::vector<Trajectory> Load() const {
    if (path.empty() && geolife.empty()) {
      throw ConfigError("one of --trajectories or --geolife is required");
    }
    TrajectorySet set = geolife.empty() ? LoadTrajectories(path, schema)
                                        : LoadGeolife(geolife);
    if (set.diagnostics.rejected_rows > 0) {
      std::cerr << "trajfair: skipped " << set.diagnostics.rejected_rows
                << " malformed rows\n";
      for (const auto& m : set.diagnostics.messages) std::cerr << "  " << m << '\n';
    }
    return std::move(set.trajectories);
  }
};

// Config file plus flag overrides. Flags win over the file, the file over
// the built-in defaults.
struct ConfigArgs {
  std::string path;
  std::optional<double> granularity;
  std::vector<double> sweep;
  std::optional<double> epsilon;
  std::optional<double> tau;
  std::optional<Timestamp> resample;
  std::optional<int> window;
  std::optional<bool> log_intensity;
  std::optional<int> k_min;
  std::optional<int> k_max;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> gfs_mode;
  std::optional<std::string> ssim_similarity;

  void Register(CLI::App* app) {
    app->add_option("--config", path,
                    std::string("JSON config file (default: $") + kConfigEnv + ")");
    app->add_option("--granularity", granularity, "Grid cell size in meters");
    app->add_option("--sweep", sweep, "Granularities for the sweep, meters")
        ->delimiter(',');
    app->add_option("--epsilon", epsilon, "Similarity threshold");
    app->add_option("--tau", tau, "Outcome delta threshold");
    app->add_option("--resample-interval", resample, "Resampling interval, seconds");
    app->add_option("--ssim-window", window, "Odd SSIM window size");
    app->add_option("--ssim-log", log_intensity, "log1p heatmaps before SSIM");
    app->add_option("--k-min", k_min, "Smallest k tried");
    app->add_option("--k-max", k_max, "Largest k tried");
    app->add_option("--seed", seed, "Seed for all stochastic steps");
    app->add_option("--gfs-mode", gfs_mode, "symmetric or literal");
    app->add_option("--ssim-similarity", ssim_similarity, "pairwise or effective");
  }

  AuditConfig Load() const {
    AuditConfig config;
    std::string file = path;
    if (file.empty()) {
      if (const char* env = std::getenv(kConfigEnv); env != nullptr) file = env;
    }
    if (!file.empty()) config = LoadConfigFile(file);
    if (granularity) config.granularity_m = *granularity;
    if (!sweep.empty()) config.sweep_m = sweep;
    if (epsilon) config.epsilon = *epsilon;
    if (tau) config.tau = *tau;
    if (resample) config.resample_interval_s = *resample;
    if (window) config.ssim.window = *window;
    if (log_intensity) config.ssim.log_intensity = *log_intensity;
    if (k_min) config.k_min = *k_min;
    if (k_max) config.k_max = *k_max;
    if (seed) config.seed = *seed;
    if (gfs_mode) {
      const auto mode = ParseGfsMode(*gfs_mode);
      if (!mode) throw ConfigError("--gfs-mode must be symmetric or literal");
      config.gfs_mode = *mode;
    }
    if (ssim_similarity) {
      const auto mode = ParseSsimSimilarity(*ssim_similarity);
      if (!mode) throw ConfigError("--ssim-similarity must be pairwise or effective");
      config.ssim_similarity = *mode;
    }
    config.Validate();
    return config;
  }
};

// Writes to `path`, or stdout when it is empty or "-".
template <typename Body>
void WriteOutput(const std::string& path, Body&& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  body(out);
  out.flush();
  if (!out) throw InputError("failed writing " + path);
}

void CheckMetric(const std::string& metric) {
  for (auto m : kSimilarityMetrics) {
    if (m == metric) return;
  }
  throw ConfigError("unknown similarity metric '" + metric + "'");
}

void PrintDiagnostics(const std::vector<std::string>& diagnostics) {
  for (const auto& d : diagnostics) std::cerr << "trajfair: " << d << '\n';
}

int RunHeatmap(const TrajectoryArgs& in, const ConfigArgs& cfg,
               const std::string& out_dir, const std::string& format) {
  if (format != "csv" && format != "pgm") {
    throw ConfigError("--format must be csv or pgm");
  }
  const AuditConfig config = cfg.Load();
  const auto trajectories = in.Load();
  const auto spec = GridSpec::ForCohort(trajectories, config.granularity_m);
  std::vector<Heatmap> maps;
  for (const auto& t : trajectories) maps.push_back(BuildHeatmap(t, spec));

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  auto write = [&](const std::string& stem, const Heatmap& map) {
    WriteOutput((fs::path(out_dir) / (stem + "." + format)).string(),
                [&](std::ostream& out) {
                  format == "csv" ? WriteHeatmapCsv(map, out) : WriteHeatmapPgm(map, out);
                });
  };
  for (std::size_t i = 0; i < maps.size(); ++i) write(trajectories[i].user_id, maps[i]);
  write("integrated", IntegrateHeatmaps(maps));
  std::cerr << "trajfair: " << maps.size() << " heatmaps on a " << spec.rows()
            << "x" << spec.cols() << " grid\n";
  return 0;
}

int RunSimilarity(const TrajectoryArgs& in, const ConfigArgs& cfg,
                  const std::string& metric, const std::string& out) {
  CheckMetric(metric);
  const AuditConfig config = cfg.Load();
  const auto cohort = AnalyzeCohort(in.Load(), config.granularity_m, config);
  const auto matrix = SimilarityFor(cohort, metric, config);
  WriteOutput(out, [&](std::ostream& os) {
    WriteLabeledMatrixCsv(os, cohort.users, matrix);
  });
  return 0;
}

int RunEntropy(const TrajectoryArgs& in, const ConfigArgs& cfg,
               const std::string& out) {
  const AuditConfig config = cfg.Load();
  const auto cohort = AnalyzeCohort(in.Load(), config.granularity_m, config);
  WriteOutput(out, [&](std::ostream& os) {
    csv::WriteRow(os, {"user_id", "effective_ssim", "se", "le", "he", "ae"});
    for (std::size_t i = 0; i < cohort.profiles.size(); ++i) {
      const auto& p = cohort.profiles[i];
      csv::WriteRow(os, {p.user_id, csv::FormatDouble(cohort.effective_ssim[i]),
                         csv::FormatDouble(p.se), csv::FormatDouble(p.le),
                         p.he ? csv::FormatDouble(*p.he) : std::string(),
                         csv::FormatDouble(p.ae)});
    }
  });
  return 0;
}

// Restricts trajectories to users that also have outcomes.
std::vector<Trajectory> WithOutcomes(std::vector<Trajectory> trajectories,
                                     const OutcomeTable& outcomes) {
  const auto users = outcomes.Users();
  std::erase_if(trajectories, [&](const Trajectory& t) {
    return !std::binary_search(users.begin(), users.end(), t.user_id);
  });
  return trajectories;
}

int RunPairs(const TrajectoryArgs& in, const ConfigArgs& cfg,
             const std::string& outcomes_path, const std::string& metric,
             const std::string& out) {
  CheckMetric(metric);
  const AuditConfig config = cfg.Load();
  const OutcomeTable outcomes = LoadOutcomes(outcomes_path);
  const auto cohort = AnalyzeCohort(WithOutcomes(in.Load(), outcomes),
                                    config.granularity_m, config);
  const auto matrix = SimilarityFor(cohort, metric, config);
  const auto selection = SelectPairs(matrix, config.epsilon);

  WriteOutput(out, [&](std::ostream& os) {
    csv::WriteRow(os, {"user_a", "user_b", "metric", "similarity", "source",
                       "outcome", "delta", "violated"});
    for (const auto& column : outcomes.Columns()) {
      if (selection.pairs.empty()) break;
      const auto result = ViolationRate(selection, matrix, cohort.users, metric,
                                        outcomes, column, config.tau);
      for (const auto& v : result.verdicts) {
        csv::WriteRow(os, {v.user_a, v.user_b, v.metric,
                           csv::FormatDouble(v.similarity), v.column.source,
                           std::string(ToString(v.column.metric)),
                           csv::FormatDouble(v.delta), v.violated ? "1" : "0"});
      }
      std::cerr << "trajfair: " << column.Label() << ": " << result.violating_pairs
                << "/" << result.evaluated_pairs << " pairs violate\n";
    }
  });
  std::cerr << "trajfair: " << selection.pairs.size() << " of "
            << selection.total_pairs << " pairs have " << metric
            << " similarity >= " << config.epsilon << '\n';
  return 0;
}

int RunAuditCommand(const TrajectoryArgs& in, const ConfigArgs& cfg,
                    const std::string& outcomes_path,
                    const std::string& demographics_path,
                    const std::string& out_dir, const std::string& format_name) {
  const auto format = ParseReportFormat(format_name);
  if (!format) throw ConfigError("--format must be json, csv or text");
  const AuditConfig config = cfg.Load();
  const auto trajectories = in.Load();
  const OutcomeTable outcomes = LoadOutcomes(outcomes_path);
  std::optional<DemographicTable> demographics;
  if (!demographics_path.empty()) demographics = LoadDemographics(demographics_path);

  const auto report = RunAudit(trajectories, outcomes,
                               demographics ? &*demographics : nullptr, config);
  PrintDiagnostics(report.diagnostics);
  for (const auto& path : EmitReport(report, *format, out_dir)) {
    std::cerr << "trajfair: wrote " << path.string() << '\n';
  }
  return 0;
}

int RunSweep(const TrajectoryArgs& in, const ConfigArgs& cfg,
             const std::string& outcomes_path, const std::string& out) {
  const AuditConfig config = cfg.Load();
  const OutcomeTable outcomes = LoadOutcomes(outcomes_path);
  const auto trajectories = WithOutcomes(in.Load(), outcomes);
  const auto rows = SweepGranularity(trajectories, outcomes, config);
  const auto columns = outcomes.Columns();

  WriteOutput(out, [&](std::ostream& os) {
    std::vector<std::string> header{"granularity_m", "median_ssim",
                                    "qualifying_pairs", "total_pairs"};
    for (const auto& c : columns) header.push_back(c.Label());
    csv::WriteRow(os, header);
    for (const auto& row : rows) {
      std::vector<std::string> fields{csv::FormatDouble(row.granularity_m),
                                      csv::FormatDouble(row.median_ssim),
                                      std::to_string(row.qualifying_pairs),
                                      std::to_string(row.total_pairs)};
      for (const auto& cell : row.cells) {
        fields.push_back(cell.v_pct ? csv::FormatDouble(*cell.v_pct) : "");
      }
      csv::WriteRow(os, fields);
    }
  });
  return 0;
}

int RunGroup(const ConfigArgs& cfg, const std::string& outcomes_path,
             const std::string& demographics_path, const std::string& out) {
  const AuditConfig config = cfg.Load();
  const OutcomeTable outcomes = LoadOutcomes(outcomes_path);
  const DemographicTable demographics = LoadDemographics(demographics_path);

  WriteOutput(out, [&](std::ostream& os) {
    csv::WriteRow(os, {"attribute", "value", "users", "source", "outcome",
                       "outcome_count", "advantaged", "mean", "gfs", "fair"});
    auto opt = [](const std::optional<double>& v) {
      return v ? csv::FormatDouble(*v) : std::string();
    };
    for (const auto& attribute : demographics.Attributes()) {
      for (const auto& column : outcomes.Columns()) {
        for (const auto& r : GroupFairnessScore(outcomes, demographics, attribute,
                                                column, config.gfs_mode)) {
          csv::WriteRow(os, {r.attribute, r.value, std::to_string(r.user_count),
                             column.source, std::string(ToString(column.metric)),
                             std::to_string(r.outcome_count),
                             r.advantaged ? "1" : "0", opt(r.mean), opt(r.gfs),
                             r.fair ? (*r.fair ? "1" : "0") : ""});
        }
      }
    }
  });
  return 0;
}

int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInput: return 1;
    case ErrorKind::kConfig: return 2;
    case ErrorKind::kInvariant: return 3;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness audits of trajectory privacy-utility models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "trajfair 0.1.0");

  TrajectoryArgs in;
  ConfigArgs cfg;
  std::string outcomes, demographics, out, format, metric = "SSIM";

  auto* heatmap = app.add_subcommand("heatmap", "Write per-user heatmaps");
  in.Register(heatmap);
  cfg.Register(heatmap);
  heatmap->add_option("--out", out, "Output directory")->required();
  heatmap->add_option("--format", format, "csv or pgm")->default_val("csv");

  auto* similarity = app.add_subcommand("similarity", "Write a user similarity matrix");
  in.Register(similarity);
  cfg.Register(similarity);
  similarity->add_option("--metric", metric, "SE, LE, HE, AE, SSIM, EOTs or EOTs+SSIM")
      ->capture_default_str();
  similarity->add_option("--out", out, "Output CSV (default stdout)");

  auto* entropy = app.add_subcommand("entropy", "Write per-user entropy profiles");
  in.Register(entropy);
  cfg.Register(entropy);
  entropy->add_option("--out", out, "Output CSV (default stdout)");

  auto* pairs = app.add_subcommand("pairs", "List similar pairs and outcome deltas");
  in.Register(pairs);
  cfg.Register(pairs);
  pairs->add_option("--outcomes", outcomes, "Outcome CSV")->required();
  pairs->add_option("--metric", metric, "Similarity metric")->capture_default_str();
  pairs->add_option("--out", out, "Output CSV (default stdout)");

  auto* audit = app.add_subcommand("audit", "Run the full fairness audit");
  in.Register(audit);
  cfg.Register(audit);
  audit->add_option("--outcomes", outcomes, "Outcome CSV")->required();
  audit->add_option("--demographics", demographics, "Demographics CSV");
  audit->add_option("--out", out, "Output directory")->required();
  audit->add_option("--format", format, "json, csv or text")->default_val("json");

  auto* sweep = app.add_subcommand("sweep", "SSIM and violations across granularities");
  in.Register(sweep);
  cfg.Register(sweep);
  sweep->add_option("--outcomes", outcomes, "Outcome CSV")->required();
  sweep->add_option("--out", out, "Output CSV (default stdout)");

  auto* group = app.add_subcommand("group", "Group fairness scores");
  cfg.Register(group);
  group->add_option("--outcomes", outcomes, "Outcome CSV")->required();
  group->add_option("--demographics", demographics, "Demographics CSV")->required();
  group->add_option("--out", out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*heatmap) return RunHeatmap(in, cfg, out, format);
    if (*similarity) return RunSimilarity(in, cfg, metric, out);
    if (*entropy) return RunEntropy(in, cfg, out);
    if (*pairs) return RunPairs(in, cfg, outcomes, metric, out);
    if (*audit) return RunAuditCommand(in, cfg, outcomes, demographics, out, format);
    if (*sweep) return RunSweep(in, cfg, outcomes, out);
    if (*group) return RunGroup(cfg, outcomes, demographics, out);
  } catch (const Error& e) {
    std::cerr << "trajfair: " << e.what() << '\n';
    return ExitCode(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "trajfair: internal error: " << e.what() << '\n';
    return 3;
  }
  return 3;
}
