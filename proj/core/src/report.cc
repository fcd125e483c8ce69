#include "trajfair/report.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "trajfair/csv.h"
#include "trajfair/error.h"

namespace trajfair {
namespace {

template <typename T>
Json Nullable(const std::optional<T>& value) {
  return value ? Json(*value) : Json(nullptr);
}

std::string Pct(const std::optional<double>& value) {
  if (!value) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", *value);
  return buf;
}

std::string Fixed(double value, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

std::string CsvNumber(const std::optional<double>& value) {
  return value ? csv::FormatDouble(*value) : std::string();
}

template <typename T>
T Get(const Json& json, std::string_view key) {
  try {
    return json.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + std::string(key) + "' has the wrong type");
  }
}

void RequireObject(const Json& json, std::string_view key) {
  if (!json.is_object()) {
    throw ConfigError("config key '" + std::string(key) + "' must be an object");
  }
}

[[noreturn]] void UnknownKey(std::string_view section, std::string_view key) {
  throw ConfigError("unknown config key '" + std::string(section) +
                    std::string(key) + "'");
}

Json CellJson(const ViolationCell& cell) {
  return Json{{"source", cell.column.source},
              {"outcome", ToString(cell.column.metric)},
              {"evaluated_pairs", cell.evaluated},
              {"violating_pairs", cell.violating},
              {"dropped_pairs", cell.dropped},
              {"v_pct", Nullable(cell.v_pct)}};
}

// Column-aligned plain-text table.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void Add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void Render(std::ostream& out) const {
    std::vector<std::size_t> width;
    for (const auto& row : rows_) {
      width.resize(std::max(width.size(), row.size()), 0);
      for (std::size_t c = 0; c < row.size(); ++c) {
        width[c] = std::max(width[c], row[c].size());
      }
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      for (std::size_t c = 0; c < rows_[r].size(); ++c) {
        if (c > 0) out << "  ";
        const auto& cell = rows_[r][c];
        if (c == 0) {
          out << cell << std::string(width[c] - cell.size(), ' ');
        } else {
          out << std::string(width[c] - cell.size(), ' ') << cell;
        }
      }
      out << '\n';
      if (r == 0) {
        std::size_t total = 0;
        for (auto w : width) total += w + 2;
        out << std::string(total > 2 ? total - 2 : 0, '-') << '\n';
      }
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::vector<std::string> ColumnLabels(const FairnessReport& report) {
  std::vector<std::string> labels;
  for (const auto& column : report.columns) labels.push_back(column.Label());
  return labels;
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

void Finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace

Json ConfigToJson(const AuditConfig& config) {
  return Json{
      {"granularity_m", config.granularity_m},
      {"sweep_m", config.sweep_m},
      {"epsilon", config.epsilon},
      {"tau", config.tau},
      {"resample_interval_s", config.resample_interval_s},
      {"ssim",
       {{"k1", config.ssim.k1},
        {"k2", config.ssim.k2},
        {"dynamic_range", config.ssim.dynamic_range},
        {"window", config.ssim.window},
        {"log_intensity", config.ssim.log_intensity}}},
      {"lonlat_entropy",
       {{"m", config.lonlat.m},
        {"r_factor", config.lonlat.r_factor},
        {"n_pow", config.lonlat.n_pow}}},
      {"heatmap_entropy",
       {{"m", config.heatmap_entropy.m},
        {"r_factor", config.heatmap_entropy.r_factor},
        {"log_intensity", config.heatmap_entropy.log_intensity}}},
      {"kmeans",
       {{"k_min", config.k_min}, {"k_max", config.k_max}, {"seed", config.seed}}},
      {"gfs_mode", ToString(config.gfs_mode)},
      {"ssim_similarity", ToString(config.ssim_similarity)},
  };
}

AuditConfig ConfigFromJson(const Json& json, AuditConfig base) {
  RequireObject(json, "<root>");
  AuditConfig c = std::move(base);
  for (const auto& [key, value] : json.items()) {
    if (key == "granularity_m") {
      c.granularity_m = Get<double>(value, key);
    } else if (key == "sweep_m") {
      c.sweep_m = Get<std::vector<double>>(value, key);
    } else if (key == "epsilon") {
      c.epsilon = Get<double>(value, key);
    } else if (key == "tau") {
      c.tau = Get<double>(value, key);
    } else if (key == "resample_interval_s") {
      c.resample_interval_s = Get<Timestamp>(value, key);
    } else if (key == "ssim") {
      RequireObject(value, key);
      for (const auto& [k, v] : value.items()) {
        if (k == "k1") c.ssim.k1 = Get<double>(v, k);
        else if (k == "k2") c.ssim.k2 = Get<double>(v, k);
        else if (k == "dynamic_range") c.ssim.dynamic_range = Get<double>(v, k);
        else if (k == "window") c.ssim.window = Get<int>(v, k);
        else if (k == "log_intensity") c.ssim.log_intensity = Get<bool>(v, k);
        else UnknownKey("ssim.", k);
      }
    } else if (key == "lonlat_entropy") {
      RequireObject(value, key);
      for (const auto& [k, v] : value.items()) {
        if (k == "m") c.lonlat.m = Get<int>(v, k);
        else if (k == "r_factor") c.lonlat.r_factor = Get<double>(v, k);
        else if (k == "n_pow") c.lonlat.n_pow = Get<double>(v, k);
        else UnknownKey("lonlat_entropy.", k);
      }
    } else if (key == "heatmap_entropy") {
      RequireObject(value, key);
      for (const auto& [k, v] : value.items()) {
        if (k == "m") c.heatmap_entropy.m = Get<int>(v, k);
        else if (k == "r_factor") c.heatmap_entropy.r_factor = Get<double>(v, k);
        else if (k == "log_intensity") c.heatmap_entropy.log_intensity = Get<bool>(v, k);
        else UnknownKey("heatmap_entropy.", k);
      }
    } else if (key == "kmeans") {
      RequireObject(value, key);
      for (const auto& [k, v] : value.items()) {
        if (k == "k_min") c.k_min = Get<int>(v, k);
        else if (k == "k_max") c.k_max = Get<int>(v, k);
        else if (k == "seed") c.seed = Get<std::uint64_t>(v, k);
        else UnknownKey("kmeans.", k);
      }
    } else if (key == "gfs_mode") {
      const auto mode = ParseGfsMode(Get<std::string>(value, key));
      if (!mode) throw ConfigError("gfs_mode must be 'symmetric' or 'literal'");
      c.gfs_mode = *mode;
    } else if (key == "ssim_similarity") {
      const auto mode = ParseSsimSimilarity(Get<std::string>(value, key));
      if (!mode) throw ConfigError("ssim_similarity must be 'pairwise' or 'effective'");
      c.ssim_similarity = *mode;
    } else {
      UnknownKey("", key);
    }
  }
  c.Validate();
  return c;
}

AuditConfig LoadConfigFile(const std::filesystem::path& path, AuditConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  Json json;
  try {
    json = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return ConfigFromJson(json, std::move(base));
}

Json ReportToJson(const FairnessReport& report) {
  Json doc;
  doc["tool"] = "trajfair";
  doc["config"] = ConfigToJson(report.config);

  Json columns = Json::array();
  for (const auto& column : report.columns) {
    columns.push_back({{"source", column.source}, {"outcome", ToString(column.metric)}});
  }
  doc["columns"] = std::move(columns);
  doc["diagnostics"] = report.diagnostics;

  Json users = Json::array();
  for (const auto& u : report.users) {
    users.push_back({{"user_id", u.user_id},
                     {"effective_ssim", u.effective_ssim},
                     {"se", u.profile.se},
                     {"le", u.profile.le},
                     {"he", Nullable(u.profile.he)},
                     {"ae", u.profile.ae},
                     {"cluster", Nullable(u.cluster)}});
  }
  doc["users"] = std::move(users);

  Json individual = Json::array();
  for (const auto& row : report.individual) {
    Json cells = Json::array();
    for (const auto& cell : row.cells) cells.push_back(CellJson(cell));
    individual.push_back({{"metric", row.metric},
                          {"qualifying_pairs", row.qualifying_pairs},
                          {"total_pairs", row.total_pairs},
                          {"pct_pairs", row.pct_pairs},
                          {"cells", std::move(cells)}});
  }
  doc["individual"] = std::move(individual);

  if (report.clusters) {
    const auto& cs = *report.clusters;
    Json per_k = Json::array();
    for (const auto& d : cs.per_k) {
      per_k.push_back({{"k", d.k}, {"inertia", d.inertia}, {"silhouette", d.silhouette}});
    }
    Json rows = Json::array();
    for (const auto& row : cs.rows) {
      Json cells = Json::array();
      for (const auto& cell : row.cells) {
        cells.push_back({{"source", cell.column.source},
                         {"outcome", ToString(cell.column.metric)},
                         {"evaluated_users", cell.evaluated},
                         {"violating_users", cell.violating},
                         {"singleton", cell.singleton},
                         {"v_pct", cell.v_pct}});
      }
      rows.push_back({{"label", row.label},
                      {"cluster", row.cluster},
                      {"size", row.size},
                      {"cells", std::move(cells)}});
    }
    doc["clusters"] = {{"available", true},
                       {"k", cs.k},
                       {"silhouette", cs.silhouette},
                       {"inertia", cs.inertia},
                       {"per_k", std::move(per_k)},
                       {"rows", std::move(rows)}};
  } else {
    doc["clusters"] = {{"available", false}};
  }

  if (report.group) {
    Json rows = Json::array();
    for (const auto& row : *report.group) {
      Json cells = Json::array();
      for (const auto& cell : row.cells) {
        cells.push_back({{"source", cell.column.source},
                         {"outcome", ToString(cell.column.metric)},
                         {"outcome_count", cell.outcome_count},
                         {"mean", Nullable(cell.mean)},
                         {"gfs", Nullable(cell.gfs)},
                         {"fair", Nullable(cell.fair)}});
      }
      rows.push_back({{"attribute", row.attribute},
                      {"value", row.value},
                      {"users", row.user_count},
                      {"advantaged", row.advantaged},
                      {"cells", std::move(cells)}});
    }
    doc["group"] = {{"available", true},
                    {"mode", ToString(report.config.gfs_mode)},
                    {"rows", std::move(rows)}};
  } else {
    doc["group"] = {{"available", false}, {"notice", "not available"}};
  }

  if (report.sweep) {
    Json rows = Json::array();
    for (const auto& row : *report.sweep) {
      Json cells = Json::array();
      for (const auto& cell : row.cells) cells.push_back(CellJson(cell));
      rows.push_back({{"granularity_m", row.granularity_m},
                      {"median_ssim", row.median_ssim},
                      {"qualifying_pairs", row.qualifying_pairs},
                      {"total_pairs", row.total_pairs},
                      {"cells", std::move(cells)}});
    }
    doc["sweep"] = {{"available", true}, {"rows", std::move(rows)}};
  } else {
    doc["sweep"] = {{"available", false}};
  }
  return doc;
}

std::optional<ReportFormat> ParseReportFormat(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv" || name == "csv-bundle") return ReportFormat::kCsv;
  if (name == "text") return ReportFormat::kText;
  return std::nullopt;
}

void WriteReportText(const FairnessReport& report, std::ostream& out) {
  const auto labels = ColumnLabels(report);
  const auto& cfg = report.config;
  out << "Fairness audit: " << report.users.size() << " users, granularity "
      << csv::FormatDouble(cfg.granularity_m) << " m, epsilon "
      << csv::FormatDouble(cfg.epsilon) << ", tau " << csv::FormatDouble(cfg.tau)
      << "\n\n";

  out << "Individual fairness (V% = share of similar pairs with outcome delta > tau)\n";
  std::vector<std::string> header{"Metric", "% of pairs"};
  header.insert(header.end(), labels.begin(), labels.end());
  TextTable individual(header);
  for (const auto& row : report.individual) {
    std::vector<std::string> cells{row.metric, Pct(row.pct_pairs)};
    for (const auto& cell : row.cells) cells.push_back(Pct(cell.v_pct));
    individual.Add(std::move(cells));
  }
  individual.Render(out);

  out << "\nCluster-based individual fairness";
  if (report.clusters) {
    out << " (k = " << report.clusters->k << ", silhouette "
        << Fixed(report.clusters->silhouette, 4) << ")\n";
    std::vector<std::string> ch{"Cluster", "Size"};
    ch.insert(ch.end(), labels.begin(), labels.end());
    TextTable clusters(ch);
    for (const auto& row : report.clusters->rows) {
      std::vector<std::string> cells{row.label, row.cluster < 0 ? "-" : std::to_string(row.size)};
      for (const auto& cell : row.cells) cells.push_back(Pct(cell.v_pct));
      clusters.Add(std::move(cells));
    }
    clusters.Render(out);
  } else {
    out << "\n  not available\n";
  }

  out << "\nGroup fairness (GFS, " << ToString(cfg.gfs_mode) << ")\n";
  if (report.group) {
    std::vector<std::string> gh{"Attribute", "Value", "Users"};
    gh.insert(gh.end(), labels.begin(), labels.end());
    TextTable group(gh);
    for (const auto& row : *report.group) {
      std::vector<std::string> cells{row.attribute, row.value, std::to_string(row.user_count)};
      for (const auto& cell : row.cells) {
        if (row.advantaged) {
          cells.push_back("-");
        } else if (cell.gfs) {
          cells.push_back(Pct(100.0 * *cell.gfs) + (*cell.fair ? "" : " *"));
        } else {
          cells.push_back("n/a");
        }
      }
      group.Add(std::move(cells));
    }
    group.Render(out);
    out << "(* GFS below 80%)\n";
  } else {
    out << "  not available\n";
  }

  if (report.sweep) {
    out << "\nGranularity sweep (SSIM pairs)\n";
    std::vector<std::string> sh{"Granularity (m)", "Median SSIM", "Pairs"};
    sh.insert(sh.end(), labels.begin(), labels.end());
    TextTable sweep(sh);
    for (const auto& row : *report.sweep) {
      std::vector<std::string> cells{csv::FormatDouble(row.granularity_m),
                                     Fixed(row.median_ssim, 4),
                                     std::to_string(row.qualifying_pairs)};
      for (const auto& cell : row.cells) cells.push_back(Pct(cell.v_pct));
      sweep.Add(std::move(cells));
    }
    sweep.Render(out);
  }

  if (!report.diagnostics.empty()) {
    out << "\nDiagnostics\n";
    for (const auto& d : report.diagnostics) out << "  " << d << '\n';
  }
}

std::vector<std::filesystem::path> EmitReport(
    const FairnessReport& report, ReportFormat format,
    const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec || !std::filesystem::is_directory(directory)) {
    throw InputError("cannot create output directory " + directory.string());
  }
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::string& name, auto&& body) {
    const auto path = directory / name;
    auto out = OpenForWrite(path);
    body(out);
    Finish(out, path);
    written.push_back(path);
  };

  switch (format) {
    case ReportFormat::kJson:
      write("report.json", [&](std::ostream& out) {
        out << ReportToJson(report).dump(2) << '\n';
      });
      break;
    case ReportFormat::kText:
      write("report.txt", [&](std::ostream& out) { WriteReportText(report, out); });
      break;
    case ReportFormat::kCsv: {
      const auto labels = ColumnLabels(report);
      write("individual.csv", [&](std::ostream& out) {
        std::vector<std::string> header{"metric", "pct_pairs", "qualifying_pairs", "total_pairs"};
        header.insert(header.end(), labels.begin(), labels.end());
        csv::WriteRow(out, header);
        for (const auto& row : report.individual) {
          std::vector<std::string> fields{row.metric, csv::FormatDouble(row.pct_pairs),
                                          std::to_string(row.qualifying_pairs),
                                          std::to_string(row.total_pairs)};
          for (const auto& cell : row.cells) fields.push_back(CsvNumber(cell.v_pct));
          csv::WriteRow(out, fields);
        }
      });
      write("users.csv", [&](std::ostream& out) {
        csv::WriteRow(out, {"user_id", "effective_ssim", "se", "le", "he", "ae", "cluster"});
        for (const auto& u : report.users) {
          csv::WriteRow(out, {u.user_id, csv::FormatDouble(u.effective_ssim),
                              csv::FormatDouble(u.profile.se),
                              csv::FormatDouble(u.profile.le), CsvNumber(u.profile.he),
                              csv::FormatDouble(u.profile.ae),
                              u.cluster ? std::to_string(*u.cluster) : std::string()});
        }
      });
      if (report.clusters) {
        write("k_selection.csv", [&](std::ostream& out) {
          csv::WriteRow(out, {"k", "inertia", "silhouette", "chosen"});
          for (const auto& d : report.clusters->per_k) {
            csv::WriteRow(out, {std::to_string(d.k), csv::FormatDouble(d.inertia),
                                csv::FormatDouble(d.silhouette),
                                d.k == report.clusters->k ? "1" : "0"});
          }
        });
        write("clusters.csv", [&](std::ostream& out) {
          std::vector<std::string> header{"cluster", "size"};
          header.insert(header.end(), labels.begin(), labels.end());
          csv::WriteRow(out, header);
          for (const auto& row : report.clusters->rows) {
            std::vector<std::string> fields{row.label, std::to_string(row.size)};
            for (const auto& cell : row.cells) fields.push_back(csv::FormatDouble(cell.v_pct));
            csv::WriteRow(out, fields);
          }
        });
      }
      if (report.group) {
        write("group.csv", [&](std::ostream& out) {
          std::vector<std::string> header{"attribute", "value", "users", "advantaged"};
          header.insert(header.end(), labels.begin(), labels.end());
          csv::WriteRow(out, header);
          for (const auto& row : *report.group) {
            std::vector<std::string> fields{row.attribute, row.value,
                                            std::to_string(row.user_count),
                                            row.advantaged ? "1" : "0"};
            for (const auto& cell : row.cells) fields.push_back(CsvNumber(cell.gfs));
            csv::WriteRow(out, fields);
          }
        });
      }
      if (report.sweep) {
        write("sweep.csv", [&](std::ostream& out) {
          std::vector<std::string> header{"granularity_m", "median_ssim",
                                          "qualifying_pairs", "total_pairs"};
          header.insert(header.end(), labels.begin(), labels.end());
          csv::WriteRow(out, header);
          for (const auto& row : *report.sweep) {
            std::vector<std::string> fields{csv::FormatDouble(row.granularity_m),
                                            csv::FormatDouble(row.median_ssim),
                                            std::to_string(row.qualifying_pairs),
                                            std::to_string(row.total_pairs)};
            for (const auto& cell : row.cells) fields.push_back(CsvNumber(cell.v_pct));
            csv::WriteRow(out, fields);
          }
        });
      }
      break;
    }
  }
  return written;
}

}  // namespace trajfair
