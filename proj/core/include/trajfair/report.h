#ifndef TRAJFAIR_REPORT_H_
#define TRAJFAIR_REPORT_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "trajfair/audit.h"

namespace trajfair {

using Json = nlohmann::ordered_json;

Json ConfigToJson(const AuditConfig& config);

// Overlays the keys present in `json` onto `base`. Unknown keys and values of
// the wrong type are ConfigErrors; the result is validated.
AuditConfig ConfigFromJson(const Json& json, AuditConfig base = {});

// Reads a JSON config file. Throws ConfigError if it cannot be read or parsed.
AuditConfig LoadConfigFile(const std::filesystem::path& path,
                           AuditConfig base = {});

// The canonical, self-describing report document. Keys are emitted in a
// fixed order and numbers at full precision, so equal reports serialize to
// identical bytes.
Json ReportToJson(const FairnessReport& report);

enum class ReportFormat { kJson, kCsv, kText };

std::optional<ReportFormat> ParseReportFormat(std::string_view name);

// Renders aligned tables; percentages are rounded to 2 decimals.
void WriteReportText(const FairnessReport& report, std::ostream& out);

// Writes report.json, report.txt, or one CSV per table (individual.csv,
// k_selection.csv, clusters.csv, users.csv, and group.csv / sweep.csv when
// those sections exist) into `directory`, creating it if needed. Returns the
// files written. Throws InputError when the destination is not writable.
std::vector<std::filesystem::path> EmitReport(
    const FairnessReport& report, ReportFormat format,
    const std::filesystem::path& directory);

}  // namespace trajfair

#endif  // TRAJFAIR_REPORT_H_
