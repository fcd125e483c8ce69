#ifndef TRAJFAIR_CSV_H_
#define TRAJFAIR_CSV_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trajfair::csv {

// Splits one CSV record. Supports double-quoted fields with "" escapes;
// surrounding whitespace of unquoted fields is trimmed.
std::vector<std::string> SplitRecord(std::string_view line);

// A parsed CSV file: header plus data records with their 1-based line numbers.
struct Table {
  std::vector<std::string> header;
  struct Record {
    std::size_t line = 0;
    std::vector<std::string> fields;
  };
  std::vector<Record> records;

  // Index of a header column, if present.
  std::optional<std::size_t> Column(std::string_view name) const;
};

// Reads a CSV file with a header row. Blank lines are skipped.
// Throws InputError if the file cannot be opened or has no header.
Table ReadFile(const std::filesystem::path& path);

// Quotes a field if it contains a separator, quote or newline.
std::string Escape(std::string_view field);

// Shortest round-trip decimal representation of a double.
std::string FormatDouble(double value);

void WriteRow(std::ostream& out, const std::vector<std::string>& fields);

std::string Trim(std::string_view s);

}  // namespace trajfair::csv

#endif  // TRAJFAIR_CSV_H_
