#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wbnsim {

using Cell = std::variant<std::int64_t, double, std::string>;

// A rectangular result table plus '#'-prefixed metadata lines. Serialization
// is canonical: metadata first, then the header row, then data rows; doubles
// as shortest round-trippable %.9g, infinities as inf/-inf. Writing the same
// table always produces the same bytes.
struct SweepTable {
  std::vector<std::string> metadata;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_cell(const Cell& cell);

std::string to_csv_string(const SweepTable& table);

// Serializes to path atomically: the bytes land in a temp file in the same
// directory, then rename. A failed write never leaves a partial file at path.
void write_csv(const SweepTable& table, const std::filesystem::path& path);

// Parses a file written by write_csv. Cells are re-typed: integer-looking
// fields to int64, numeric fields (inf included) to double, the rest kept as
// strings.
SweepTable read_csv(const std::filesystem::path& path);

}  // namespace wbnsim
