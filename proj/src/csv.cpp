#include "wbnsim/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <system_error>

namespace wbnsim {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string escape_field(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits one CSV line honoring double-quoted fields.
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

Cell retype(const std::string& field) {
  if (!field.empty()) {
    errno = 0;
    char* end = nullptr;
    const long long as_int = std::strtoll(field.c_str(), &end, 10);
    if (errno == 0 && end != nullptr && *end == '\0') {
      return static_cast<std::int64_t>(as_int);
    }
    errno = 0;
    end = nullptr;
    const double as_double = std::strtod(field.c_str(), &end);
    if (errno == 0 && end != nullptr && *end == '\0') {
      return as_double;
    }
  }
  return field;
}

}  // namespace

std::string format_cell(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) {
    return std::to_string(*i);
  }
  if (const auto* d = std::get_if<double>(&cell)) {
    return format_double(*d);
  }
  return escape_field(std::get<std::string>(cell));
}

std::string to_csv_string(const SweepTable& table) {
  std::string out;
  for (const auto& line : table.metadata) {
    out += "# ";
    out += line;
    out += '\n';
  }
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i > 0) out += ',';
    out += escape_field(table.header[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const SweepTable& table, const std::filesystem::path& path) {
  const std::string body = to_csv_string(table);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("failed to move output into place at " + path.string());
  }
}

SweepTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  SweepTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') {
      std::size_t start = 1;
      if (start < line.size() && line[start] == ' ') ++start;
      table.metadata.push_back(line.substr(start));
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(retype(f));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace wbnsim
