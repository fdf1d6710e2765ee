#include "rrlab/metrics/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rrlab/errors.hpp"

namespace rrlab::metrics {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}
}  // namespace

std::vector<std::vector<std::string>> read_csv(std::istream& in,
                                               const std::string& expected_header,
                                               const std::string& what) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool saw_header = false;
  size_t width = split_fields(expected_header).size();
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      std::string got = line;
      if (!got.empty() && got.back() == '\r') got.pop_back();
      if (got != expected_header)
        throw IoError(what + ": expected header \"" + expected_header + "\", got \"" + got + "\"");
      saw_header = true;
      continue;
    }
    auto fields = split_fields(line);
    if (fields.size() != width)
      throw IoError(what + ": row has " + std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(width) + ": " + line);
    rows.push_back(std::move(fields));
  }
  if (!saw_header) throw IoError(what + ": missing header row");
  return rows;
}

std::vector<std::vector<std::string>> read_csv_file(const std::string& path,
                                                    const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) throw KeyError(path, "cannot open CSV file");
  return read_csv(in, expected_header, path);
}

CsvWriter::CsvWriter(std::ostream& out, const std::string& header, int schema_version)
    : out_(out) {
  out_ << "# schema_version: " << schema_version << "\n" << header << "\n";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

}  // namespace rrlab::metrics
