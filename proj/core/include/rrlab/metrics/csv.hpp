#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rrlab::metrics {

// Shortest round-trip decimal form (std::to_chars), so emitted files are
// byte-stable across runs.
std::string format_double(double v);

// Parses a simple comma-separated file: lines starting with '#' and blank
// lines are skipped; the first remaining line must equal the expected
// header. No quoting support.
std::vector<std::vector<std::string>> read_csv(std::istream& in,
                                               const std::string& expected_header,
                                               const std::string& what);
std::vector<std::vector<std::string>> read_csv_file(const std::string& path,
                                                    const std::string& expected_header);

/// Writes `# schema_version: N`, then the header, then rows.
class CsvWriter {
public:
  CsvWriter(std::ostream& out, const std::string& header, int schema_version = 1);
  void row(const std::vector<std::string>& fields);

private:
  std::ostream& out_;
};

}  // namespace rrlab::metrics
