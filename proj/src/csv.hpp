#pragma once

#include <string>
#include <vector>

namespace pup {

struct CsvRow {
  int line = 0;  // 1-based line number in the file
  std::vector<std::string> fields;
};

// Minimal comma-separated reader: no quoting, UTF-8 passthrough, CRLF
// tolerated. The first line must match expected_header exactly; every data
// row must have the same field count. Errors carry path and line number.
std::vector<CsvRow> read_csv(const std::string& path,
                             const std::vector<std::string>& expected_header);

}  // namespace pup
