#include "csv.hpp"

#include <fstream>
#include <sstream>

#include "error.hpp"

namespace pup {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::vector<CsvRow> read_csv(const std::string& path,
                             const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);

  std::vector<CsvRow> rows;
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!saw_header) {
      auto header = split_fields(line);
      if (header != expected_header) {
        std::ostringstream want;
        for (std::size_t i = 0; i < expected_header.size(); ++i) {
          if (i) want << ',';
          want << expected_header[i];
        }
        fail(ErrorCode::parse, path + ":1: expected header '" + want.str() +
                                   "', got '" + line + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != expected_header.size()) {
      fail(ErrorCode::parse, path + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(expected_header.size()) +
                                 " fields, got " + std::to_string(fields.size()));
    }
    rows.push_back({lineno, std::move(fields)});
  }
  if (!saw_header) fail(ErrorCode::parse, path + ": empty file, missing header");
  return rows;
}

}  // namespace pup
