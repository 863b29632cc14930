#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stage/error.hpp"

namespace stage {

struct CsvRow {
  std::size_t line = 0;  // 1-based line in the source file
  std::vector<std::string> fields;
};

/// Header-first CSV table. Comma separated, RFC 4180 quoting, LF or CRLF.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  /// Position of a header column, or header.size() if absent.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, std::string source);
CsvTable read_csv(const std::filesystem::path& path);

/// LF line endings, fields quoted only when they contain ',', '"' or newlines.
std::string write_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// "<source>:<line>:<column>: <message>"; column is 1-based, 0 omits it.
[[noreturn]] void fail_at(ErrorKind kind, const std::string& source, std::size_t line,
                          std::size_t column, const std::string& message);

}  // namespace stage
