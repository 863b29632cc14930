#include "stage/csv.hpp"

#include <fstream>
#include <sstream>

namespace stage {

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return header.size();
}

void fail_at(ErrorKind kind, const std::string& source, std::size_t line, std::size_t column,
             const std::string& message) {
  std::string where = source + ":" + std::to_string(line);
  if (column > 0) where += ":" + std::to_string(column);
  fail(kind, where + ": " + message);
}

CsvTable parse_csv(std::string_view text, std::string source) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  CsvTable table;
  table.source = std::move(source);
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> lines;

  std::vector<std::string> record;
  std::string field;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool in_quotes = false;
  bool quoted_field = false;
  bool record_empty = true;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    quoted_field = false;
  };
  auto end_record = [&] {
    end_field();
    // a physically empty line is skipped; ",," is a row of blank cells
    if (!(record.size() == 1 && record.front().empty() && record_empty)) {
      records.push_back(std::move(record));
      lines.push_back(record_line);
    }
    record.clear();
    record_empty = true;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field.empty() || quoted_field) {
          fail_at(ErrorKind::Schema, table.source, line, record.size() + 1, "stray quote inside field");
        }
        in_quotes = true;
        quoted_field = true;
        record_empty = false;
        break;
      case ',':
        end_field();
        record_empty = false;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(ch);
        record_empty = false;
    }
  }
  if (in_quotes) fail_at(ErrorKind::Schema, table.source, line, 0, "unterminated quoted field");
  if (!field.empty() || !record.empty() || quoted_field) end_record();

  if (records.empty()) fail_at(ErrorKind::Schema, table.source, 1, 0, "missing header row");
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      fail_at(ErrorKind::Schema, table.source, lines[r], 0,
              "expected " + std::to_string(table.header.size()) + " fields, found " +
                  std::to_string(records[r].size()));
    }
    table.rows.push_back({lines[r], std::move(records[r])});
  }
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, path.string() + ": cannot write file");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorKind::Io, path.string() + ": write failed");
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text_file(path), path.string()); }

namespace {

void append_field(std::string& out, const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) {
    out += field;
    return;
  }
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
}

void append_record(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    append_field(out, fields[i]);
  }
  out.push_back('\n');
}

}  // namespace

std::string write_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  append_record(out, header);
  for (const auto& r : rows) append_record(out, r);
  return out;
}

}  // namespace stage
