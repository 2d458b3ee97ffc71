#include "hateprobe/csv.hpp"

#include <fstream>
#include <sstream>

#include "hateprobe/error.hpp"

namespace hateprobe::csv {

Dialect dialect_for(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".tsv" || ext == ".tab") return Dialect{'\t', false};
  return Dialect{',', true};
}

Table::Table(std::vector<std::string> header, std::vector<std::vector<std::string>> rows)
    : header_(std::move(header)), rows_(std::move(rows)) {}

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
  auto idx = column(name);
  if (!idx) throw DataError("missing column '" + std::string(name) + "'");
  return *idx;
}

Table parse(std::string_view content, Dialect dialect) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    bool blank = record.size() == 1 && record[0].empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (dialect.quoting && c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == dialect.delimiter) {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (!field.empty() || !record.empty()) end_record();

  if (records.empty()) return Table({}, {});
  std::vector<std::string> header = std::move(records.front());
  records.erase(records.begin());
  // Strip a UTF-8 BOM from the first header cell.
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
  return Table(std::move(header), std::move(records));
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), dialect_for(path));
}

std::string escape(std::string_view field, char delimiter) {
  bool needs = field.find_first_of(std::string{'"', '\n', '\r', delimiter}) != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace hateprobe::csv
