#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hateprobe::csv {

struct Dialect {
  char delimiter = ',';
  // TSV corpora are usually unquoted and carry stray quote characters inside
  // tweets, so quote handling is optional.
  bool quoting = true;
};

// Comma dialect for .csv, tab without quoting for .tsv/.tab.
Dialect dialect_for(const std::filesystem::path& path);

class Table {
 public:
  Table(std::vector<std::string> header, std::vector<std::vector<std::string>> rows);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

  std::optional<std::size_t> column(std::string_view name) const;
  // Throws DataError naming the column when absent.
  std::size_t require_column(std::string_view name) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

Table parse(std::string_view content, Dialect dialect);

// Throws DataError when the file cannot be read.
Table read_file(const std::filesystem::path& path);

std::string escape(std::string_view field, char delimiter = ',');

}  // namespace hateprobe::csv
