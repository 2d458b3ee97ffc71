#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hateprobe {

// One (sample x strategy x model) trial.
struct RunRecord {
  std::string sample_id;
  std::string strategy;
  std::string model_id;
  std::string prompt_digest;
  std::string raw_response;
  std::string parsed_label;
  std::optional<std::string> enclosure_text;
  std::optional<std::vector<std::string>> enclosure_items;
  bool malformed_enclosure = false;
  std::optional<double> explanation_score;
  std::string gold_label;
  std::string text;
  std::optional<std::string> error_note;

  bool operator==(const RunRecord&) const = default;
};

nlohmann::json to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& j);

// One JSON object per line. Invalid UTF-8 is replaced, never rejected.
std::string to_json_line(const nlohmann::json& j);

// Reads a JSON-lines record file. A torn final line is ignored.
std::vector<RunRecord> read_records(const std::filesystem::path& path);
void write_records(const std::filesystem::path& path, const std::vector<RunRecord>& records);

}  // namespace hateprobe
