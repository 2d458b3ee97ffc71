#include "hateprobe/records.hpp"

#include <fstream>
#include <sstream>

#include "hateprobe/error.hpp"

namespace hateprobe {

using nlohmann::json;

std::string to_json_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json to_json(const RunRecord& r) {
  json j;
  j["sample_id"] = r.sample_id;
  j["strategy"] = r.strategy;
  j["model_id"] = r.model_id;
  j["prompt_digest"] = r.prompt_digest;
  j["gold_label"] = r.gold_label;
  j["parsed_label"] = r.parsed_label;
  j["raw_response"] = r.raw_response;
  j["enclosure_text"] = r.enclosure_text ? json(*r.enclosure_text) : json(nullptr);
  j["enclosure_items"] = r.enclosure_items ? json(*r.enclosure_items) : json(nullptr);
  j["malformed_enclosure"] = r.malformed_enclosure;
  j["explanation_score"] = r.explanation_score ? json(*r.explanation_score) : json(nullptr);
  j["error"] = r.error_note ? json(*r.error_note) : json(nullptr);
  j["text"] = r.text;
  return j;
}

RunRecord run_record_from_json(const json& j) {
  RunRecord r;
  r.sample_id = j.at("sample_id").get<std::string>();
  r.strategy = j.at("strategy").get<std::string>();
  r.model_id = j.at("model_id").get<std::string>();
  r.prompt_digest = j.at("prompt_digest").get<std::string>();
  r.gold_label = j.at("gold_label").get<std::string>();
  r.parsed_label = j.at("parsed_label").get<std::string>();
  r.raw_response = j.at("raw_response").get<std::string>();
  if (!j.at("enclosure_text").is_null()) r.enclosure_text = j["enclosure_text"].get<std::string>();
  if (!j.at("enclosure_items").is_null()) r.enclosure_items = j["enclosure_items"].get<std::vector<std::string>>();
  r.malformed_enclosure = j.value("malformed_enclosure", false);
  if (!j.at("explanation_score").is_null()) r.explanation_score = j["explanation_score"].get<double>();
  if (j.contains("error") && !j["error"].is_null()) r.error_note = j["error"].get<std::string>();
  r.text = j.value("text", std::string{});
  return r;
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read records " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  std::vector<RunRecord> out;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) break;  // torn tail
    std::string_view line(content.data() + start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    try {
      out.push_back(run_record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ": bad record: " + e.what());
    }
  }
  return out;
}

void write_records(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& r : records) out << to_json_line(to_json(r)) << '\n';
}

}  // namespace hateprobe
