#include "hateprobe/cache.hpp"

#include <sstream>

#include "hateprobe/error.hpp"

namespace hateprobe {

namespace fs = std::filesystem;

nlohmann::json to_json(const CompletionRecord& r) {
  return {{"digest", r.prompt_digest}, {"model_id", r.model_id}, {"created_at", r.created_at}, {"raw_text", r.raw_text}};
}

CompletionRecord completion_record_from_json(const nlohmann::json& j) {
  CompletionRecord r;
  r.prompt_digest = j.at("digest").get<std::string>();
  r.model_id = j.at("model_id").get<std::string>();
  r.created_at = j.at("created_at").get<std::int64_t>();
  r.raw_text = j.at("raw_text").get<std::string>();
  return r;
}

CompletionCache::CompletionCache(fs::path log_path) : path_(std::move(log_path)) {
  if (path_->has_parent_path()) fs::create_directories(path_->parent_path());
  load();
  log_.open(*path_, std::ios::binary | std::ios::app);
  if (!log_) throw DataError("cannot open cache log " + path_->string());
}

void CompletionCache::load() {
  std::ifstream in(*path_, std::ios::binary);
  if (!in) return;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  in.close();

  std::size_t complete_end = content.rfind('\n');
  complete_end = complete_end == std::string::npos ? 0 : complete_end + 1;
  if (complete_end < content.size()) {
    ++dropped_lines_;
    fs::resize_file(*path_, complete_end);
  }

  std::size_t start = 0;
  while (start < complete_end) {
    std::size_t end = content.find('\n', start);
    std::string_view line(content.data() + start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    try {
      auto record = completion_record_from_json(nlohmann::json::parse(line));
      records_[record.prompt_digest] = std::move(record);
    } catch (const std::exception&) {
      ++dropped_lines_;
    }
  }
}

std::optional<std::string> CompletionCache::lookup(const std::string& digest) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(digest);
  if (it == records_.end()) return std::nullopt;
  return it->second.raw_text;
}

void CompletionCache::store(const CompletionRecord& record) {
  std::unique_lock lock(mutex_);
  if (log_.is_open()) {
    log_ << to_json(record).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    log_.flush();
  }
  records_[record.prompt_digest] = record;
}

std::size_t CompletionCache::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

}  // namespace hateprobe
