#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include <json.hpp>

namespace hateprobe {

struct CompletionRecord {
  std::string prompt_digest;
  std::string raw_text;
  std::int64_t created_at = 0;  // unix seconds
  std::string model_id;
};

nlohmann::json to_json(const CompletionRecord& record);
CompletionRecord completion_record_from_json(const nlohmann::json& j);

// Digest-keyed completion store backed by an append-only JSON-lines log.
// A torn final line (crash mid-write) is dropped and truncated away on open.
// One writer at a time; lookups never block each other.
class CompletionCache {
 public:
  // In-memory only.
  CompletionCache() = default;
  explicit CompletionCache(std::filesystem::path log_path);

  CompletionCache(const CompletionCache&) = delete;
  CompletionCache& operator=(const CompletionCache&) = delete;

  std::optional<std::string> lookup(const std::string& digest) const;
  void store(const CompletionRecord& record);

  std::size_t size() const;
  std::size_t dropped_lines() const { return dropped_lines_; }
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  void load();

  std::optional<std::filesystem::path> path_;
  std::ofstream log_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, CompletionRecord> records_;
  std::size_t dropped_lines_ = 0;
};

}  // namespace hateprobe
