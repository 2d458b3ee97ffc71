#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "hateprobe/backends.hpp"
#include "hateprobe/datasets.hpp"
#include "hateprobe/embedding.hpp"
#include "hateprobe/strategy.hpp"

namespace hateprobe {

struct DatasetSource {
  DatasetName name = DatasetName::kHateXplain;
  std::filesystem::path path;           // dataset.json, implicit-hate corpus, or toxic-span file
  std::filesystem::path nontoxic_path;  // toxicspans only
  ImplicitHateColumns implicit_columns;
  ToxicSpansColumns toxic_columns;
};

struct EmbeddingSelection {
  std::string kind = "hash";  // hash | http
  std::size_t dimension = 256;
  std::uint64_t seed = 13;
  std::string url;
};

struct RunConfig {
  DatasetSource dataset;
  SplitSpec split;  // empty counts = every sample
  std::size_t limit = 0;  // first N loaded samples; 0 = all
  std::vector<StrategyFlags> strategies;
  std::vector<BackendConfig> backends;
  int parallelism = 4;
  std::filesystem::path output_dir;
  std::filesystem::path cache_path;  // empty = in-memory cache
  EmbeddingSelection embedding;
};

// Rejects target strategies on datasets without targets, malformed backends,
// duplicate model ids, and non-positive parallelism. Throws StrategyError or
// DataError; never touches the network or the filesystem.
void validate(const RunConfig& config);

// Relative paths resolve against `base_dir`.
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingSelection& selection);

}  // namespace hateprobe
