#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hateprobe/backends.hpp"
#include "hateprobe/cache.hpp"
#include "hateprobe/config.hpp"
#include "hateprobe/embedding.hpp"
#include "hateprobe/error_analysis.hpp"
#include "hateprobe/gateway.hpp"
#include "hateprobe/metrics.hpp"
#include "hateprobe/rate_limiter.hpp"
#include "hateprobe/records.hpp"
#include "hateprobe/significance.hpp"

namespace hateprobe {

// Test seams. Anything left empty is built from the config.
struct RunHooks {
  std::map<std::string, std::shared_ptr<CompletionBackend>> backends;  // by model_id
  std::shared_ptr<CompletionCache> cache;
  std::shared_ptr<Clock> clock;
  const EmbeddingProvider* embedding = nullptr;
  std::ostream* log = nullptr;
};

struct RunSummary {
  std::filesystem::path directory;
  GatewayStats stats;
  std::size_t records = 0;
  std::size_t backend_failures = 0;
  std::size_t resumed = 0;
};

// Layout under the run directory:
//   run.json                               config echo
//   records/<model>/<strategy>.jsonl       one RunRecord per line
//   reports/<model>/<strategy>.json        EvalReport
//   reports/<model>/<strategy>.confusion.{txt,csv}
//   summary/<model>.{csv,txt}              one row per strategy
std::string model_slug(const std::string& model_id);
std::filesystem::path records_path(const std::filesystem::path& run_dir, const std::string& model_id,
                                   const std::string& strategy);

LoadResult load_samples(const RunConfig& config);

// Validates and loads everything before the first completion is requested.
RunSummary run(const RunConfig& config, const RunHooks& hooks = {});

// Labels, predictions and gold labels taken from the records.
EvalReport evaluate_records(const std::vector<RunRecord>& records, DatasetName dataset, const StrategyFlags& strategy);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

// Rewrites every report and summary from the persisted records.
void report(const std::filesystem::path& run_dir);

struct CompareReport {
  MannWhitneyResult test;
  double accuracy_a = 0.0;
  double accuracy_b = 0.0;
  std::size_t n = 0;
};

// Per-sample correctness vectors of two record sets over the same sample
// ids. Throws DataError listing the symmetric difference otherwise.
CompareReport compare(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b);
nlohmann::json to_json(const CompareReport& report);

struct TypologyRequest {
  std::vector<std::filesystem::path> run_dirs;
  std::vector<std::string> models;  // empty = every model found
  std::string strategy = "defn_exp_out";
  std::size_t limit = 80;
  std::size_t top_n = 10;
  LdaOptions lda;
  std::filesystem::path out;  // empty = <first run dir>/typology.txt
};

struct TypologyResult {
  std::filesystem::path worksheet;
  Typology typology;
  std::size_t qualifying = 0;
};

TypologyResult typology(const TypologyRequest& request);

}  // namespace hateprobe
