#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hateprobe/lda.hpp"
#include "hateprobe/records.hpp"
#include "hateprobe/schema.hpp"

namespace hateprobe {

// Rows are gold labels in schema order; columns are the same labels followed
// by a final `unparsed` column.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const;
  std::size_t correct() const;
  std::size_t unparsed() const;
  std::size_t at(const std::string& gold, const std::string& predicted) const;

  std::string to_text() const;
  std::string to_csv() const;
};

// Throws std::invalid_argument on length mismatch or a gold label outside
// the schema. Predictions outside the schema count as unparsed.
ConfusionMatrix confusion(const std::vector<std::string>& predictions, const std::vector<std::string>& golds,
                          const DatasetSchema& schema);

struct RankedRecords {
  std::vector<RunRecord> records;
  std::size_t excluded_without_score = 0;
};

// Ascending by explanation score, ties by sample_id; unscored records are
// dropped and counted.
RankedRecords rank_errors(const std::vector<RunRecord>& records);

using Direction = std::set<std::pair<std::string, std::string>>;  // (gold, predicted)

Direction default_direction(DatasetName dataset);

struct ErrorCase {
  std::string sample_id;
  std::string gold_label;
  std::map<std::string, std::string> predictions;  // model -> label
  double explanation_score = 0.0;                  // mean over models
  std::string text;
};

struct CommonErrors {
  std::vector<ErrorCase> cases;
  std::size_t qualifying = 0;  // before the limit
  std::size_t excluded_without_score = 0;
};

// Samples every model got wrong along `direction`, lowest explanation score
// first, truncated to `limit`. Throws DataError when the models do not cover
// the same sample ids, or when fewer than two models are given.
CommonErrors common_errors(const std::map<std::string, std::vector<RunRecord>>& per_model, const Direction& direction,
                           std::size_t limit);

struct TypologyTopic {
  std::vector<std::string> words;  // top-n
  std::vector<std::size_t> exemplars;  // indices into the error cases
};

struct Typology {
  TopicModel model;
  std::vector<ErrorCase> cases;
  std::vector<TypologyTopic> topics;
};

// Fits LDA over the error cases' posts and collects per-topic top words and
// the two cases with the highest topic share. Throws DataError when fewer
// than k cases are given.
Typology induce_typology(std::vector<ErrorCase> cases, const LdaOptions& options, std::size_t top_n = 10,
                         std::size_t exemplars = 2);

// Tabular worksheet for manual topic naming: one block per topic with its top
// words, the top four, and exemplar posts with gold / predicted labels,
// followed by every error case with its dominant topic.
std::string typology_worksheet(const Typology& typology, DatasetName dataset);

}  // namespace hateprobe
