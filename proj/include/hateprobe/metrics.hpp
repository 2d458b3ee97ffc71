#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hateprobe/embedding.hpp"
#include "hateprobe/schema.hpp"

namespace hateprobe {

struct LabelScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool operator==(const LabelScores&) const = default;
};

struct EvalReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::optional<double> mean_explanation_score;
  std::size_t n_samples = 0;
  std::size_t n_unparsed = 0;
  std::map<std::string, LabelScores> per_label;

  bool operator==(const EvalReport&) const = default;
};

// Per-label P/R/F1 with 0 for empty denominators; macro scores are
// unweighted means over the schema labels. `unparsed` predictions are wrong
// for every label. Throws std::invalid_argument on length mismatch.
EvalReport classification_report(const std::vector<std::string>& predictions, const std::vector<std::string>& golds,
                                 const DatasetSchema& schema);
EvalReport classification_report(const std::vector<std::string>& predictions, const std::vector<std::string>& golds,
                                 const std::vector<std::string>& labels);

inline constexpr double kBleuEpsilon = 0.1;

// Sentence BLEU, orders 1..4, uniform weights, brevity penalty; a zero
// n-gram match count is replaced by epsilon. Empty candidate scores 0.
// Throws std::invalid_argument on an empty reference.
double sentence_bleu(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

struct BertScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Greedy max-cosine matching, no idf weighting or baseline rescaling.
// Strings are lowercased and whitespace-tokenized. Throws
// std::invalid_argument when either side has no tokens.
BertScore bertscore(std::string_view candidate, std::string_view reference, const EmbeddingProvider& provider);
BertScore bertscore_tokens(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
                           const EmbeddingProvider& provider);

}  // namespace hateprobe
