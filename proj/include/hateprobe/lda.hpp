#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace hateprobe {

struct LdaOptions {
  std::size_t k = 3;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  double alpha = 0.0;  // <= 0 selects 50 / k
  double beta = 0.01;
  std::size_t min_token_length = 3;
};

struct TopicModel {
  std::size_t k = 0;
  std::vector<std::string> vocabulary;           // sorted
  std::vector<std::vector<double>> topic_word;   // k x |vocabulary|
  std::vector<std::vector<double>> doc_topic;    // |documents| x k
};

// Count tables after one Gibbs sweep, for consistency checks.
struct GibbsSnapshot {
  std::size_t sweep = 0;
  std::size_t total_tokens = 0;
  const std::vector<std::size_t>& topic_totals;
  const std::vector<std::vector<std::size_t>>& doc_topic_counts;
  const std::vector<std::vector<std::size_t>>& topic_word_counts;
};

using SweepObserver = std::function<void(const GibbsSnapshot&)>;

// Lowercase, strip punctuation (splitting on it), drop stopwords and tokens
// shorter than `min_length`.
std::vector<std::string> preprocess_tokens(const std::vector<std::string>& tokens, std::size_t min_length = 3);
std::vector<std::string> preprocess_text(std::string_view text, std::size_t min_length = 3);

bool is_stopword(std::string_view word);

// Collapsed Gibbs sampling over the preprocessed documents. Documents that
// end up empty keep a uniform topic mix. Throws DataError when no tokens
// survive or fewer than k documents are non-empty.
TopicModel lda_fit(const std::vector<std::vector<std::string>>& documents, const LdaOptions& options,
                   const SweepObserver& observer = {});

// Highest-probability words of `topic`, ties broken lexicographically. When
// n exceeds the vocabulary the whole vocabulary is returned and `truncated`
// is set.
std::vector<std::string> top_words(const TopicModel& model, std::size_t topic, std::size_t n,
                                   bool* truncated = nullptr);

}  // namespace hateprobe
