#include "hateprobe/lda.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "hateprobe/error.hpp"
#include "hateprobe/text.hpp"

namespace hateprobe {

namespace {

const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> kWords = {
      "a",          "about",   "above",  "after",   "again",   "against", "all",     "am",      "an",
      "and",        "any",     "are",    "aren",    "as",      "at",      "be",      "because", "been",
      "before",     "being",   "below",  "between", "both",    "but",     "by",      "can",     "cannot",
      "could",      "couldn",  "didn",   "does",    "doesn",   "doing",   "down",    "during",  "each",
      "few",        "for",     "from",   "further", "had",     "hadn",    "has",     "hasn",    "have",
      "haven",      "having",  "he",     "her",     "here",    "hers",    "herself", "him",     "himself",
      "his",        "how",     "i",      "if",      "in",      "into",    "is",      "isn",     "it",
      "its",        "itself",  "ll",     "me",      "mightn",  "more",    "most",    "mustn",   "my",
      "myself",     "needn",   "no",     "nor",     "not",     "now",     "of",      "off",     "on",
      "once",       "only",    "or",     "other",   "our",     "ours",    "ourselves", "out",   "over",
      "own",        "re",      "same",   "shan",    "she",     "should",  "shouldn", "so",      "some",
      "such",       "than",    "that",   "the",     "their",   "theirs",  "them",    "themselves",
      "then",       "there",   "these",  "they",    "this",    "those",   "through", "to",      "too",
      "under",      "until",   "up",     "ve",      "very",    "was",     "wasn",    "we",      "were",
      "weren",      "what",    "when",   "where",   "which",   "while",   "who",     "whom",    "why",
      "will",       "with",    "won",    "would",   "wouldn",  "you",     "your",    "yours",   "yourself",
      "yourselves", "number",  "user",   "url",
  };
  return kWords;
}

// Portable uniform double in [0, 1).
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

bool is_stopword(std::string_view word) { return stopwords().contains(word); }

std::vector<std::string> preprocess_tokens(const std::vector<std::string>& tokens, std::size_t min_length) {
  std::vector<std::string> out;
  for (const auto& raw : tokens) {
    std::string word;
    auto flush = [&] {
      if (word.size() >= min_length && !is_stopword(word)) out.push_back(word);
      word.clear();
    };
    for (char c : text::to_lower(raw)) {
      auto u = static_cast<unsigned char>(c);
      if (std::isalnum(u) || u >= 0x80) {
        word += c;
      } else {
        flush();
      }
    }
    flush();
  }
  return out;
}

std::vector<std::string> preprocess_text(std::string_view text, std::size_t min_length) {
  return preprocess_tokens(text::split_whitespace(text), min_length);
}

TopicModel lda_fit(const std::vector<std::vector<std::string>>& documents, const LdaOptions& options,
                   const SweepObserver& observer) {
  if (options.k == 0) throw std::invalid_argument("lda_fit: k must be positive");
  if (options.iterations == 0) throw std::invalid_argument("lda_fit: iterations must be positive");
  if (options.beta <= 0.0) throw std::invalid_argument("lda_fit: beta must be positive");
  const std::size_t k = options.k;
  const double alpha = options.alpha > 0.0 ? options.alpha : 50.0 / static_cast<double>(k);
  const double beta = options.beta;

  std::vector<std::vector<std::string>> docs;
  docs.reserve(documents.size());
  std::map<std::string, std::size_t> vocab_index;
  for (const auto& d : documents) {
    docs.push_back(preprocess_tokens(d, options.min_token_length));
    for (const auto& w : docs.back()) vocab_index.emplace(w, 0);
  }
  if (vocab_index.empty()) throw DataError("lda_fit: corpus is empty after preprocessing");
  std::size_t non_empty = std::count_if(docs.begin(), docs.end(), [](const auto& d) { return !d.empty(); });
  if (non_empty < k) {
    throw DataError("lda_fit: " + std::to_string(non_empty) + " non-empty documents for k=" + std::to_string(k));
  }

  TopicModel model;
  model.k = k;
  for (auto& [word, idx] : vocab_index) {
    idx = model.vocabulary.size();
    model.vocabulary.push_back(word);
  }
  const std::size_t v = model.vocabulary.size();

  std::vector<std::vector<std::size_t>> words(docs.size());
  std::size_t total_tokens = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& w : docs[d]) words[d].push_back(vocab_index.at(w));
    total_tokens += words[d].size();
  }

  std::mt19937_64 rng(options.seed);
  std::vector<std::vector<std::size_t>> assignment(docs.size());
  std::vector<std::vector<std::size_t>> doc_topic(docs.size(), std::vector<std::size_t>(k, 0));
  std::vector<std::vector<std::size_t>> topic_word(k, std::vector<std::size_t>(v, 0));
  std::vector<std::size_t> topic_totals(k, 0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    assignment[d].resize(words[d].size());
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      auto z = std::min(k - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(k)));
      assignment[d][i] = z;
      ++doc_topic[d][z];
      ++topic_word[z][words[d][i]];
      ++topic_totals[z];
    }
  }

  const double v_beta = static_cast<double>(v) * beta;
  std::vector<double> weights(k);
  for (std::size_t sweep = 0; sweep < options.iterations; ++sweep) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const std::size_t w = words[d][i];
        std::size_t z = assignment[d][i];
        --doc_topic[d][z];
        --topic_word[z][w];
        --topic_totals[z];

        double total = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
          total += (static_cast<double>(doc_topic[d][t]) + alpha) * (static_cast<double>(topic_word[t][w]) + beta) /
                   (static_cast<double>(topic_totals[t]) + v_beta);
          weights[t] = total;
        }
        const double draw = uniform01(rng) * total;
        z = static_cast<std::size_t>(std::upper_bound(weights.begin(), weights.end(), draw) - weights.begin());
        if (z >= k) z = k - 1;

        assignment[d][i] = z;
        ++doc_topic[d][z];
        ++topic_word[z][w];
        ++topic_totals[z];
      }
    }
    if (observer) observer(GibbsSnapshot{sweep, total_tokens, topic_totals, doc_topic, topic_word});
  }

  model.topic_word.assign(k, std::vector<double>(v));
  for (std::size_t t = 0; t < k; ++t) {
    const double denom = static_cast<double>(topic_totals[t]) + v_beta;
    for (std::size_t w = 0; w < v; ++w) {
      model.topic_word[t][w] = (static_cast<double>(topic_word[t][w]) + beta) / denom;
    }
  }
  model.doc_topic.assign(docs.size(), std::vector<double>(k));
  const double k_alpha = static_cast<double>(k) * alpha;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const double denom = static_cast<double>(words[d].size()) + k_alpha;
    for (std::size_t t = 0; t < k; ++t) model.doc_topic[d][t] = (static_cast<double>(doc_topic[d][t]) + alpha) / denom;
  }
  return model;
}

std::vector<std::string> top_words(const TopicModel& model, std::size_t topic, std::size_t n, bool* truncated) {
  if (topic >= model.k) throw std::out_of_range("top_words: topic index out of range");
  const auto& row = model.topic_word[topic];
  std::vector<std::size_t> order(row.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return model.vocabulary[a] < model.vocabulary[b];
  });
  if (truncated) *truncated = n > order.size();
  order.resize(std::min(n, order.size()));
  std::vector<std::string> out;
  for (auto idx : order) out.push_back(model.vocabulary[idx]);
  return out;
}

}  // namespace hateprobe
