#include "hateprobe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "hateprobe/text.hpp"

namespace hateprobe {

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

// n-gram counts keyed by the joined tokens; '\x1f' cannot occur in
// whitespace-split tokens from ordinary text.
std::unordered_map<std::string, std::size_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

EvalReport classification_report(const std::vector<std::string>& predictions, const std::vector<std::string>& golds,
                                 const std::vector<std::string>& labels) {
  if (predictions.size() != golds.size()) {
    throw std::invalid_argument("classification_report: " + std::to_string(predictions.size()) + " predictions vs " +
                                std::to_string(golds.size()) + " golds");
  }
  EvalReport report;
  report.n_samples = golds.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (predictions[i] == kUnparsed) ++report.n_unparsed;
    if (predictions[i] == golds[i]) ++correct;
  }
  report.accuracy = safe_div(static_cast<double>(correct), static_cast<double>(golds.size()));

  for (const auto& label : labels) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      bool pred = predictions[i] == label;
      bool gold = golds[i] == label;
      if (pred && gold) ++tp;
      if (pred && !gold) ++fp;
      if (!pred && gold) ++fn;
    }
    LabelScores s;
    s.support = tp + fn;
    s.precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
    s.recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
    s.f1 = safe_div(2.0 * s.precision * s.recall, s.precision + s.recall);
    report.macro_precision += s.precision;
    report.macro_recall += s.recall;
    report.macro_f1 += s.f1;
    report.per_label[label] = s;
  }
  if (!labels.empty()) {
    auto k = static_cast<double>(labels.size());
    report.macro_precision /= k;
    report.macro_recall /= k;
    report.macro_f1 /= k;
  }
  return report;
}

EvalReport classification_report(const std::vector<std::string>& predictions, const std::vector<std::string>& golds,
                                 const DatasetSchema& schema) {
  return classification_report(predictions, golds, schema.labels);
}

double sentence_bleu(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
  if (reference.empty()) throw std::invalid_argument("sentence_bleu: empty reference");
  if (candidate.empty()) return 0.0;

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto cand = ngram_counts(candidate, n);
    auto ref = ngram_counts(reference, n);
    std::size_t matches = 0;
    for (const auto& [gram, count] : cand) {
      auto it = ref.find(gram);
      if (it != ref.end()) matches += std::min(count, it->second);
    }
    double total = static_cast<double>(std::max<std::size_t>(1, candidate.size() >= n ? candidate.size() - n + 1 : 0));
    double p = matches > 0 ? static_cast<double>(matches) / total : kBleuEpsilon / total;
    log_sum += std::log(p);
  }
  auto c = static_cast<double>(candidate.size());
  auto r = static_cast<double>(reference.size());
  double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum / 4.0);
}

BertScore bertscore_tokens(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
                           const EmbeddingProvider& provider) {
  if (candidate.empty() || reference.empty()) throw std::invalid_argument("bertscore: empty token list");
  auto ce = provider.embed(candidate);
  auto re = provider.embed(reference);

  std::vector<double> best_for_ref(re.size(), -1.0);
  double precision = 0.0;
  for (const auto& c : ce) {
    double best = -1.0;
    for (std::size_t j = 0; j < re.size(); ++j) {
      double sim = cosine(c, re[j]);
      best = std::max(best, sim);
      best_for_ref[j] = std::max(best_for_ref[j], sim);
    }
    precision += best;
  }
  precision /= static_cast<double>(ce.size());
  double recall = 0.0;
  for (double b : best_for_ref) recall += b;
  recall /= static_cast<double>(re.size());

  BertScore s{precision, recall, 0.0};
  s.f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return s;
}

BertScore bertscore(std::string_view candidate, std::string_view reference, const EmbeddingProvider& provider) {
  return bertscore_tokens(text::tokenize(candidate), text::tokenize(reference), provider);
}

}  // namespace hateprobe
