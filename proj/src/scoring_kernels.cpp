#include "hateprobe/scoring_kernels.hpp"

#include <omp.h>

#include <stdexcept>

namespace hateprobe::kernels {

namespace {

void require_references(std::span<const TokenPair> pairs) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].reference.empty()) {
      throw std::invalid_argument("scoring batch: empty reference at index " + std::to_string(i));
    }
  }
}

BertScore score_one(const TokenPair& pair, const EmbeddingProvider& provider) {
  if (pair.candidate.empty()) return {};
  return bertscore_tokens(pair.candidate, pair.reference, provider);
}

int thread_count(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

}  // namespace

namespace serial {

std::vector<double> bleu_batch(std::span<const TokenPair> pairs) {
  require_references(pairs);
  std::vector<double> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = sentence_bleu(pairs[i].candidate, pairs[i].reference);
  return out;
}

std::vector<BertScore> bertscore_batch(std::span<const TokenPair> pairs, const EmbeddingProvider& provider) {
  require_references(pairs);
  std::vector<BertScore> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = score_one(pairs[i], provider);
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<double> bleu_batch(std::span<const TokenPair> pairs, int threads) {
  require_references(pairs);
  std::vector<double> out(pairs.size());
  const auto n = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count(threads))
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = sentence_bleu(pairs[static_cast<std::size_t>(i)].candidate,
                                                     pairs[static_cast<std::size_t>(i)].reference);
  }
  return out;
}

std::vector<BertScore> bertscore_batch(std::span<const TokenPair> pairs, const EmbeddingProvider& provider,
                                       int threads) {
  require_references(pairs);
  std::vector<BertScore> out(pairs.size());
  const auto n = static_cast<long>(pairs.size());
  // Providers may throw (e.g. a remote embedder); the first error is rethrown
  // after the region.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_count(threads))
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = score_one(pairs[static_cast<std::size_t>(i)], provider);
    } catch (...) {
#pragma omp critical(hateprobe_bertscore_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace parallel

}  // namespace hateprobe::kernels
