#pragma once

#include <span>
#include <string>
#include <vector>

#include "hateprobe/embedding.hpp"
#include "hateprobe/metrics.hpp"

// Batch explanation scoring. `serial` is the reference implementation; the
// `parallel` versions split the batch across OpenMP threads and must agree
// with it bit for bit.
namespace hateprobe::kernels {

struct TokenPair {
  std::vector<std::string> candidate;
  std::vector<std::string> reference;
};

// An empty candidate scores 0 under both metrics. An empty reference is a
// caller error (std::invalid_argument) checked before any work starts.
namespace serial {
std::vector<double> bleu_batch(std::span<const TokenPair> pairs);
std::vector<BertScore> bertscore_batch(std::span<const TokenPair> pairs, const EmbeddingProvider& provider);
}  // namespace serial

namespace parallel {
// threads <= 0 uses the OpenMP default.
std::vector<double> bleu_batch(std::span<const TokenPair> pairs, int threads = 0);
std::vector<BertScore> bertscore_batch(std::span<const TokenPair> pairs, const EmbeddingProvider& provider,
                                       int threads = 0);
}  // namespace parallel

}  // namespace hateprobe::kernels
