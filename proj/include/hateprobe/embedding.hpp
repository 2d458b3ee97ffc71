#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hateprobe {

using Vector = std::vector<double>;

// One vector per token, all of the same dimension. Implementations must be
// safe for concurrent embed() calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<Vector> embed(std::span<const std::string> tokens) const = 0;
  virtual std::size_t dimension() const = 0;
};

// Context-free test double: each distinct token maps to a seeded
// pseudo-random vector with components uniform in [-1, 1].
class HashEmbeddingProvider final : public EmbeddingProvider {
 public:
  HashEmbeddingProvider(std::size_t dimension, std::uint64_t seed);
  std::vector<Vector> embed(std::span<const std::string> tokens) const override;
  std::size_t dimension() const override { return dimension_; }
  Vector vector_for(const std::string& token) const;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

std::unique_ptr<EmbeddingProvider> hash_embedding_provider(std::size_t dimension, std::uint64_t seed);

// Contextual embeddings served over HTTP. POSTs {"tokens": [...]} to `url`
// and expects {"embeddings": [[...], ...]} with one row per token.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string url, std::size_t dimension, double timeout_seconds = 30.0);
  std::vector<Vector> embed(std::span<const std::string> tokens) const override;
  std::size_t dimension() const override { return dimension_; }

 private:
  std::string url_;
  std::size_t dimension_;
  double timeout_seconds_;
};

double cosine(const Vector& a, const Vector& b);

}  // namespace hateprobe
