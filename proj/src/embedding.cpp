#include "hateprobe/embedding.hpp"

#include <cmath>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

#include "hateprobe/error.hpp"

namespace hateprobe {

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension < 2) throw std::invalid_argument("embedding dimension must be at least 2");
}

Vector HashEmbeddingProvider::vector_for(const std::string& token) const {
  std::uint64_t state = fnv1a(token, seed_);
  Vector v(dimension_);
  for (auto& x : v) {
    // 53 random bits -> [0, 1) -> [-1, 1)
    double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    x = 2.0 * u - 1.0;
  }
  return v;
}

std::vector<Vector> HashEmbeddingProvider::embed(std::span<const std::string> tokens) const {
  std::vector<Vector> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(vector_for(t));
  return out;
}

std::unique_ptr<EmbeddingProvider> hash_embedding_provider(std::size_t dimension, std::uint64_t seed) {
  return std::make_unique<HashEmbeddingProvider>(dimension, seed);
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string url, std::size_t dimension, double timeout_seconds)
    : url_(std::move(url)), dimension_(dimension), timeout_seconds_(timeout_seconds) {}

std::vector<Vector> HttpEmbeddingProvider::embed(std::span<const std::string> tokens) const {
  if (tokens.empty()) return {};
  auto scheme_end = url_.find("://");
  auto path_start = url_.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  std::string base = path_start == std::string::npos ? url_ : url_.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url_.substr(path_start);

  httplib::Client client(base);
  auto secs = static_cast<time_t>(timeout_seconds_);
  client.set_read_timeout(secs, 0);
  client.set_connection_timeout(secs, 0);
  nlohmann::json body = {{"tokens", std::vector<std::string>(tokens.begin(), tokens.end())}};
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) throw BackendError("embedding request failed: " + httplib::to_string(res.error()), 1);
  if (res->status != 200) throw BackendError("embedding service returned HTTP " + std::to_string(res->status), 1);

  auto reply = nlohmann::json::parse(res->body);
  auto rows = reply.at("embeddings").get<std::vector<Vector>>();
  if (rows.size() != tokens.size()) throw BackendError("embedding service returned wrong row count", 1);
  for (const auto& r : rows) {
    if (r.size() != dimension_) throw BackendError("embedding dimension mismatch", 1);
  }
  return rows;
}

double cosine(const Vector& a, const Vector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace hateprobe
