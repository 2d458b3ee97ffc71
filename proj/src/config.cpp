#include "hateprobe/config.hpp"

#include <fstream>
#include <set>

#include "hateprobe/error.hpp"

namespace hateprobe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

void validate(const RunConfig& c) {
  const auto& schema = schema_for(c.dataset.name);
  if (c.strategies.empty()) throw DataError("run config lists no strategies");
  for (const auto& s : c.strategies) validate_for(s, schema);
  if (c.backends.empty()) throw DataError("run config lists no models");
  std::set<std::string> ids;
  for (const auto& b : c.backends) {
    validate(b);
    if (!ids.insert(b.model_id).second) throw DataError("duplicate model id " + b.model_id);
  }
  if (c.parallelism <= 0) throw DataError("parallelism must be positive");
  if (c.output_dir.empty()) throw DataError("output directory not set");
  if (c.dataset.path.empty()) throw DataError("dataset path not set");
  if (c.dataset.name == DatasetName::kToxicSpans && c.dataset.nontoxic_path.empty()) {
    throw DataError("toxicspans needs a non-toxic corpus path");
  }
  if (c.embedding.kind != "hash" && c.embedding.kind != "http") {
    throw DataError("unknown embedding provider " + c.embedding.kind);
  }
}

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
  RunConfig c;
  const auto& d = j.at("dataset");
  c.dataset.name = parse_dataset_name(d.at("name").get<std::string>());
  c.dataset.path = resolve(base_dir, d.at("path").get<std::string>());
  c.dataset.nontoxic_path = resolve(base_dir, d.value("nontoxic_path", std::string{}));
  if (d.contains("columns")) {
    const auto& col = d["columns"];
    auto& ih = c.dataset.implicit_columns;
    ih.id = col.value("id", ih.id);
    ih.text = col.value("text", ih.text);
    ih.label = col.value("label", ih.label);
    ih.implied_statement = col.value("implied_statement", ih.implied_statement);
    ih.target = col.value("target", ih.target);
    auto& ts = c.dataset.toxic_columns;
    ts.toxic_id = col.value("toxic_id", ts.toxic_id);
    ts.toxic_text = col.value("toxic_text", ts.toxic_text);
    ts.spans = col.value("spans", ts.spans);
    ts.nontoxic_id = col.value("nontoxic_id", ts.nontoxic_id);
    ts.nontoxic_text = col.value("nontoxic_text", ts.nontoxic_text);
  }
  if (j.contains("split")) {
    const auto& s = j["split"];
    if (s.contains("counts")) c.split.counts = s["counts"].get<std::map<std::string, std::size_t>>();
    c.split.seed = s.value("seed", std::uint64_t{0});
  }
  for (const auto& name : j.at("strategies")) c.strategies.push_back(parse_strategy(name.get<std::string>()));
  for (const auto& b : j.at("models")) c.backends.push_back(backend_config_from_json(b));
  c.limit = j.value("limit", std::size_t{0});
  c.parallelism = j.value("parallelism", 4);
  c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
  c.cache_path = resolve(base_dir, j.value("cache", std::string{}));
  if (j.contains("embedding")) {
    const auto& e = j["embedding"];
    c.embedding.kind = e.value("kind", c.embedding.kind);
    c.embedding.dimension = e.value("dimension", c.embedding.dimension);
    c.embedding.seed = e.value("seed", c.embedding.seed);
    c.embedding.url = e.value("url", c.embedding.url);
  }
  return c;
}

json to_json(const RunConfig& c) {
  json d = {{"name", std::string(to_string(c.dataset.name))}, {"path", c.dataset.path.string()}};
  if (!c.dataset.nontoxic_path.empty()) d["nontoxic_path"] = c.dataset.nontoxic_path.string();
  json strategies = json::array();
  for (const auto& s : c.strategies) strategies.push_back(std::string(strategy_name(s)));
  json models = json::array();
  for (const auto& b : c.backends) models.push_back(to_json(b));
  return {{"dataset", d},
          {"split", {{"counts", c.split.counts}, {"seed", c.split.seed}}},
          {"strategies", strategies},
          {"models", models},
          {"limit", c.limit},
          {"parallelism", c.parallelism},
          {"output_dir", c.output_dir.string()},
          {"cache", c.cache_path.string()},
          {"embedding",
           {{"kind", c.embedding.kind},
            {"dimension", c.embedding.dimension},
            {"seed", c.embedding.seed},
            {"url", c.embedding.url}}}};
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("invalid config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingSelection& s) {
  if (s.kind == "http") return std::make_unique<HttpEmbeddingProvider>(s.url, s.dimension);
  return hash_embedding_provider(s.dimension, s.seed);
}

}  // namespace hateprobe
