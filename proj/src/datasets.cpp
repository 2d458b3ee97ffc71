#include "hateprobe/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "hateprobe/csv.hpp"
#include "hateprobe/error.hpp"
#include "hateprobe/text.hpp"

namespace hateprobe {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const ordered_json::parse_error& e) {
    throw DataError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::string normalize_hatexplain_label(const std::string& raw) {
  if (raw == "hatespeech" || raw == "hate speech" || raw == "hate") return "hate speech";
  if (raw == "offensive") return "offensive";
  if (raw == "normal") return "normal";
  return {};
}

std::string majority_label(const ordered_json& annotators, bool* tie) {
  std::map<std::string, int> votes;
  for (const auto& a : annotators) {
    auto label = normalize_hatexplain_label(a.at("label").get<std::string>());
    if (label.empty()) throw DataError("unknown annotator label " + a.at("label").dump());
    ++votes[label];
  }
  int best = 0;
  std::string winner;
  int winners = 0;
  for (const auto& [label, n] : votes) {
    if (n > best) {
      best = n;
      winner = label;
      winners = 1;
    } else if (n == best) {
      ++winners;
    }
  }
  *tie = winners != 1;
  return winner;
}

// A community counts when at least half of the annotators name it.
std::vector<std::string> majority_targets(const ordered_json& annotators) {
  std::vector<std::string> order;
  std::map<std::string, int> votes;
  for (const auto& a : annotators) {
    if (!a.contains("target")) continue;
    for (const auto& t : a.at("target")) {
      auto name = t.get<std::string>();
      if (name.empty() || name == "None") continue;
      if (votes[name]++ == 0) order.push_back(name);
    }
  }
  std::vector<std::string> out;
  for (const auto& name : order) {
    if (2 * votes[name] >= static_cast<int>(annotators.size())) out.push_back(name);
  }
  return out;
}

Sample parse_hatexplain_record(const std::string& id, const ordered_json& rec, LoadResult& result,
                               bool* skip) {
  *skip = false;
  auto tokens = rec.at("post_tokens").get<std::vector<std::string>>();
  if (tokens.empty()) throw DataError("empty post_tokens");
  const auto& annotators = rec.at("annotators");
  if (!annotators.is_array() || annotators.empty()) throw DataError("no annotators");

  bool tie = false;
  auto label = majority_label(annotators, &tie);
  if (tie) {
    ++result.skipped_ties;
    *skip = true;
    return {};
  }

  std::vector<bool> marked(tokens.size(), false);
  if (rec.contains("rationales")) {
    for (const auto& mask : rec.at("rationales")) {
      if (mask.size() != tokens.size()) throw DataError("rationale mask length does not match post_tokens");
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (mask[i].get<int>() != 0) marked[i] = true;
      }
    }
  }
  std::vector<std::string> rationale;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (marked[i] && !tokens[i].empty()) rationale.push_back(tokens[i]);
  }
  // Normal posts carry no rationale: the whole tokenized post stands in.
  if (label == "normal") rationale.clear();
  if (rationale.empty()) {
    for (const auto& t : tokens) {
      if (!t.empty()) rationale.push_back(t);
    }
  }

  Sample s;
  s.id = id;
  s.dataset = DatasetName::kHateXplain;
  s.text = text::join(tokens, " ");
  s.gold_label = label;
  s.rationale_tokens = std::move(rationale);
  s.targets = majority_targets(annotators);
  return s;
}

std::string cell(const csv::Table& table, std::size_t row, std::optional<std::size_t> col) {
  if (!col) return {};
  const auto& r = table.row(row);
  return *col < r.size() ? r[*col] : std::string{};
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  // Rejection sampling keeps the draw unbiased and identical across platforms.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

std::vector<CharRange> parse_spans(const std::string& raw) {
  json j;
  try {
    j = json::parse(raw.empty() ? std::string("[]") : raw);
  } catch (const json::parse_error&) {
    throw DataError("unparseable spans cell");
  }
  if (!j.is_array()) throw DataError("spans cell is not a list");
  std::vector<CharRange> ranges;
  if (!j.empty() && j.front().is_array()) {
    for (const auto& pair : j) {
      if (pair.size() != 2) throw DataError("span pair must have two offsets");
      auto b = pair[0].get<long long>();
      auto e = pair[1].get<long long>();
      if (b < 0 || e <= b) throw DataError("invalid span pair");
      ranges.push_back({static_cast<std::size_t>(b), static_cast<std::size_t>(e)});
    }
    return ranges;
  }
  std::vector<long long> offsets;
  for (const auto& o : j) offsets.push_back(o.get<long long>());
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  for (auto o : offsets) {
    if (o < 0) throw DataError("negative span offset");
    auto u = static_cast<std::size_t>(o);
    if (!ranges.empty() && ranges.back().end == u) {
      ranges.back().end = u + 1;
    } else {
      ranges.push_back({u, u + 1});
    }
  }
  return ranges;
}

}  // namespace

std::vector<std::size_t> stratified_select(const std::vector<std::string>& labels, const SplitSpec& split,
                                           const std::vector<std::string>& label_order) {
  for (const auto& [label, count] : split.counts) {
    if (std::find(label_order.begin(), label_order.end(), label) == label_order.end()) {
      throw DataError("split requests unknown label '" + label + "'");
    }
  }
  std::vector<std::size_t> chosen;
  if (split.counts.empty()) {
    // no counts: keep every row with a schema label
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (std::find(label_order.begin(), label_order.end(), labels[i]) != label_order.end()) chosen.push_back(i);
    }
    return chosen;
  }
  std::mt19937_64 rng(split.seed);
  for (const auto& label : label_order) {
    auto it = split.counts.find(label);
    std::size_t want = it == split.counts.end() ? 0 : it->second;
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) pool.push_back(i);
    }
    if (want > pool.size()) {
      throw DataError("label '" + label + "' has " + std::to_string(pool.size()) + " samples, " +
                      std::to_string(want) + " requested");
    }
    for (std::size_t i = pool.size(); i > 1; --i) {
      std::swap(pool[i - 1], pool[bounded(rng, i)]);
    }
    chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<CharRange> merge_ranges(std::vector<CharRange> ranges, std::size_t* overlaps) {
  std::sort(ranges.begin(), ranges.end(),
            [](const CharRange& a, const CharRange& b) { return a.begin < b.begin || (a.begin == b.begin && a.end < b.end); });
  std::vector<CharRange> out;
  for (const auto& r : ranges) {
    if (!out.empty() && r.begin <= out.back().end) {
      if (overlaps && r.begin < out.back().end) ++*overlaps;
      out.back().end = std::max(out.back().end, r.end);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

std::vector<std::string> extract_span_tokens(const std::string& text, const std::vector<CharRange>& ranges) {
  std::vector<std::string> tokens;
  for (const auto& r : ranges) {
    auto b = text::utf8_byte_offset(text, r.begin);
    auto e = text::utf8_byte_offset(text, r.end);
    auto piece = text::split_whitespace(std::string_view(text).substr(b, e - b));
    tokens.insert(tokens.end(), piece.begin(), piece.end());
  }
  return tokens;
}

LoadResult load_hatexplain(const fs::path& path) {
  fs::path dataset_file = fs::is_directory(path) ? path / "dataset.json" : path;
  auto data = read_json(dataset_file);
  if (!data.is_object()) throw DataError(dataset_file.string() + ": expected an object keyed by post id");

  std::vector<std::string> ids;
  auto divisions = dataset_file.parent_path() / "post_id_divisions.json";
  if (fs::exists(divisions)) {
    auto div = read_json(divisions);
    if (!div.contains("test")) throw DataError(divisions.string() + ": no test split");
    ids = div.at("test").get<std::vector<std::string>>();
  } else {
    for (const auto& [key, _] : data.items()) ids.push_back(key);
  }

  LoadResult result;
  for (const auto& id : ids) {
    auto it = data.find(id);
    if (it == data.end()) {
      result.errors.push_back({id, "post id listed in divisions but absent from dataset"});
      continue;
    }
    try {
      bool skip = false;
      auto sample = parse_hatexplain_record(id, *it, result, &skip);
      if (!skip) result.samples.push_back(std::move(sample));
    } catch (const std::exception& e) {
      result.errors.push_back({id, e.what()});
    }
  }
  return result;
}

LoadResult load_implicit_hate(const fs::path& path, const SplitSpec& split, const ImplicitHateColumns& columns) {
  const auto& schema = schema_for(DatasetName::kImplicitHate);
  auto table = csv::read_file(path);
  auto id_col = table.column(columns.id);
  auto text_col = table.require_column(columns.text);
  auto label_col = table.require_column(columns.label);
  auto implied_col = table.column(columns.implied_statement);
  auto target_col = table.column(columns.target);

  LoadResult result;
  std::vector<Sample> pool;
  std::vector<std::string> labels;
  for (std::size_t row = 0; row < table.size(); ++row) {
    std::string id = id_col ? cell(table, row, id_col) : "ih-" + std::to_string(row + 1);
    auto label = std::string(text::trim(cell(table, row, label_col)));
    auto post = std::string(text::trim(cell(table, row, text_col)));
    if (!schema.has_label(label)) {
      result.errors.push_back({id, "label '" + label + "' not in implicit_hate schema"});
      continue;
    }
    if (text::split_whitespace(post).empty()) {
      result.errors.push_back({id, "empty post"});
      continue;
    }
    Sample s;
    s.id = id;
    s.dataset = DatasetName::kImplicitHate;
    s.text = post;
    s.gold_label = label;
    auto implied = std::string(text::trim(cell(table, row, implied_col)));
    if (!implied.empty()) s.implied_statement = implied;
    auto target = std::string(text::trim(cell(table, row, target_col)));
    if (!target.empty()) s.targets = std::vector<std::string>{target};
    labels.push_back(label);
    pool.push_back(std::move(s));
  }

  for (auto idx : stratified_select(labels, split, schema.labels)) {
    result.samples.push_back(std::move(pool[idx]));
  }
  return result;
}

LoadResult load_toxicspans(const fs::path& toxic_path, const fs::path& nontoxic_path, const SplitSpec& split,
                           const ToxicSpansColumns& columns) {
  const auto& schema = schema_for(DatasetName::kToxicSpans);
  LoadResult result;
  std::vector<Sample> pool;
  std::vector<std::string> labels;

  auto toxic = csv::read_file(toxic_path);
  auto t_id = toxic.column(columns.toxic_id);
  auto t_text = toxic.require_column(columns.toxic_text);
  auto t_spans = toxic.require_column(columns.spans);
  for (std::size_t row = 0; row < toxic.size(); ++row) {
    std::string id = t_id ? cell(toxic, row, t_id) : "ts-t-" + std::to_string(row + 1);
    auto post = cell(toxic, row, t_text);
    try {
      auto ranges = parse_spans(cell(toxic, row, t_spans));
      if (ranges.empty()) {
        ++result.skipped_without_spans;
        continue;
      }
      ranges = merge_ranges(std::move(ranges), &result.merged_overlaps);
      if (ranges.back().end > text::utf8_length(post)) throw DataError("span exceeds post length");
      auto tokens = extract_span_tokens(post, ranges);
      if (tokens.empty()) {
        // Spans covering only whitespace carry no rationale.
        ++result.skipped_without_spans;
        continue;
      }
      Sample s;
      s.id = id;
      s.dataset = DatasetName::kToxicSpans;
      s.text = post;
      s.gold_label = "toxic";
      s.span_chars = std::move(ranges);
      s.rationale_tokens = std::move(tokens);
      labels.push_back(s.gold_label);
      pool.push_back(std::move(s));
    } catch (const std::exception& e) {
      result.errors.push_back({id, e.what()});
    }
  }

  auto nontoxic = csv::read_file(nontoxic_path);
  auto n_id = nontoxic.column(columns.nontoxic_id);
  auto n_text = nontoxic.require_column(columns.nontoxic_text);
  for (std::size_t row = 0; row < nontoxic.size(); ++row) {
    std::string id = n_id ? cell(nontoxic, row, n_id) : "ts-n-" + std::to_string(row + 1);
    auto post = cell(nontoxic, row, n_text);
    auto tokens = text::tokenize(post);
    if (tokens.empty()) {
      result.errors.push_back({id, "empty post"});
      continue;
    }
    Sample s;
    s.id = id;
    s.dataset = DatasetName::kToxicSpans;
    s.text = post;
    s.gold_label = "non_toxic";
    s.rationale_tokens = std::move(tokens);
    labels.push_back(s.gold_label);
    pool.push_back(std::move(s));
  }

  for (auto idx : stratified_select(labels, split, schema.labels)) {
    result.samples.push_back(std::move(pool[idx]));
  }
  return result;
}

std::string resolve_explanation(const Sample& sample) {
  if (sample.dataset == DatasetName::kImplicitHate) {
    if (sample.implied_statement && !text::trim(*sample.implied_statement).empty()) return *sample.implied_statement;
    return sample.text;
  }
  if (sample.rationale_tokens && !sample.rationale_tokens->empty()) return text::join(*sample.rationale_tokens, " ");
  return text::join(text::tokenize(sample.text), " ");
}

ResolvedTargets resolve_targets(const Sample& sample, const StrategyFlags& strategy) {
  const auto& schema = schema_for(sample.dataset);
  validate_for(strategy, schema);
  if (sample.dataset == DatasetName::kImplicitHate) {
    if (sample.gold_label == "explicit_hate") return {true, {}};
    if (sample.gold_label == "not_hate") return {false, {"none"}};
  }
  std::vector<std::string> targets = sample.targets.value_or(std::vector<std::string>{});
  if (targets.empty()) targets.push_back("none");
  return {false, std::move(targets)};
}

json to_json(const Sample& s) {
  json j;
  j["id"] = s.id;
  j["dataset"] = std::string(to_string(s.dataset));
  j["text"] = s.text;
  j["gold_label"] = s.gold_label;
  j["rationale"] = s.rationale_tokens ? json(*s.rationale_tokens) : json(nullptr);
  if (s.span_chars) {
    json spans = json::array();
    for (const auto& r : *s.span_chars) spans.push_back({r.begin, r.end});
    j["spans"] = spans;
  }
  j["implied_statement"] = s.implied_statement ? json(*s.implied_statement) : json(nullptr);
  j["targets"] = s.targets ? json(*s.targets) : json(nullptr);
  return j;
}

Sample sample_from_json(const json& j) {
  Sample s;
  s.id = j.at("id").get<std::string>();
  s.dataset = parse_dataset_name(j.at("dataset").get<std::string>());
  s.text = j.at("text").get<std::string>();
  s.gold_label = j.at("gold_label").get<std::string>();
  if (j.contains("rationale") && !j["rationale"].is_null()) {
    s.rationale_tokens = j["rationale"].get<std::vector<std::string>>();
  }
  if (j.contains("spans") && !j["spans"].is_null()) {
    std::vector<CharRange> ranges;
    for (const auto& p : j["spans"]) ranges.push_back({p[0].get<std::size_t>(), p[1].get<std::size_t>()});
    s.span_chars = std::move(ranges);
  }
  if (j.contains("implied_statement") && !j["implied_statement"].is_null()) {
    s.implied_statement = j["implied_statement"].get<std::string>();
  }
  if (j.contains("targets") && !j["targets"].is_null()) {
    s.targets = j["targets"].get<std::vector<std::string>>();
  }
  return s;
}

}  // namespace hateprobe
