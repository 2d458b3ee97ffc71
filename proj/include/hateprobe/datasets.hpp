#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hateprobe/schema.hpp"
#include "hateprobe/strategy.hpp"

namespace hateprobe {

// Half-open range of code point offsets into Sample::text.
struct CharRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const CharRange&) const = default;
};

struct Sample {
  std::string id;
  DatasetName dataset = DatasetName::kHateXplain;
  std::string text;
  std::string gold_label;
  std::optional<std::vector<std::string>> rationale_tokens;
  std::optional<std::vector<CharRange>> span_chars;
  std::optional<std::string> implied_statement;
  std::optional<std::vector<std::string>> targets;

  bool operator==(const Sample&) const = default;
};

// Per-label sample counts for a stratified draw. Selection is a pure
// function of (corpus, counts, seed).
struct SplitSpec {
  std::map<std::string, std::size_t> counts;
  std::uint64_t seed = 0;
};

struct RecordError {
  std::string id;
  std::string message;
};

struct LoadResult {
  std::vector<Sample> samples;
  std::vector<RecordError> errors;
  std::size_t skipped_ties = 0;
  std::size_t skipped_without_spans = 0;
  std::size_t merged_overlaps = 0;
};

struct ImplicitHateColumns {
  std::string id = "ID";  // optional; row numbers are used when absent
  std::string text = "post";
  std::string label = "class";
  std::string implied_statement = "implied_statement";  // optional
  std::string target = "target";                        // optional
};

struct ToxicSpansColumns {
  std::string toxic_id = "id";  // optional
  std::string toxic_text = "text";
  std::string spans = "spans";
  std::string nontoxic_id = "id";  // optional
  std::string nontoxic_text = "text";
};

// HateXplain release: `path` is dataset.json or the directory holding it.
// When post_id_divisions.json sits next to it only the "test" ids are loaded,
// in division order. Unreadable files throw DataError; malformed records are
// reported in LoadResult::errors and skipped.
LoadResult load_hatexplain(const std::filesystem::path& path);

// Stratified subsample of a CSV/TSV implicit-hate corpus. Throws DataError
// when a requested count exceeds the label's pool.
LoadResult load_implicit_hate(const std::filesystem::path& path, const SplitSpec& split,
                              const ImplicitHateColumns& columns = {});

// Toxic posts must carry span annotations (JSON offset list or [begin,end]
// pairs); non-toxic posts come from a plain-post corpus.
LoadResult load_toxicspans(const std::filesystem::path& toxic_path,
                           const std::filesystem::path& nontoxic_path, const SplitSpec& split,
                           const ToxicSpansColumns& columns = {});

// Ground-truth explanation after the substitution rules: implied statement
// (or the post) for implicit_hate, space-joined rationale tokens otherwise.
std::string resolve_explanation(const Sample& sample);

struct ResolvedTargets {
  bool drop = false;
  std::vector<std::string> targets;
};

// Targets for target-at-input prompts. Throws StrategyError for schemas
// without target annotations.
ResolvedTargets resolve_targets(const Sample& sample, const StrategyFlags& strategy);

// Sorts and merges overlapping or touching ranges. Returns the number of
// strictly overlapping pairs folded together through `overlaps`.
std::vector<CharRange> merge_ranges(std::vector<CharRange> ranges, std::size_t* overlaps = nullptr);

// Covered substrings, whitespace-tokenized, original case.
std::vector<std::string> extract_span_tokens(const std::string& text, const std::vector<CharRange>& ranges);

// Indices (ascending) of a stratified draw over `labels`; label iteration
// follows `label_order`. Throws DataError when a pool is too small.
std::vector<std::size_t> stratified_select(const std::vector<std::string>& labels, const SplitSpec& split,
                                           const std::vector<std::string>& label_order);

nlohmann::json to_json(const Sample& sample);
Sample sample_from_json(const nlohmann::json& j);

}  // namespace hateprobe
