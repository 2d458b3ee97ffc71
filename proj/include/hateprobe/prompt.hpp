#pragma once

#include <string>
#include <vector>

#include "hateprobe/datasets.hpp"
#include "hateprobe/schema.hpp"
#include "hateprobe/strategy.hpp"

namespace hateprobe {

struct RenderedPrompt {
  std::string text;
  StrategyFlags strategy;
  std::string sample_id;
  DatasetName dataset = DatasetName::kHateXplain;
};

// "a, b or c"
std::string label_list(const std::vector<std::string>& labels);
std::string label_list(const DatasetSchema& schema);

// Labels offered to the model under `strategy`. Target-at-input on
// implicit_hate drops explicit_hate (those samples are excluded upstream).
std::vector<std::string> effective_labels(const DatasetSchema& schema, const StrategyFlags& strategy);

std::string definitions_block(const DatasetSchema& schema);
std::string definitions_block(const DatasetSchema& schema, const StrategyFlags& strategy);

std::string example_outputs_block(const DatasetSchema& schema, const StrategyFlags& strategy);

// `< < < "a","b"> > >`, or `<<<"a","b">>>` when compact.
std::string format_enclosure(const std::vector<std::string>& items, bool compact = false);

// Throws StrategyError when the strategy does not apply to the schema or the
// sample is dropped under target-at-input.
RenderedPrompt render(const Sample& sample, const StrategyFlags& strategy, const DatasetSchema& schema);

// Fixed sample used for the golden prompt fixtures.
Sample canonical_probe_sample(DatasetName dataset);

}  // namespace hateprobe
