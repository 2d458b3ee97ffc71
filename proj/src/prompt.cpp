#include "hateprobe/prompt.hpp"

#include <algorithm>
#include <string_view>
#include <utility>

#include "hateprobe/error.hpp"
#include "hateprobe/text.hpp"

namespace hateprobe {

namespace {

constexpr std::string_view kDelimiter = "```";
constexpr std::string_view kDelimiterSubstitute = "'''";

struct LabelText {
  std::string_view label;
  std::string_view definition;
};

// Definition order follows the published prompts (harmful classes first).
std::vector<LabelText> definitions_for(DatasetName name) {
  switch (name) {
    case DatasetName::kImplicitHate:
      return {
          {"implicit_hate",
           "Implicit hate speech is defined by coded or indirect language that disparages a person or group on the "
           "basis of protected characteristics like race, gender, and cultural identity."},
          {"explicit_hate",
           "Explicit hate refers to openly expressed, direct forms of hatred and prejudice toward individuals or "
           "groups based on their characteristics."},
          {"not_hate",
           "This class refers to speech or actions that do not involve any form of hatred, prejudice, or "
           "discrimination toward individuals or groups based on their characteristics."},
      };
    case DatasetName::kHateXplain:
      return {
          {"hate speech",
           "Any speech or text that attacks a person or group on the basis of attributes such as race, religion, "
           "ethnic origin, national origin, gender, disability, sexual orientation, or gender identity."},
          {"offensive", "The text or speech which uses abusive slurs or derogatory terms but may not be hate speech."},
          {"normal", "The text which is neither offensive or hate speech and adheres to social norms."},
      };
    case DatasetName::kToxicSpans:
      return {
          {"toxic",
           "In social media and online forum, toxic content can be defined as rude, disrespectful, or unreasonable "
           "posts that would make users want to leave the conversation."},
          {"non_toxic", "The speech or text that is not toxic and is fit for use in conversation."},
      };
  }
  return {};
}

std::vector<std::string_view> example_order(DatasetName name) {
  switch (name) {
    case DatasetName::kHateXplain:
      return {"offensive", "hate speech", "normal"};
    case DatasetName::kImplicitHate:
      return {"implicit_hate", "explicit_hate", "not_hate"};
    case DatasetName::kToxicSpans:
      return {"toxic", "non_toxic"};
  }
  return {};
}

bool is_benign(std::string_view label) {
  return label == "normal" || label == "not_hate" || label == "non_toxic";
}

std::vector<std::string> placeholder_items(DatasetName name, const StrategyFlags& strategy, std::string_view label) {
  if (strategy.target_mode == AugmentMode::kOutput) return {"targeted group 1", "targeted group 2"};
  switch (name) {
    case DatasetName::kHateXplain:
      if (label == "hate speech") return {"hateful word 1", "hateful word 2"};
      return {"offensive word 1", "offensive word 2"};
    case DatasetName::kToxicSpans:
      return {"Toxic word 1", "Toxic word 2"};
    case DatasetName::kImplicitHate:
      return {};
  }
  return {};
}

std::string explanation_request(DatasetName name) {
  switch (name) {
    case DatasetName::kHateXplain:
      return "and extract the words from the post that you found as hate speech or offensive";
    case DatasetName::kToxicSpans:
      return "and extract the words from the post that you found as toxic";
    case DatasetName::kImplicitHate:
      return "with an explanation in 15 words";
  }
  return {};
}

std::string explanation_format(DatasetName name) {
  if (name == DatasetName::kImplicitHate) return "the explanation enclosed in < < < > > >.";
  return "the list of extracted words, separated by \",\". Enclose the list with < < < > > >.";
}

std::string explanation_context(DatasetName name, const std::string& explanation) {
  switch (name) {
    case DatasetName::kHateXplain:
      return "the rationales \"" + explanation +
             "\" as an explanation for why a post should be considered as hateful or offensive or none of these two";
    case DatasetName::kToxicSpans:
      return "the span \"" + explanation + "\" as an explanation for why a post should be considered as toxic or not";
    case DatasetName::kImplicitHate:
      return "the implied statement \"" + explanation +
             "\" as an explanation for why a post should be considered as implicitly hateful, explicitly hateful or "
             "none of these";
  }
  return {};
}

std::string shield(std::string s) {
  return text::replace_all(std::move(s), kDelimiter, kDelimiterSubstitute);
}

}  // namespace

std::string label_list(const std::vector<std::string>& labels) {
  if (labels.empty()) return {};
  if (labels.size() == 1) return labels.front();
  std::string out;
  for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
    if (i > 0) out += ", ";
    out += labels[i];
  }
  out += " or ";
  out += labels.back();
  return out;
}

std::string label_list(const DatasetSchema& schema) { return label_list(schema.labels); }

std::vector<std::string> effective_labels(const DatasetSchema& schema, const StrategyFlags& strategy) {
  if (schema.name == DatasetName::kImplicitHate && strategy.target_mode == AugmentMode::kInput) {
    return {"implicit_hate", "not_hate"};
  }
  return schema.labels;
}

std::string definitions_block(const DatasetSchema& schema) { return definitions_block(schema, StrategyFlags{}); }

std::string definitions_block(const DatasetSchema& schema, const StrategyFlags& strategy) {
  auto labels = effective_labels(schema, strategy);
  std::string out = "Consider the following definitions.";
  int n = 0;
  for (const auto& d : definitions_for(schema.name)) {
    if (std::find(labels.begin(), labels.end(), d.label) == labels.end()) continue;
    out += "\n" + std::to_string(++n) + ". " + std::string(d.label) + ": " + std::string(d.definition);
  }
  return out;
}

std::string format_enclosure(const std::vector<std::string>& items, bool compact) {
  std::string body;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) body += ",";
    body += "\"" + items[i] + "\"";
  }
  return compact ? "<<<" + body + ">>>" : "< < < " + body + "> > >";
}

std::string example_outputs_block(const DatasetSchema& schema, const StrategyFlags& strategy) {
  // The abstractive format sentence alone specifies the enclosure.
  if (schema.name == DatasetName::kImplicitHate && strategy.explanation_mode == AugmentMode::kOutput) return {};
  auto labels = effective_labels(schema, strategy);
  std::string out;
  for (auto label : example_order(schema.name)) {
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) continue;
    if (!out.empty()) out += "\n";
    out += "Example output for " + std::string(label) + " : " + std::string(label);
    if (strategy.has_output_mode() && !is_benign(label)) {
      out += " " + format_enclosure(placeholder_items(schema.name, strategy, label));
    }
  }
  return out;
}

RenderedPrompt render(const Sample& sample, const StrategyFlags& strategy, const DatasetSchema& schema) {
  validate_for(strategy, schema);
  if (sample.dataset != schema.name) {
    throw StrategyError("sample " + sample.id + " belongs to " + std::string(to_string(sample.dataset)) +
                        ", not " + std::string(to_string(schema.name)));
  }
  const auto labels = label_list(effective_labels(schema, strategy));

  std::vector<std::string> lines;
  if (strategy.use_definition) lines.push_back(definitions_block(schema, strategy));

  std::string ask = strategy.use_definition ? "Based on this classify" : "Classify";
  ask += " the post delimited by three backticks as " + labels;
  if (strategy.explanation_mode == AugmentMode::kOutput) {
    ask += " " + explanation_request(schema.name);
  } else if (strategy.target_mode == AugmentMode::kOutput) {
    ask += " and also mention which group of people does it target";
  } else if (strategy.explanation_mode == AugmentMode::kInput) {
    ask += " taking into account " + explanation_context(schema.name, shield(resolve_explanation(sample)));
  } else if (strategy.target_mode == AugmentMode::kInput) {
    auto resolved = resolve_targets(sample, strategy);
    if (resolved.drop) {
      throw StrategyError("sample " + sample.id + " is excluded under " + std::string(strategy_name(strategy)));
    }
    ask += " with respect to the victim community " + shield(text::join(resolved.targets, ", "));
  }
  lines.push_back(ask + ".");

  if (strategy.explanation_mode == AugmentMode::kOutput) {
    lines.push_back("Provide answer in the format : either " + labels + " only followed by " +
                    explanation_format(schema.name));
  } else if (strategy.target_mode == AugmentMode::kOutput) {
    lines.push_back("Provide answer in the format : either " + labels +
                    " only followed by the list of targeted groups enclosed in < < < > > >.");
  } else {
    lines.push_back("Provide the answer as either " + labels + " only.");
  }

  auto examples = example_outputs_block(schema, strategy);
  if (!examples.empty()) lines.push_back(examples);

  lines.push_back(std::string(kDelimiter) + shield(sample.text) + std::string(kDelimiter));

  return RenderedPrompt{text::join(lines, "\n"), strategy, sample.id, schema.name};
}

Sample canonical_probe_sample(DatasetName dataset) {
  Sample s;
  s.dataset = dataset;
  switch (dataset) {
    case DatasetName::kHateXplain:
      s.id = "probe-hatexplain";
      s.text = "those people should go back where they came from";
      s.gold_label = "hate speech";
      s.rationale_tokens = std::vector<std::string>{"go", "back", "where", "they", "came", "from"};
      s.targets = std::vector<std::string>{"Refugee", "Arab"};
      break;
    case DatasetName::kImplicitHate:
      s.id = "probe-implicit_hate";
      s.text = "they are not sending their best , you know what i mean";
      s.gold_label = "implicit_hate";
      s.implied_statement = "immigrants are criminals";
      s.targets = std::vector<std::string>{"immigrants"};
      break;
    case DatasetName::kToxicSpans:
      s.id = "probe-toxicspans";
      s.text = "What an idiot, this plan is pure garbage.";
      s.gold_label = "toxic";
      s.span_chars = std::vector<CharRange>{{8, 13}, {33, 40}};
      s.rationale_tokens = std::vector<std::string>{"idiot", "garbage"};
      break;
  }
  return s;
}

}  // namespace hateprobe
