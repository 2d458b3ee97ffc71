#include "hateprobe/schema.hpp"

#include <algorithm>

#include "hateprobe/error.hpp"

namespace hateprobe {

bool DatasetSchema::has_label(std::string_view label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

const DatasetSchema& schema_for(DatasetName name) {
  static const DatasetSchema kHateXplain{
      DatasetName::kHateXplain, {"normal", "offensive", "hate speech"}, ExplanationKind::kExtractive, true};
  static const DatasetSchema kImplicitHate{DatasetName::kImplicitHate,
                                           {"explicit_hate", "implicit_hate", "not_hate"},
                                           ExplanationKind::kAbstractive,
                                           true};
  static const DatasetSchema kToxicSpans{
      DatasetName::kToxicSpans, {"toxic", "non_toxic"}, ExplanationKind::kExtractive, false};
  switch (name) {
    case DatasetName::kHateXplain:
      return kHateXplain;
    case DatasetName::kImplicitHate:
      return kImplicitHate;
    case DatasetName::kToxicSpans:
      return kToxicSpans;
  }
  return kHateXplain;
}

std::string_view to_string(DatasetName name) {
  switch (name) {
    case DatasetName::kHateXplain:
      return "hatexplain";
    case DatasetName::kImplicitHate:
      return "implicit_hate";
    case DatasetName::kToxicSpans:
      return "toxicspans";
  }
  return "hatexplain";
}

DatasetName parse_dataset_name(std::string_view name) {
  if (name == "hatexplain") return DatasetName::kHateXplain;
  if (name == "implicit_hate") return DatasetName::kImplicitHate;
  if (name == "toxicspans") return DatasetName::kToxicSpans;
  throw DataError("unknown dataset '" + std::string(name) + "'");
}

}  // namespace hateprobe
