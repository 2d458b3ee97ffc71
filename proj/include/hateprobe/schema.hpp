#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hateprobe {

enum class DatasetName { kHateXplain, kImplicitHate, kToxicSpans };

enum class ExplanationKind { kExtractive, kAbstractive };

struct DatasetSchema {
  DatasetName name;
  std::vector<std::string> labels;
  ExplanationKind explanation_kind;
  bool has_targets;

  bool has_label(std::string_view label) const;
};

// Sentinel for responses where no schema label could be recovered.
inline constexpr std::string_view kUnparsed = "unparsed";

const DatasetSchema& schema_for(DatasetName name);

std::string_view to_string(DatasetName name);
// Accepts hatexplain, implicit_hate, toxicspans. Throws DataError otherwise.
DatasetName parse_dataset_name(std::string_view name);

}  // namespace hateprobe
