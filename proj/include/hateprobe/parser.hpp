#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hateprobe/schema.hpp"
#include "hateprobe/strategy.hpp"

namespace hateprobe {

struct ParsedResponse {
  std::string label;  // a schema label or kUnparsed
  std::optional<std::vector<std::string>> enclosure_items;
  std::optional<std::string> enclosure_text;
  bool malformed_enclosure = false;  // opening delimiter without a closing one
};

// Earliest word-boundary match of any schema label, case-insensitive; at
// equal positions the longer label wins. Returns kUnparsed when none match.
std::string parse_label(std::string_view raw, const DatasetSchema& schema);
std::string parse_label(std::string_view raw, const std::vector<std::string>& labels);

struct EnclosureScan {
  std::optional<std::string> text;
  bool malformed = false;
};

// Text between the first `<<<` and the last `>>>` (single optional spaces
// allowed between the angle brackets), trimmed.
EnclosureScan scan_enclosure(std::string_view raw);
std::optional<std::string> parse_enclosure(std::string_view raw);

// Quoted segments when quotes are present, comma split otherwise.
std::vector<std::string> parse_word_list(std::string_view enclosure);

// Full parse. The abstractive explanation (implicit_hate, explanation at
// output) stays whole in enclosure_text; every other enclosure is also split
// into a word list.
ParsedResponse parse_response(std::string_view raw, const DatasetSchema& schema,
                              const StrategyFlags& strategy = {});

}  // namespace hateprobe
