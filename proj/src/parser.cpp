#include "hateprobe/parser.hpp"

#include <algorithm>

#include "hateprobe/text.hpp"

namespace hateprobe {

namespace {

// Length of a three-bracket delimiter starting at `pos`, or 0.
std::size_t delimiter_at(std::string_view s, std::size_t pos, char bracket) {
  std::size_t i = pos;
  for (int k = 0; k < 3; ++k) {
    if (k > 0 && i < s.size() && s[i] == ' ') ++i;
    if (i >= s.size() || s[i] != bracket) return 0;
    ++i;
  }
  return i - pos;
}

}  // namespace

std::string parse_label(std::string_view raw, const std::vector<std::string>& labels) {
  const std::string hay = text::to_lower(raw);
  std::vector<std::string> ordered = labels;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });

  std::size_t best_pos = std::string::npos;
  std::string best;
  for (const auto& label : ordered) {
    const std::string needle = text::to_lower(label);
    for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
      bool left_ok = pos == 0 || !text::is_word_char(hay[pos - 1]);
      std::size_t end = pos + needle.size();
      bool right_ok = end == hay.size() || !text::is_word_char(hay[end]);
      if (left_ok && right_ok) {
        if (pos < best_pos) {
          best_pos = pos;
          best = label;
        }
        break;
      }
    }
  }
  return best_pos == std::string::npos ? std::string(kUnparsed) : best;
}

std::string parse_label(std::string_view raw, const DatasetSchema& schema) { return parse_label(raw, schema.labels); }

EnclosureScan scan_enclosure(std::string_view raw) {
  std::size_t open_end = std::string_view::npos;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (auto n = delimiter_at(raw, i, '<')) {
      open_end = i + n;
      break;
    }
  }
  if (open_end == std::string_view::npos) return {};

  std::size_t close = std::string_view::npos;
  for (std::size_t i = raw.size(); i-- > open_end;) {
    if (delimiter_at(raw, i, '>')) {
      close = i;
      break;
    }
  }
  if (close == std::string_view::npos) return {std::nullopt, true};
  return {std::string(text::trim(raw.substr(open_end, close - open_end))), false};
}

std::optional<std::string> parse_enclosure(std::string_view raw) { return scan_enclosure(raw).text; }

std::vector<std::string> parse_word_list(std::string_view enclosure) {
  std::vector<std::string> items;
  auto push = [&items](std::string_view item) {
    auto t = text::trim(item);
    if (!t.empty()) items.emplace_back(t);
  };
  if (enclosure.find('"') != std::string_view::npos) {
    std::size_t pos = 0;
    while (true) {
      auto open = enclosure.find('"', pos);
      if (open == std::string_view::npos) break;
      auto close = enclosure.find('"', open + 1);
      if (close == std::string_view::npos) {
        push(enclosure.substr(open + 1));
        break;
      }
      push(enclosure.substr(open + 1, close - open - 1));
      pos = close + 1;
    }
    return items;
  }
  std::size_t start = 0;
  while (start <= enclosure.size()) {
    auto comma = enclosure.find(',', start);
    if (comma == std::string_view::npos) {
      push(enclosure.substr(start));
      break;
    }
    push(enclosure.substr(start, comma - start));
    start = comma + 1;
  }
  return items;
}

ParsedResponse parse_response(std::string_view raw, const DatasetSchema& schema, const StrategyFlags& strategy) {
  ParsedResponse out;
  auto scan = scan_enclosure(raw);
  out.malformed_enclosure = scan.malformed;
  // Labels are searched before the enclosure so quoted words cannot win.
  std::string_view head = raw;
  if (scan.text || scan.malformed) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (delimiter_at(raw, i, '<')) {
        head = raw.substr(0, i);
        break;
      }
    }
  }
  out.label = parse_label(head, schema);
  if (out.label == kUnparsed && scan.text) {
    // Some replies put the label after the enclosure.
    for (std::size_t i = raw.size(); i-- > head.size();) {
      if (auto n = delimiter_at(raw, i, '>')) {
        out.label = parse_label(raw.substr(i + n), schema);
        break;
      }
    }
  }
  if (out.label == kUnparsed && head.size() != raw.size()) out.label = parse_label(raw, schema);
  if (scan.text) {
    out.enclosure_text = *scan.text;
    bool abstractive = schema.explanation_kind == ExplanationKind::kAbstractive &&
                       strategy.explanation_mode == AugmentMode::kOutput;
    if (!abstractive) {
      out.enclosure_items = parse_word_list(*scan.text);
    }
  }
  return out;
}

}  // namespace hateprobe
