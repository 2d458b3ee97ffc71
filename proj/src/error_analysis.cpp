#include "hateprobe/error_analysis.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hateprobe/csv.hpp"
#include "hateprobe/error.hpp"
#include "hateprobe/text.hpp"

namespace hateprobe {

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) n = std::accumulate(row.begin(), row.end(), n);
  return n;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) n += counts[i][i];
  return n;
}

std::size_t ConfusionMatrix::unparsed() const {
  std::size_t n = 0;
  for (const auto& row : counts) n += row.back();
  return n;
}

std::size_t ConfusionMatrix::at(const std::string& gold, const std::string& predicted) const {
  auto g = std::find(labels.begin(), labels.end(), gold);
  if (g == labels.end()) throw std::out_of_range("unknown gold label " + gold);
  auto p = std::find(labels.begin(), labels.end(), predicted);
  std::size_t col = p == labels.end() ? labels.size() : static_cast<std::size_t>(p - labels.begin());
  return counts[static_cast<std::size_t>(g - labels.begin())][col];
}

std::string ConfusionMatrix::to_text() const {
  std::vector<std::string> cols = labels;
  cols.emplace_back(kUnparsed);
  std::size_t width = std::string("gold \\ predicted").size();
  for (const auto& c : cols) width = std::max(width, c.size());
  for (const auto& row : counts) {
    for (auto v : row) width = std::max(width, std::to_string(v).size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "gold \\ predicted";
  for (const auto& c : cols) out << "  " << std::right << std::setw(static_cast<int>(width)) << c;
  out << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << std::left << std::setw(static_cast<int>(width)) << labels[i];
    for (auto v : counts[i]) out << "  " << std::right << std::setw(static_cast<int>(width)) << v;
    out << '\n';
  }
  return out.str();
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  out << "gold";
  for (const auto& l : labels) out << ',' << csv::escape(l);
  out << ',' << kUnparsed << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << csv::escape(labels[i]);
    for (auto v : counts[i]) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

ConfusionMatrix confusion(const std::vector<std::string>& predictions, const std::vector<std::string>& golds,
                          const DatasetSchema& schema) {
  if (predictions.size() != golds.size()) throw std::invalid_argument("confusion: length mismatch");
  ConfusionMatrix m;
  m.labels = schema.labels;
  m.counts.assign(m.labels.size(), std::vector<std::size_t>(m.labels.size() + 1, 0));
  auto index_of = [&](const std::string& label) {
    auto it = std::find(m.labels.begin(), m.labels.end(), label);
    return it == m.labels.end() ? m.labels.size() : static_cast<std::size_t>(it - m.labels.begin());
  };
  for (std::size_t i = 0; i < golds.size(); ++i) {
    auto g = index_of(golds[i]);
    if (g == m.labels.size()) throw std::invalid_argument("confusion: gold label '" + golds[i] + "' not in schema");
    ++m.counts[g][index_of(predictions[i])];
  }
  return m;
}

RankedRecords rank_errors(const std::vector<RunRecord>& records) {
  RankedRecords out;
  for (const auto& r : records) {
    if (r.explanation_score) {
      out.records.push_back(r);
    } else {
      ++out.excluded_without_score;
    }
  }
  std::stable_sort(out.records.begin(), out.records.end(), [](const RunRecord& a, const RunRecord& b) {
    if (*a.explanation_score != *b.explanation_score) return *a.explanation_score < *b.explanation_score;
    return a.sample_id < b.sample_id;
  });
  return out;
}

Direction default_direction(DatasetName dataset) {
  switch (dataset) {
    case DatasetName::kImplicitHate:
      return {{"not_hate", "implicit_hate"}, {"implicit_hate", "not_hate"}};
    case DatasetName::kHateXplain:
      return {{"normal", "hate speech"}, {"normal", "offensive"}, {"hate speech", "normal"}, {"offensive", "normal"}};
    case DatasetName::kToxicSpans:
      return {{"non_toxic", "toxic"}, {"toxic", "non_toxic"}};
  }
  return {};
}

CommonErrors common_errors(const std::map<std::string, std::vector<RunRecord>>& per_model, const Direction& direction,
                           std::size_t limit) {
  if (per_model.size() < 2) throw DataError("common_errors needs records from at least two models");

  std::map<std::string, std::map<std::string, const RunRecord*>> by_model;
  std::set<std::string> all_ids;
  for (const auto& [model, records] : per_model) {
    auto& index = by_model[model];
    for (const auto& r : records) {
      index[r.sample_id] = &r;
      all_ids.insert(r.sample_id);
    }
  }
  std::vector<std::string> missing;
  for (const auto& [model, index] : by_model) {
    for (const auto& id : all_ids) {
      if (!index.contains(id)) missing.push_back(model + ":" + id);
    }
  }
  if (!missing.empty()) {
    if (missing.size() > 20) missing.resize(20);
    throw DataError("models cover different sample ids; missing " + text::join(missing, ", "));
  }

  CommonErrors out;
  for (const auto& id : all_ids) {
    ErrorCase c;
    c.sample_id = id;
    bool all_wrong = true;
    double score_sum = 0.0;
    std::size_t scored = 0;
    for (const auto& [model, index] : by_model) {
      const RunRecord& r = *index.at(id);
      c.gold_label = r.gold_label;
      c.text = r.text;
      c.predictions[model] = r.parsed_label;
      if (!direction.contains({r.gold_label, r.parsed_label})) all_wrong = false;
      if (r.explanation_score) {
        score_sum += *r.explanation_score;
        ++scored;
      }
    }
    if (!all_wrong) continue;
    if (scored == 0) {
      ++out.excluded_without_score;
      continue;
    }
    c.explanation_score = score_sum / static_cast<double>(scored);
    out.cases.push_back(std::move(c));
  }
  out.qualifying = out.cases.size();
  std::stable_sort(out.cases.begin(), out.cases.end(), [](const ErrorCase& a, const ErrorCase& b) {
    if (a.explanation_score != b.explanation_score) return a.explanation_score < b.explanation_score;
    return a.sample_id < b.sample_id;
  });
  if (out.cases.size() > limit) out.cases.resize(limit);
  return out;
}

Typology induce_typology(std::vector<ErrorCase> cases, const LdaOptions& options, std::size_t top_n,
                         std::size_t exemplars) {
  if (cases.size() < options.k) {
    throw DataError("typology needs at least k=" + std::to_string(options.k) + " error cases, got " +
                    std::to_string(cases.size()));
  }
  std::vector<std::vector<std::string>> docs;
  for (const auto& c : cases) docs.push_back(text::split_whitespace(c.text));

  Typology t;
  t.model = lda_fit(docs, options);
  t.cases = std::move(cases);
  for (std::size_t topic = 0; topic < options.k; ++topic) {
    TypologyTopic block;
    block.words = top_words(t.model, topic, top_n);
    std::vector<std::size_t> order(t.cases.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return t.model.doc_topic[a][topic] > t.model.doc_topic[b][topic];
    });
    order.resize(std::min(exemplars, order.size()));
    block.exemplars = std::move(order);
    t.topics.push_back(std::move(block));
  }
  return t;
}

std::string typology_worksheet(const Typology& t, DatasetName dataset) {
  std::ostringstream out;
  out << "# typology worksheet\n";
  out << "dataset\t" << to_string(dataset) << '\n';
  out << "error_cases\t" << t.cases.size() << '\n';
  out << "topics\t" << t.model.k << '\n';
  for (std::size_t i = 0; i < t.topics.size(); ++i) {
    const auto& topic = t.topics[i];
    std::vector<std::string> four(topic.words.begin(),
                                  topic.words.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(4, topic.words.size())));
    out << '\n';
    out << "## topic " << (i + 1) << '\n';
    out << "top_words\t" << text::join(topic.words, ", ") << '\n';
    out << "top_4\t" << text::join(four, ", ") << '\n';
    out << "type_name\t\n";
    out << "sample_id\tshare\tgold\tpredicted\tpost\n";
    for (auto idx : topic.exemplars) {
      const auto& c = t.cases[idx];
      std::vector<std::string> preds;
      for (const auto& [model, label] : c.predictions) preds.push_back(model + "=" + label);
      std::ostringstream share;
      share << std::fixed << std::setprecision(3) << t.model.doc_topic[idx][i];
      auto post = text::replace_all(text::replace_all(c.text, "\t", " "), "\n", " ");
      out << c.sample_id << '\t' << share.str() << '\t' << c.gold_label << '\t' << text::join(preds, "; ") << '\t'
          << post << '\n';
    }
  }

  out << "\n## error cases\n";
  out << "sample_id\tscore\tdominant_topic\tgold\tpredicted\tpost\n";
  for (std::size_t d = 0; d < t.cases.size(); ++d) {
    const auto& c = t.cases[d];
    const auto& mix = t.model.doc_topic[d];
    const auto top = static_cast<std::size_t>(std::max_element(mix.begin(), mix.end()) - mix.begin());
    std::vector<std::string> preds;
    for (const auto& [model, label] : c.predictions) preds.push_back(model + "=" + label);
    std::ostringstream score;
    score << std::fixed << std::setprecision(4) << c.explanation_score;
    out << c.sample_id << '\t' << score.str() << '\t' << (top + 1) << '\t' << c.gold_label << '\t'
        << text::join(preds, "; ") << '\t' << text::replace_all(text::replace_all(c.text, "\t", " "), "\n", " ")
        << '\n';
  }
  return out.str();
}

}  // namespace hateprobe
