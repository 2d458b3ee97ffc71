#include "hateprobe/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "hateprobe/digest.hpp"
#include "hateprobe/error.hpp"
#include "hateprobe/parser.hpp"
#include "hateprobe/prompt.hpp"
#include "hateprobe/scoring_kernels.hpp"
#include "hateprobe/text.hpp"

namespace hateprobe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  return json::parse(in);
}

fs::path report_base(const fs::path& run_dir, const std::string& model_id, const std::string& strategy) {
  return run_dir / "reports" / model_slug(model_id) / strategy;
}

std::string explanation_column(DatasetName dataset) {
  return dataset == DatasetName::kImplicitHate ? "bs" : "bl";
}

struct SummaryRow {
  std::string strategy;
  EvalReport report;
};

void write_summary(const fs::path& run_dir, const std::string& model_id, DatasetName dataset,
                   const std::vector<SummaryRow>& rows) {
  const std::string col = explanation_column(dataset);
  std::ostringstream csv;
  csv << "strategy,acc,pre,rec,f1," << col << ",n,unparsed\n";
  for (const auto& r : rows) {
    csv << r.strategy << ',' << fmt(r.report.accuracy, 6) << ',' << fmt(r.report.macro_precision, 6) << ','
        << fmt(r.report.macro_recall, 6) << ',' << fmt(r.report.macro_f1, 6) << ','
        << (r.report.mean_explanation_score ? fmt(*r.report.mean_explanation_score, 6) : "") << ','
        << r.report.n_samples << ',' << r.report.n_unparsed << '\n';
  }

  std::vector<std::vector<std::string>> cells;
  std::string upper = col == "bs" ? "BS" : "BL";
  cells.push_back({"Strategy", "Acc", "Pre", "Rec", "F1", upper});
  for (const auto& r : rows) {
    cells.push_back({r.strategy, fmt(r.report.accuracy, 4), fmt(r.report.macro_precision, 4),
                     fmt(r.report.macro_recall, 4), fmt(r.report.macro_f1, 4),
                     r.report.mean_explanation_score ? fmt(*r.report.mean_explanation_score, 4) : "-"});
  }
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream txt;
  txt << model_id << " (" << to_string(dataset) << ")\n";
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        txt << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        txt << "  " << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
    }
    txt << '\n';
  }
  write_file(run_dir / "summary" / (model_slug(model_id) + ".csv"), csv.str());
  write_file(run_dir / "summary" / (model_slug(model_id) + ".txt"), txt.str());
}

// Writes the per-cell report files and returns the report.
EvalReport write_cell_reports(const fs::path& run_dir, const std::string& model_id, const StrategyFlags& strategy,
                              DatasetName dataset, const std::vector<RunRecord>& records) {
  EvalReport rep = evaluate_records(records, dataset, strategy);
  std::vector<std::string> preds, golds;
  for (const auto& r : records) {
    preds.push_back(r.parsed_label);
    golds.push_back(r.gold_label);
  }
  auto cm = confusion(preds, golds, schema_for(dataset));
  const auto base = report_base(run_dir, model_id, std::string(strategy_name(strategy)));
  write_file(fs::path(base.string() + ".json"), to_json(rep).dump(2) + "\n");
  write_file(fs::path(base.string() + ".confusion.txt"), cm.to_text());
  write_file(fs::path(base.string() + ".confusion.csv"), cm.to_csv());
  return rep;
}

// Explanation scores for records of an explanation-at-output strategy.
void score_explanations(std::vector<RunRecord>& records, const std::unordered_map<std::string, const Sample*>& by_id,
                        DatasetName dataset, const EmbeddingProvider& embedding, int threads) {
  std::vector<kernels::TokenPair> pairs;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto it = by_id.find(r.sample_id);
    if (it == by_id.end()) continue;
    auto reference = text::tokenize(resolve_explanation(*it->second));
    if (reference.empty()) continue;
    std::vector<std::string> candidate;
    if (dataset == DatasetName::kImplicitHate) {
      if (r.enclosure_text) candidate = text::tokenize(*r.enclosure_text);
    } else if (r.enclosure_items) {
      candidate = text::tokenize(text::join(*r.enclosure_items, " "));
    }
    pairs.push_back({std::move(candidate), std::move(reference)});
    index.push_back(i);
  }
  if (dataset == DatasetName::kImplicitHate) {
    auto scores = kernels::parallel::bertscore_batch(pairs, embedding, threads);
    for (std::size_t j = 0; j < index.size(); ++j) records[index[j]].explanation_score = scores[j].f1;
  } else {
    auto scores = kernels::parallel::bleu_batch(pairs, threads);
    for (std::size_t j = 0; j < index.size(); ++j) records[index[j]].explanation_score = scores[j];
  }
}

std::vector<RunRecord> read_partial(const fs::path& path) {
  if (!fs::exists(path)) return {};
  try {
    return read_records(path);
  } catch (const DataError&) {
    // A corrupt partial file is only a lost optimization.
    return {};
  }
}

}  // namespace

std::string model_slug(const std::string& model_id) {
  std::string out = model_id;
  for (char& c : out) {
    if (c == '/' || c == ':' || c == '\\' || c == ' ') c = '_';
  }
  return out;
}

fs::path records_path(const fs::path& run_dir, const std::string& model_id, const std::string& strategy) {
  return run_dir / "records" / model_slug(model_id) / (strategy + ".jsonl");
}

LoadResult load_samples(const RunConfig& config) {
  const auto& d = config.dataset;
  LoadResult loaded;
  switch (d.name) {
    case DatasetName::kHateXplain: {
      loaded = load_hatexplain(d.path);
      if (!config.split.counts.empty()) {
        std::vector<std::string> labels;
        for (const auto& s : loaded.samples) labels.push_back(s.gold_label);
        auto keep = stratified_select(labels, config.split, schema_for(d.name).labels);
        std::vector<Sample> picked;
        for (auto i : keep) picked.push_back(std::move(loaded.samples[i]));
        loaded.samples = std::move(picked);
      }
      break;
    }
    case DatasetName::kImplicitHate:
      loaded = load_implicit_hate(d.path, config.split, d.implicit_columns);
      break;
    case DatasetName::kToxicSpans:
      loaded = load_toxicspans(d.path, d.nontoxic_path, config.split, d.toxic_columns);
      break;
  }
  if (config.limit > 0 && loaded.samples.size() > config.limit) loaded.samples.resize(config.limit);
  std::set<std::string> seen;
  for (const auto& s : loaded.samples) {
    if (!seen.insert(s.id).second) throw DataError("duplicate sample id " + s.id);
  }
  return loaded;
}

RunSummary run(const RunConfig& config, const RunHooks& hooks) {
  validate(config);
  const auto& schema = schema_for(config.dataset.name);
  std::ostream* log = hooks.log;

  LoadResult loaded = load_samples(config);
  if (log) {
    *log << "loaded " << loaded.samples.size() << " samples (" << loaded.errors.size() << " bad records, "
         << loaded.skipped_ties << " ties, " << loaded.skipped_without_spans << " without spans)\n";
    for (const auto& e : loaded.errors) *log << "  skipped " << e.id << ": " << e.message << '\n';
  }
  if (loaded.samples.empty()) throw DataError("no samples loaded");

  std::map<std::string, std::shared_ptr<CompletionBackend>> backends;
  for (const auto& b : config.backends) {
    auto it = hooks.backends.find(b.model_id);
    backends[b.model_id] = it != hooks.backends.end() ? it->second : make_backend(b);
  }
  std::unique_ptr<EmbeddingProvider> owned_embedding;
  const EmbeddingProvider* embedding = hooks.embedding;
  if (!embedding) {
    owned_embedding = make_embedding_provider(config.embedding);
    embedding = owned_embedding.get();
  }

  auto cache = hooks.cache;
  if (!cache) {
    cache = config.cache_path.empty() ? std::make_shared<CompletionCache>()
                                      : std::make_shared<CompletionCache>(config.cache_path);
  }
  Gateway gateway(cache, hooks.clock ? hooks.clock : system_clock());
  for (const auto& b : config.backends) gateway.register_backend(b, backends.at(b.model_id));

  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  write_file(dir / "run.json", to_json(config).dump(2) + "\n");

  std::unordered_map<std::string, const Sample*> by_id;
  for (const auto& s : loaded.samples) by_id[s.id] = &s;

  RunSummary summary;
  summary.directory = dir;
  for (const auto& backend : config.backends) {
    std::vector<SummaryRow> rows;
    for (const auto& strategy : config.strategies) {
      const std::string sname(strategy_name(strategy));

      std::vector<RenderedPrompt> prompts;
      std::vector<const Sample*> subjects;
      for (const auto& s : loaded.samples) {
        if (strategy.target_mode == AugmentMode::kInput && resolve_targets(s, strategy).drop) continue;
        prompts.push_back(render(s, strategy, schema));
        subjects.push_back(&s);
      }

      const fs::path final_path = records_path(dir, backend.model_id, sname);
      const fs::path partial_path = fs::path(final_path.string() + ".partial");
      fs::create_directories(final_path.parent_path());

      // Resume: keep partial records whose prompt is unchanged.
      std::unordered_map<std::string, RunRecord> done;
      for (auto& r : read_partial(partial_path)) {
        if (r.model_id == backend.model_id && r.strategy == sname) done[r.sample_id] = std::move(r);
      }
      std::vector<RunRecord> records(prompts.size());
      std::vector<std::size_t> pending;
      for (std::size_t i = 0; i < prompts.size(); ++i) {
        const auto digest = prompt_digest(prompts[i].text, backend.model_id, backend.temperature);
        auto it = done.find(subjects[i]->id);
        if (it != done.end() && it->second.prompt_digest == digest && !it->second.error_note) {
          records[i] = std::move(it->second);
          ++summary.resumed;
        } else {
          pending.push_back(i);
        }
      }
      {
        // Rewrite the partial file with only the kept records so it never
        // accumulates duplicates across restarts.
        std::vector<RunRecord> kept;
        for (std::size_t i = 0; i < prompts.size(); ++i)
          if (!records[i].sample_id.empty()) kept.push_back(records[i]);
        write_records(partial_path, kept);
      }

      std::ofstream partial(partial_path, std::ios::binary | std::ios::app);
      std::mutex partial_mutex;
      std::atomic<std::size_t> next{0};
      std::atomic<std::size_t> failures{0};
      std::exception_ptr first_error;
      std::mutex error_mutex;

      auto worker = [&] {
        for (;;) {
          const std::size_t j = next.fetch_add(1);
          if (j >= pending.size()) return;
          const std::size_t i = pending[j];
          const Sample& s = *subjects[i];
          RunRecord r;
          r.sample_id = s.id;
          r.strategy = sname;
          r.model_id = backend.model_id;
          r.prompt_digest = prompt_digest(prompts[i].text, backend.model_id, backend.temperature);
          r.gold_label = s.gold_label;
          r.text = s.text;
          try {
            r.raw_response = gateway.complete(prompts[i], backend);
            auto parsed = parse_response(r.raw_response, schema, strategy);
            r.parsed_label = parsed.label;
            r.enclosure_text = parsed.enclosure_text;
            r.enclosure_items = parsed.enclosure_items;
            r.malformed_enclosure = parsed.malformed_enclosure;
          } catch (const BackendError& e) {
            r.parsed_label = std::string(kUnparsed);
            r.error_note = e.what();
            failures.fetch_add(1);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next.store(pending.size());
            return;
          }
          if (!r.error_note) {
            std::lock_guard lock(partial_mutex);
            partial << to_json_line(to_json(r)) << '\n';
            partial.flush();
          }
          records[i] = std::move(r);
        }
      };
      const std::size_t n_threads =
          std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), std::max<std::size_t>(pending.size(), 1));
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      partial.close();
      if (first_error) std::rethrow_exception(first_error);

      std::sort(records.begin(), records.end(),
                [](const RunRecord& a, const RunRecord& b) { return a.sample_id < b.sample_id; });
      if (strategy.explanation_mode == AugmentMode::kOutput) {
        score_explanations(records, by_id, config.dataset.name, *embedding, config.parallelism);
      }
      write_records(final_path, records);
      fs::remove(partial_path);

      rows.push_back({sname, write_cell_reports(dir, backend.model_id, strategy, config.dataset.name, records)});
      summary.records += records.size();
      summary.backend_failures += failures.load();
      if (log) {
        *log << backend.model_id << " / " << sname << ": " << records.size() << " records, acc "
             << fmt(rows.back().report.accuracy, 4) << ", " << failures.load() << " failures\n";
      }
    }
    write_summary(dir, backend.model_id, config.dataset.name, rows);
  }
  summary.stats = gateway.stats();
  if (log) {
    *log << "backend calls " << summary.stats.backend_calls << ", cache hits " << summary.stats.cache_hits
         << ", retries " << summary.stats.retries << '\n';
  }
  return summary;
}

EvalReport evaluate_records(const std::vector<RunRecord>& records, DatasetName dataset,
                            const StrategyFlags& strategy) {
  std::vector<std::string> preds, golds;
  double sum = 0.0;
  std::size_t scored = 0;
  for (const auto& r : records) {
    preds.push_back(r.parsed_label);
    golds.push_back(r.gold_label);
    if (r.explanation_score) {
      sum += *r.explanation_score;
      ++scored;
    }
  }
  EvalReport rep = classification_report(preds, golds, effective_labels(schema_for(dataset), strategy));
  if (scored > 0) rep.mean_explanation_score = sum / static_cast<double>(scored);
  return rep;
}

json to_json(const EvalReport& r) {
  json per_label = json::object();
  for (const auto& [label, s] : r.per_label) {
    per_label[label] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"support", s.support}};
  }
  json j = {{"accuracy", r.accuracy},
            {"macro_precision", r.macro_precision},
            {"macro_recall", r.macro_recall},
            {"macro_f1", r.macro_f1},
            {"mean_explanation_score", nullptr},
            {"n_samples", r.n_samples},
            {"n_unparsed", r.n_unparsed},
            {"per_label", per_label}};
  if (r.mean_explanation_score) j["mean_explanation_score"] = *r.mean_explanation_score;
  return j;
}

EvalReport eval_report_from_json(const json& j) {
  EvalReport r;
  r.accuracy = j.at("accuracy").get<double>();
  r.macro_precision = j.at("macro_precision").get<double>();
  r.macro_recall = j.at("macro_recall").get<double>();
  r.macro_f1 = j.at("macro_f1").get<double>();
  if (!j.at("mean_explanation_score").is_null()) r.mean_explanation_score = j["mean_explanation_score"].get<double>();
  r.n_samples = j.at("n_samples").get<std::size_t>();
  r.n_unparsed = j.at("n_unparsed").get<std::size_t>();
  for (const auto& [label, s] : j.at("per_label").items()) {
    r.per_label[label] = {s.at("precision").get<double>(), s.at("recall").get<double>(), s.at("f1").get<double>(),
                          s.at("support").get<std::size_t>()};
  }
  return r;
}

void report(const fs::path& run_dir) {
  const json cfg = read_json(run_dir / "run.json");
  const auto dataset = parse_dataset_name(cfg.at("dataset").at("name").get<std::string>());
  for (const auto& m : cfg.at("models")) {
    const auto model_id = m.at("model_id").get<std::string>();
    std::vector<SummaryRow> rows;
    for (const auto& sn : cfg.at("strategies")) {
      const auto strategy = parse_strategy(sn.get<std::string>());
      const auto path = records_path(run_dir, model_id, sn.get<std::string>());
      if (!fs::exists(path)) continue;
      auto records = read_records(path);
      rows.push_back({sn.get<std::string>(), write_cell_reports(run_dir, model_id, strategy, dataset, records)});
    }
    if (!rows.empty()) write_summary(run_dir, model_id, dataset, rows);
  }
}

CompareReport compare(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b) {
  std::map<std::string, const RunRecord*> ma, mb;
  for (const auto& r : a) ma[r.sample_id] = &r;
  for (const auto& r : b) mb[r.sample_id] = &r;
  std::vector<std::string> only_a, only_b;
  for (const auto& [id, _] : ma)
    if (!mb.count(id)) only_a.push_back(id);
  for (const auto& [id, _] : mb)
    if (!ma.count(id)) only_b.push_back(id);
  if (!only_a.empty() || !only_b.empty()) {
    std::ostringstream msg;
    msg << "runs cover different samples; only in a: [" << text::join(only_a, ", ") << "]; only in b: ["
        << text::join(only_b, ", ") << "]";
    throw DataError(msg.str());
  }
  if (ma.empty()) throw DataError("no records to compare");

  std::vector<double> xa, xb;
  for (const auto& [id, ra] : ma) {
    xa.push_back(ra->parsed_label == ra->gold_label ? 1.0 : 0.0);
    const auto* rb = mb.at(id);
    xb.push_back(rb->parsed_label == rb->gold_label ? 1.0 : 0.0);
  }
  CompareReport out;
  out.test = mann_whitney_u(xa, xb);
  out.n = xa.size();
  for (std::size_t i = 0; i < xa.size(); ++i) {
    out.accuracy_a += xa[i];
    out.accuracy_b += xb[i];
  }
  out.accuracy_a /= static_cast<double>(out.n);
  out.accuracy_b /= static_cast<double>(out.n);
  return out;
}

json to_json(const CompareReport& r) {
  return {{"u", r.test.u},
          {"p", r.test.p},
          {"method", r.test.method == MannWhitneyMethod::kExact ? "exact" : "normal"},
          {"n", r.n},
          {"accuracy_a", r.accuracy_a},
          {"accuracy_b", r.accuracy_b}};
}

TypologyResult typology(const TypologyRequest& req) {
  if (req.run_dirs.empty()) throw DataError("typology needs at least one run directory");
  const auto strategy = parse_strategy(req.strategy);
  if (strategy.explanation_mode != AugmentMode::kOutput) {
    throw DataError("typology needs an explanation-at-output strategy, got " + req.strategy);
  }

  std::optional<DatasetName> dataset;
  std::map<std::string, std::vector<RunRecord>> per_model;
  for (const auto& dir : req.run_dirs) {
    const json cfg = read_json(dir / "run.json");
    const auto name = parse_dataset_name(cfg.at("dataset").at("name").get<std::string>());
    if (dataset && *dataset != name) throw DataError("run directories mix datasets");
    dataset = name;
    for (const auto& m : cfg.at("models")) {
      const auto id = m.at("model_id").get<std::string>();
      if (!req.models.empty() && std::find(req.models.begin(), req.models.end(), id) == req.models.end()) continue;
      const auto path = records_path(dir, id, req.strategy);
      if (!fs::exists(path)) continue;
      if (per_model.count(id)) throw DataError("model " + id + " appears in more than one run directory");
      per_model[id] = read_records(path);
    }
  }
  for (const auto& m : req.models) {
    if (!per_model.count(m)) throw DataError("no " + req.strategy + " records for model " + m);
  }

  auto common = common_errors(per_model, default_direction(*dataset), req.limit);
  if (common.cases.size() < req.lda.k) {
    throw DataError("only " + std::to_string(common.cases.size()) + " common error cases, need at least " +
                    std::to_string(req.lda.k));
  }
  TypologyResult out;
  out.qualifying = common.qualifying;
  out.typology = induce_typology(std::move(common.cases), req.lda, req.top_n);
  out.worksheet = req.out.empty() ? req.run_dirs.front() / "typology.txt" : req.out;
  write_file(out.worksheet, typology_worksheet(out.typology, *dataset));
  return out;
}

}  // namespace hateprobe
