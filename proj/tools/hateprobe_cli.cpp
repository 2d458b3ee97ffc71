#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hateprobe/config.hpp"
#include "hateprobe/error.hpp"
#include "hateprobe/prompt.hpp"
#include "hateprobe/records.hpp"
#include "hateprobe/runner.hpp"

namespace fs = std::filesystem;
using namespace hateprobe;

namespace {

// "kind:model_id[@base_url]", e.g. "chat:gpt-3.5-turbo@https://api.openai.com".
BackendConfig backend_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw DataError("model '" + spec + "' is neither in the config nor kind:model_id");
  BackendConfig b;
  b.kind = parse_backend_kind(spec.substr(0, colon));
  std::string rest = spec.substr(colon + 1);
  const auto at = rest.find('@');
  if (at != std::string::npos) {
    b.base_url = rest.substr(at + 1);
    rest = rest.substr(0, at);
  }
  b.model_id = rest;
  if (b.kind == BackendKind::kMock) b.requests_per_minute = 1e6;
  return b;
}

std::vector<RunRecord> load_side(const fs::path& p, const std::string& model, const std::string& strategy) {
  if (fs::is_directory(p)) {
    if (model.empty()) throw DataError("--model is required when comparing run directories");
    return read_records(records_path(p, model, strategy));
  }
  return read_records(p);
}

struct RunArgs {
  std::string config;
  std::string dataset;
  std::string data;
  std::string nontoxic;
  std::vector<std::string> strategies;
  std::vector<std::string> models;
  std::vector<std::string> counts;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t limit = 0;
  std::string out;
  std::string cache;
  int parallelism = 0;
};

RunConfig build_config(const RunArgs& a) {
  RunConfig c;
  if (!a.config.empty()) {
    c = load_run_config(a.config);
  } else {
    if (a.dataset.empty() || a.data.empty()) throw DataError("either --config or --dataset with --data is required");
    c.dataset.name = parse_dataset_name(a.dataset);
  }
  if (!a.dataset.empty() && parse_dataset_name(a.dataset) != c.dataset.name) {
    throw DataError("--dataset disagrees with the config file");
  }
  if (!a.data.empty()) c.dataset.path = a.data;
  if (!a.nontoxic.empty()) c.dataset.nontoxic_path = a.nontoxic;
  if (!a.strategies.empty()) {
    c.strategies.clear();
    for (const auto& s : a.strategies) c.strategies.push_back(parse_strategy(s));
  }
  if (!a.models.empty()) {
    std::vector<BackendConfig> picked;
    for (const auto& m : a.models) {
      auto it = std::find_if(c.backends.begin(), c.backends.end(), [&](const auto& b) { return b.model_id == m; });
      picked.push_back(it != c.backends.end() ? *it : backend_from_spec(m));
    }
    c.backends = std::move(picked);
  }
  for (const auto& kv : a.counts) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DataError("--count expects label=N, got " + kv);
    c.split.counts[kv.substr(0, eq)] = std::stoul(kv.substr(eq + 1));
  }
  if (a.seed_set) c.split.seed = a.seed;
  if (a.limit > 0) c.limit = a.limit;
  if (!a.out.empty()) c.output_dir = a.out;
  if (!a.cache.empty()) c.cache_path = a.cache;
  if (a.parallelism > 0) c.parallelism = a.parallelism;
  return c;
}

int render_prompts(const std::vector<std::string>& datasets, const std::vector<std::string>& strategies,
                   const std::string& out) {
  std::vector<DatasetName> names;
  if (datasets.empty() || (datasets.size() == 1 && datasets[0] == "all")) {
    names = {DatasetName::kHateXplain, DatasetName::kImplicitHate, DatasetName::kToxicSpans};
  } else {
    for (const auto& d : datasets) names.push_back(parse_dataset_name(d));
  }
  std::vector<StrategyFlags> flags;
  if (strategies.empty()) {
    flags.assign(all_strategies().begin(), all_strategies().end());
  } else {
    for (const auto& s : strategies) flags.push_back(parse_strategy(s));
  }
  for (auto d : names) {
    const auto& schema = schema_for(d);
    const Sample sample = canonical_probe_sample(d);
    for (const auto& f : flags) {
      const std::string sname(strategy_name(f));
      std::string body;
      std::string ext = ".txt";
      try {
        body = render(sample, f, schema).text + "\n";
      } catch (const StrategyError& e) {
        body = std::string(e.what()) + "\n";
        ext = ".err";
      }
      if (out.empty()) {
        std::cout << "==> " << to_string(d) << " / " << sname << (ext == ".err" ? " (rejected)" : "") << "\n"
                  << body << "\n";
      } else {
        const fs::path path = fs::path(out) / std::string(to_string(d)) / (sname + ext);
        fs::create_directories(path.parent_path());
        std::ofstream(path, std::ios::binary) << body;
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hateprobe: prompt-strategy evaluation for hate speech classifiers"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "run the strategy x model matrix");
  run_cmd->add_option("--config", ra.config, "run configuration (JSON)");
  run_cmd->add_option("--dataset", ra.dataset, "hatexplain | implicit_hate | toxicspans");
  run_cmd->add_option("--data", ra.data, "dataset file or directory");
  run_cmd->add_option("--nontoxic", ra.nontoxic, "non-toxic corpus (toxicspans)");
  run_cmd->add_option("--strategy", ra.strategies, "strategy name (repeatable)");
  run_cmd->add_option("--model", ra.models, "model id from the config, or kind:model_id[@url] (repeatable)");
  run_cmd->add_option("--count", ra.counts, "per-label sample count label=N (repeatable)");
  run_cmd->add_option("--seed", ra.seed, "sampling seed")->each([&](const std::string&) { ra.seed_set = true; });
  run_cmd->add_option("--limit", ra.limit, "use only the first N samples");
  run_cmd->add_option("--out", ra.out, "run directory");
  run_cmd->add_option("--cache", ra.cache, "completion cache file");
  run_cmd->add_option("--parallelism", ra.parallelism, "concurrent completions");

  std::vector<std::string> render_datasets, render_strategies;
  std::string render_out;
  auto* render_cmd = app.add_subcommand("render", "print prompts for the probe samples without calling a model");
  render_cmd->add_option("--dataset", render_datasets, "dataset (repeatable, default all)");
  render_cmd->add_option("--strategy", render_strategies, "strategy (repeatable, default all)");
  render_cmd->add_option("--out", render_out, "write one file per prompt under this directory");

  std::vector<std::string> cmp_paths;
  std::string cmp_model, cmp_strategy = "vanilla", cmp_out;
  auto* compare_cmd = app.add_subcommand("compare", "Mann-Whitney U test on per-sample correctness");
  compare_cmd->add_option("runs", cmp_paths, "two record files or run directories")->expected(2)->required();
  compare_cmd->add_option("--model", cmp_model, "model id inside run directories");
  compare_cmd->add_option("--strategy", cmp_strategy, "strategy inside run directories");
  compare_cmd->add_option("--out", cmp_out, "write the JSON report here");

  TypologyRequest tq;
  std::vector<std::string> ty_dirs;
  std::string ty_out, ty_dataset;
  auto* typology_cmd = app.add_subcommand("typology", "LDA typology of errors shared by all models");
  typology_cmd->add_option("runs", ty_dirs, "run directories")->required();
  typology_cmd->add_option("--dataset", ty_dataset, "expected dataset (checked against the runs)");
  typology_cmd->add_option("--model", tq.models, "model id (repeatable, default all)");
  typology_cmd->add_option("--strategy", tq.strategy, "strategy whose records are analysed");
  typology_cmd->add_option("--k", tq.lda.k, "number of topics");
  typology_cmd->add_option("--limit", tq.limit, "lowest-scored common errors kept");
  typology_cmd->add_option("--seed", tq.lda.seed, "Gibbs sampler seed");
  typology_cmd->add_option("--iterations", tq.lda.iterations, "Gibbs sweeps");
  typology_cmd->add_option("--top-words", tq.top_n, "words listed per topic");
  typology_cmd->add_option("--out", ty_out, "worksheet path");

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "recompute reports and summaries from records");
  report_cmd->add_option("run", report_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      RunHooks hooks;
      hooks.log = &std::cerr;
      auto summary = run(build_config(ra), hooks);
      std::cout << summary.directory.string() << "\n";
      return summary.backend_failures > 0 ? 3 : 0;
    }
    if (*render_cmd) return render_prompts(render_datasets, render_strategies, render_out);
    if (*compare_cmd) {
      auto a = load_side(cmp_paths[0], cmp_model, cmp_strategy);
      auto b = load_side(cmp_paths[1], cmp_model, cmp_strategy);
      const auto j = to_json(compare(a, b)).dump(2);
      if (cmp_out.empty()) {
        std::cout << j << "\n";
      } else {
        std::ofstream(cmp_out) << j << "\n";
      }
      return 0;
    }
    if (*typology_cmd) {
      for (const auto& d : ty_dirs) tq.run_dirs.emplace_back(d);
      tq.out = ty_out;
      if (!ty_dataset.empty()) {
        std::ifstream in(tq.run_dirs.front() / "run.json");
        const auto cfg = nlohmann::json::parse(in);
        if (parse_dataset_name(cfg.at("dataset").at("name").get<std::string>()) != parse_dataset_name(ty_dataset)) {
          throw DataError("runs are not on dataset " + ty_dataset);
        }
      }
      auto result = typology(tq);
      std::cerr << result.typology.cases.size() << " of " << result.qualifying << " common error cases used\n";
      std::cout << result.worksheet.string() << "\n";
      return 0;
    }
    if (*report_cmd) {
      report(report_dir);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
