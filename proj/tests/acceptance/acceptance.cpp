// Acceptance checks. One line per criterion; exit status is the number of
// failures. Nothing here touches the network.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corpora.hpp"
#include "hateprobe/error.hpp"
#include "hateprobe/error_analysis.hpp"
#include "hateprobe/lda.hpp"
#include "hateprobe/metrics.hpp"
#include "hateprobe/parser.hpp"
#include "hateprobe/prompt.hpp"
#include "hateprobe/runner.hpp"
#include "hateprobe/significance.hpp"
#include "hateprobe/text.hpp"
#include "oracle.hpp"
#include "prompt_checks.hpp"

using namespace hateprobe;
namespace fs = std::filesystem;
using testing_support::TempDir;

namespace {

// Pinned tolerances.
constexpr double kBleuTolerance = 1e-9;
constexpr double kBertTolerance = 1e-9;
constexpr double kMannWhitneyTolerance = 0.02;
constexpr double kAccuracyTolerance = 1e-9;
constexpr double kRowSumTolerance = 1e-9;

// Collects the first few failure messages of a criterion.
struct Check {
  std::vector<std::string> failures;
  std::size_t total = 0;

  void expect(bool ok, const std::string& what) {
    ++total;
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
  template <class A, class B>
  void equal(const A& a, const B& b, const std::string& what) {
    std::ostringstream msg;
    msg << what << ": got " << a << ", want " << b;
    expect(a == b, msg.str());
  }
};

int failed_criteria = 0;

void criterion(int id, const std::string& name, double limit_ms, const std::function<void(Check&)>& body) {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.failures.push_back(std::string("threw: ") + e.what());
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (ms > limit_ms) {
    std::ostringstream msg;
    msg << "took " << ms << " ms, limit " << limit_ms << " ms";
    check.failures.push_back(msg.str());
  }
  const bool pass = check.failures.empty();
  if (!pass) ++failed_criteria;
  std::printf("[%s] %d %s (%zu checks, %.0f ms, limit %.0f ms)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              check.total, ms, limit_ms);
  for (const auto& f : check.failures) std::printf("       %s\n", f.c_str());
  std::fflush(stdout);
}

std::map<std::string, std::size_t> tally(const std::vector<Sample>& samples) {
  std::map<std::string, std::size_t> out;
  for (const auto& s : samples) ++out[s.gold_label];
  return out;
}

// ---------------------------------------------------------------- 1

void dataset_fidelity(Check& c) {
  TempDir dir;
  testing_support::write_hatexplain_release(dir / "hatexplain", {{"hate speech", 594}, {"normal", 782}, {"offensive", 548}},
                                            400);
  auto hx = load_hatexplain(dir / "hatexplain");
  c.equal(hx.samples.size(), std::size_t{1924}, "hatexplain test split size");
  auto hc = tally(hx.samples);
  c.equal(hc["hate speech"], std::size_t{594}, "hatexplain hate speech");
  c.equal(hc["normal"], std::size_t{782}, "hatexplain normal");
  c.equal(hc["offensive"], std::size_t{548}, "hatexplain offensive");
  c.equal(hx.errors.size(), std::size_t{0}, "hatexplain record errors");

  if (const char* real = std::getenv("HATEPROBE_HATEXPLAIN_DIR"); real && *real) {
    auto official = load_hatexplain(real);
    auto oc = tally(official.samples);
    c.equal(official.samples.size(), std::size_t{1924}, "official hatexplain test split size");
    c.equal(oc["hate speech"], std::size_t{594}, "official hate speech");
    c.equal(oc["normal"], std::size_t{782}, "official normal");
    c.equal(oc["offensive"], std::size_t{548}, "official offensive");
  }

  testing_support::write_implicit_corpus(dir / "implicit_hate.tsv",
                                         {{"explicit_hate", 1089}, {"implicit_hate", 7100}, {"not_hate", 13291}});
  const SplitSpec ih_split{{{"explicit_hate", 108}, {"implicit_hate", 710}, {"not_hate", 1329}}, 2023};
  auto ih = load_implicit_hate(dir / "implicit_hate.tsv", ih_split);
  c.equal(ih.samples.size(), std::size_t{2147}, "implicit_hate sample count");
  auto ic = tally(ih.samples);
  c.equal(ic["explicit_hate"], std::size_t{108}, "explicit_hate");
  c.equal(ic["implicit_hate"], std::size_t{710}, "implicit_hate");
  c.equal(ic["not_hate"], std::size_t{1329}, "not_hate");
  c.expect(load_implicit_hate(dir / "implicit_hate.tsv", ih_split).samples == ih.samples,
           "implicit_hate selection is deterministic under the seed");

  testing_support::write_toxicspans_corpora(dir / "toxic.csv", dir / "nontoxic.csv", 1300, 1500);
  auto ts = load_toxicspans(dir / "toxic.csv", dir / "nontoxic.csv", SplitSpec{{{"toxic", 1000}, {"non_toxic", 1000}}, 7});
  c.equal(ts.samples.size(), std::size_t{2000}, "toxicspans sample count");
  auto tc = tally(ts.samples);
  c.equal(tc["toxic"], std::size_t{1000}, "toxic");
  c.equal(tc["non_toxic"], std::size_t{1000}, "non_toxic");
  for (const auto& s : ts.samples) {
    if (s.gold_label == "toxic") c.expect(s.span_chars && !s.span_chars->empty(), "toxic sample without spans: " + s.id);
  }
}

// ---------------------------------------------------------------- 2

void golden_suite(Check& c) {
  const fs::path root = fs::path(HATEPROBE_FIXTURES) / "golden";
  for (auto d : {DatasetName::kHateXplain, DatasetName::kImplicitHate, DatasetName::kToxicSpans}) {
    const auto& schema = schema_for(d);
    const auto sample = canonical_probe_sample(d);
    for (const auto& s : all_strategies()) {
      const std::string cell = std::string(to_string(d)) + "/" + std::string(strategy_name(s));
      const auto base = root / std::string(to_string(d)) / std::string(strategy_name(s));
      if (is_valid_for(s, schema)) {
        auto p = render(sample, s, schema);
        c.expect(p.text + "\n" == testing_support::read_text(base.string() + ".txt"), cell + " differs from fixture");
        const auto why = testing_support::prompt_violation(p, sample);
        c.expect(why.empty(), cell + ": " + why);
      } else {
        try {
          render(sample, s, schema);
          c.expect(false, cell + " rendered but should be rejected");
        } catch (const StrategyError& e) {
          c.expect(std::string(e.what()) + "\n" == testing_support::read_text(base.string() + ".err"),
                   cell + " rejection message differs from fixture");
        }
      }
    }
  }
}

// ---------------------------------------------------------------- 3

void parser_round_trip(Check& c) {
  const std::vector<std::string> vocab = {"go",     "back",   "vermin", "idiot",  "hate",  "normal", "toxic",
                                          "trash",  "they",   "ruin",   "it's",   "#maga", "@user", "über",
                                          "not_hate", "offensive", "kill", "scum", "rats",  "1488"};
  const DatasetSchema* schemas[] = {&schema_for(DatasetName::kHateXplain), &schema_for(DatasetName::kImplicitHate),
                                    &schema_for(DatasetName::kToxicSpans)};
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const auto& schema = *schemas[i % 3];
    const std::string label = schema.labels[rng() % schema.labels.size()];
    std::vector<std::string> words(1 + rng() % 5);
    for (auto& w : words) {
      w = vocab[rng() % vocab.size()];
      if (rng() % 4 == 0) w += " " + vocab[rng() % vocab.size()];  // multi-word span
    }
    const bool compact = i % 2 == 1;
    const std::string casing = i % 5 == 0 ? text::to_lower(label) : label;
    std::string raw = casing + (i % 7 == 0 ? "\n" : " ") + format_enclosure(words, compact);
    if (i % 11 == 0) raw = "Answer: " + raw;
    const StrategyFlags strategy = parse_strategy(i % 2 ? "exp_out" : "tar_out");
    const auto parsed = parse_response(raw, schema, strategy.explanation_mode == AugmentMode::kOutput &&
                                                            schema.name == DatasetName::kImplicitHate
                                                        ? parse_strategy("tar_out")
                                                        : strategy);
    c.expect(parsed.label == label, "label lost in: " + raw);
    c.expect(parsed.enclosure_items && *parsed.enclosure_items == words, "word list lost in: " + raw);
    c.expect(!parsed.malformed_enclosure, "flagged malformed: " + raw);
  }
  const auto& ih = schema_for(DatasetName::kImplicitHate);
  for (const char* raw : {"not_hate", "NOT_HATE", "not_hate <<<\"x\">>>", "Not_hate < < < \"implicit_hate\"> > >",
                          "label: not_hate."}) {
    c.equal(parse_label(std::string(raw).substr(0, std::string(raw).find('<')), ih), std::string("not_hate"),
            std::string("label of '") + raw + "'");
    c.equal(parse_response(raw, ih).label, std::string("not_hate"), std::string("response '") + raw + "'");
  }
  c.equal(parse_label("implicit_hate", ih), std::string("implicit_hate"), "implicit_hate itself");
}

// ---------------------------------------------------------------- 4

double bleu_direct(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  if (cand.empty()) return 0.0;
  double log_p = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::map<std::vector<std::string>, int> cc, rc;
    for (std::size_t i = 0; i + n <= cand.size(); ++i) ++cc[{cand.begin() + i, cand.begin() + i + n}];
    for (std::size_t i = 0; i + n <= ref.size(); ++i) ++rc[{ref.begin() + i, ref.begin() + i + n}];
    double clipped = 0, total = 0;
    for (const auto& [g, k] : cc) {
      total += k;
      auto it = rc.find(g);
      if (it != rc.end()) clipped += std::min(k, it->second);
    }
    total = std::max(total, 1.0);
    log_p += std::log((clipped > 0 ? clipped : 0.1) / total) / 4.0;
  }
  const double cl = double(cand.size()), rl = double(ref.size());
  return (cl > rl ? 1.0 : std::exp(1.0 - rl / cl)) * std::exp(log_p);
}

void metric_oracles(Check& c) {
  // Exhaustive classification reports: every label set of size 1..3, every
  // sample count 1..6, every gold/prediction assignment.
  const std::vector<std::string> pool = {"a", "b", "c"};
  std::size_t enumerated = 0;
  for (std::size_t k = 1; k <= 3; ++k) {
    const std::vector<std::string> labels(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    const std::size_t outcomes = k + 1;  // labels + unparsed
    for (std::size_t n = 1; n <= 6; ++n) {
      std::size_t combos = 1;
      for (std::size_t i = 0; i < n; ++i) combos *= k * outcomes;
      std::vector<std::string> golds(n), preds(n);
      for (std::size_t code = 0; code < combos; ++code) {
        std::size_t x = code;
        std::vector<std::size_t> gi(n), pi(n);
        for (std::size_t i = 0; i < n; ++i) {
          gi[i] = x % k;
          x /= k;
          pi[i] = x % outcomes;
          x /= outcomes;
          golds[i] = labels[gi[i]];
          preds[i] = pi[i] == k ? std::string("unparsed") : labels[pi[i]];
        }
        const auto rep = classification_report(preds, golds, labels);
        // Direct tally from the index vectors.
        std::size_t tp[3] = {}, fp[3] = {}, fn[3] = {}, correct = 0, unparsed = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (pi[i] == gi[i]) {
            ++tp[gi[i]];
            ++correct;
          } else {
            ++fn[gi[i]];
            if (pi[i] < k) ++fp[pi[i]];
          }
          unparsed += pi[i] == k;
        }
        double mp = 0, mr = 0, mf = 0;
        bool ok = rep.n_samples == n && rep.n_unparsed == unparsed &&
                  std::abs(rep.accuracy - double(correct) / double(n)) < 1e-12;
        for (std::size_t l = 0; l < k; ++l) {
          const double p = tp[l] + fp[l] ? double(tp[l]) / double(tp[l] + fp[l]) : 0.0;
          const double r = tp[l] + fn[l] ? double(tp[l]) / double(tp[l] + fn[l]) : 0.0;
          const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
          const auto& got = rep.per_label.at(labels[l]);
          ok = ok && std::abs(got.precision - p) < 1e-12 && std::abs(got.recall - r) < 1e-12 &&
               std::abs(got.f1 - f) < 1e-12 && got.support == tp[l] + fn[l];
          mp += p / double(k);
          mr += r / double(k);
          mf += f / double(k);
        }
        ok = ok && std::abs(rep.macro_precision - mp) < 1e-12 && std::abs(rep.macro_recall - mr) < 1e-12 &&
             std::abs(rep.macro_f1 - mf) < 1e-12;
        if (!ok) {
          c.expect(false, "classification_report disagrees at k=" + std::to_string(k) + " n=" + std::to_string(n) +
                              " code=" + std::to_string(code));
        }
        ++enumerated;
      }
    }
  }
  c.expect(enumerated > 3000000, "enumeration incomplete");

  std::mt19937_64 rng(2024);
  auto short_tokens = [&](std::size_t lo) {
    std::vector<std::string> t(lo + rng() % 8);
    for (auto& w : t) w = "w" + std::to_string(rng() % 5);
    return t;
  };
  for (int i = 0; i < 200; ++i) {
    auto cand = short_tokens(0), ref = short_tokens(1);
    const double got = sentence_bleu(cand, ref), want = bleu_direct(cand, ref);
    c.expect(std::abs(got - want) <= kBleuTolerance, "bleu pair " + std::to_string(i));
  }

  HashEmbeddingProvider provider(128, 77);
  for (int i = 0; i < 200; ++i) {
    auto cand = short_tokens(1), ref = short_tokens(1);
    double p = 0, r = 0;
    for (const auto& a : cand) {
      double best = -1;
      for (const auto& b : ref) best = std::max(best, cosine(provider.vector_for(a), provider.vector_for(b)));
      p += best;
    }
    for (const auto& b : ref) {
      double best = -1;
      for (const auto& a : cand) best = std::max(best, cosine(provider.vector_for(a), provider.vector_for(b)));
      r += best;
    }
    p /= double(cand.size());
    r /= double(ref.size());
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    const auto got = bertscore_tokens(cand, ref, provider);
    c.expect(std::abs(got.precision - p) <= kBertTolerance && std::abs(got.recall - r) <= kBertTolerance &&
                 std::abs(got.f1 - f) <= kBertTolerance,
             "bertscore pair " + std::to_string(i));
  }

  // Mann-Whitney: every split of n <= 12 distinct values, and every split of
  // binary (correct / incorrect) vectors, against full permutation
  // enumeration.
  double worst = 0.0;
  for (std::size_t n = 2; n <= 12; ++n) {
    for (std::size_t nx = 1; nx < n; ++nx) {
      const std::size_t ny = n - nx;
      auto oracle = [&](const std::vector<double>& pooled, std::uint32_t observed_mask) {
        auto u_of = [&](std::uint32_t mask) {
          double u = 0;
          for (std::size_t i = 0; i < n; ++i) {
            if (!((mask >> i) & 1u)) continue;
            for (std::size_t j = 0; j < n; ++j) {
              if ((mask >> j) & 1u) continue;
              u += pooled[i] > pooled[j] ? 1.0 : (pooled[i] == pooled[j] ? 0.5 : 0.0);
            }
          }
          return u;
        };
        const double centre = double(nx) * double(ny) / 2;
        const double d = std::abs(u_of(observed_mask) - centre);
        std::size_t hit = 0, total = 0;
        for (std::uint32_t m = 0; m < (1u << n); ++m) {
          if (static_cast<std::size_t>(__builtin_popcount(m)) != nx) continue;
          ++total;
          hit += std::abs(u_of(m) - centre) >= d - 1e-9;
        }
        return double(hit) / double(total);
      };
      auto run_case = [&](const std::vector<double>& pooled, std::uint32_t mask) {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? xs : ys).push_back(pooled[i]);
        const double got = mann_whitney_u(xs, ys).p, want = oracle(pooled, mask);
        worst = std::max(worst, std::abs(got - want));
        c.expect(std::abs(got - want) <= kMannWhitneyTolerance,
                 "mann_whitney nx=" + std::to_string(nx) + " ny=" + std::to_string(ny));
      };
      // Distinct values: only the rank pattern matters, so one pooled vector
      // and every subset cover all splits.
      std::vector<double> ranks(n);
      for (std::size_t i = 0; i < n; ++i) ranks[i] = double(i);
      for (std::uint32_t m = 0; m < (1u << n); ++m) {
        if (static_cast<std::size_t>(__builtin_popcount(m)) == nx) run_case(ranks, m);
      }
      // Binary vectors: kx ones among xs and ky among ys.
      for (std::size_t kx = 0; kx <= nx; ++kx) {
        for (std::size_t ky = 0; ky <= ny; ++ky) {
          std::vector<double> pooled;
          std::uint32_t mask = 0;
          for (std::size_t i = 0; i < nx; ++i) {
            pooled.push_back(i < kx ? 1.0 : 0.0);
            mask |= 1u << i;
          }
          for (std::size_t i = 0; i < ny; ++i) pooled.push_back(i < ky ? 1.0 : 0.0);
          run_case(pooled, mask);
        }
      }
    }
  }
  std::printf("       mann_whitney worst |p - permutation p| = %.3g\n", worst);
}

// ---------------------------------------------------------------- 5

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    const auto rel = fs::relative(e.path(), dir).string();
    if (e.is_regular_file() && rel != "run.json") files[rel] = testing_support::read_text(e.path());
  }
  return files;
}

void end_to_end(Check& c) {
  TempDir dir;
  RunConfig oracle_cfg;
  oracle_cfg.dataset.name = DatasetName::kHateXplain;
  oracle_cfg.dataset.path = fs::path(HATEPROBE_FIXTURES) / "hatexplain_30";
  oracle_cfg.strategies = {parse_strategy("vanilla"), parse_strategy("defn"), parse_strategy("defn_exp_out")};
  oracle_cfg.backends = {testing_support::mock_config("oracle")};
  oracle_cfg.output_dir = dir / "oracle";
  const auto samples = load_samples(oracle_cfg).samples;
  c.equal(samples.size(), std::size_t{30}, "fixture size");
  RunHooks oh;
  oh.backends["oracle"] = std::make_shared<testing_support::OracleBackend>(samples);
  run(oracle_cfg, oh);
  for (const auto& s : oracle_cfg.strategies) {
    const std::string name(strategy_name(s));
    const auto rep = eval_report_from_json(nlohmann::json::parse(
        testing_support::read_text(dir / "oracle" / "reports" / "oracle" / (name + ".json"))));
    c.expect(rep.accuracy == 1.0 && rep.macro_precision == 1.0 && rep.macro_recall == 1.0 && rep.macro_f1 == 1.0,
             name + ": oracle metrics are not all 1.0");
    std::vector<std::string> preds, golds;
    for (const auto& r : read_records(records_path(dir / "oracle", "oracle", name))) {
      preds.push_back(r.parsed_label);
      golds.push_back(r.gold_label);
    }
    const auto cm = confusion(preds, golds, schema_for(DatasetName::kHateXplain));
    bool diagonal = cm.total() == 30;
    for (std::size_t g = 0; g < cm.counts.size(); ++g)
      for (std::size_t p = 0; p < cm.counts[g].size(); ++p) diagonal = diagonal && (g == p || cm.counts[g][p] == 0);
    c.expect(diagonal, name + ": confusion matrix is not diagonal");
  }

  // Always-"normal" on the full split, then a warm-cache rerun.
  testing_support::write_hatexplain_release(dir / "hatexplain", {{"hate speech", 594}, {"normal", 782}, {"offensive", 548}},
                                            100);
  RunConfig cfg;
  cfg.dataset.name = DatasetName::kHateXplain;
  cfg.dataset.path = dir / "hatexplain";
  cfg.strategies = {parse_strategy("vanilla")};
  auto normal = testing_support::mock_config("always-normal");
  normal.mock_default = "normal";
  cfg.backends = {normal};
  cfg.cache_path = dir / "cache.jsonl";
  cfg.output_dir = dir / "cold";
  const auto cold = run(cfg);
  const auto rep = eval_report_from_json(
      nlohmann::json::parse(testing_support::read_text(dir / "cold" / "reports" / "always-normal" / "vanilla.json")));
  c.equal(rep.n_samples, std::size_t{1924}, "always-normal sample count");
  c.expect(std::abs(rep.accuracy - 782.0 / 1924.0) <= kAccuracyTolerance, "always-normal accuracy != 782/1924");
  c.equal(cold.stats.backend_calls, std::size_t{1924}, "cold run backend calls");

  cfg.output_dir = dir / "warm";
  const auto warm = run(cfg);
  c.equal(warm.stats.backend_calls, std::size_t{0}, "warm run backend calls");
  c.expect(snapshot(dir / "cold") == snapshot(dir / "warm"), "warm rerun is not byte-identical");
}

// ---------------------------------------------------------------- 6

void typology_pipeline(Check& c) {
  const std::vector<std::vector<std::string>> groups = {
      {"antifa", "protest", "riot", "police", "street", "violence", "mob", "looting"},
      {"vaccine", "doctor", "hospital", "virus", "health", "medicine", "nurse", "clinic"},
      {"football", "match", "goal", "league", "striker", "stadium", "referee", "season"}};
  auto group_of = [&](const std::string& w) {
    for (std::size_t g = 0; g < groups.size(); ++g)
      if (std::find(groups[g].begin(), groups[g].end(), w) != groups[g].end()) return int(g);
    return -1;
  };

  int pure_runs = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed + 100);
    // Three mock models; every group post is a normal->offensive error for all
    // of them, distractors are errors for only two.
    std::map<std::string, std::vector<RunRecord>> per_model;
    std::set<std::string> expected_ids;
    int serial = 0;
    auto add = [&](const std::string& text, bool all_wrong) {
      const std::string id = "e" + std::to_string(1000 + serial++);
      if (all_wrong) expected_ids.insert(id);
      int m = 0;
      for (const char* model : {"m1", "m2", "m3"}) {
        RunRecord r;
        r.sample_id = id;
        r.model_id = model;
        r.strategy = "defn_exp_out";
        r.gold_label = "normal";
        r.parsed_label = all_wrong || m++ < 2 ? "offensive" : "normal";
        r.explanation_score = double(rng() % 1000) / 1000.0;
        r.text = text;
        per_model[model].push_back(r);
      }
    };
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (int d = 0; d < 20; ++d) {
        std::string text;
        for (int w = 0; w < 10; ++w) text += groups[g][rng() % groups[g].size()] + " ";
        add(text, true);
      }
    }
    for (int d = 0; d < 10; ++d) add("distractor words everywhere tonight", false);

    const auto common = common_errors(per_model, default_direction(DatasetName::kHateXplain), 80);
    std::set<std::string> got_ids;
    for (const auto& e : common.cases) got_ids.insert(e.sample_id);
    c.expect(got_ids == expected_ids, "common_errors selected the wrong cases (seed " + std::to_string(seed) + ")");

    std::vector<std::vector<std::string>> docs;
    for (const auto& e : common.cases) docs.push_back(preprocess_text(e.text));
    LdaOptions options;
    options.k = 3;
    options.seed = seed;
    bool consistent = true;
    const auto model = lda_fit(docs, options, [&](const GibbsSnapshot& s) {
      std::size_t by_topic = 0, by_doc = 0, by_word = 0;
      for (auto t : s.topic_totals) by_topic += t;
      for (const auto& row : s.doc_topic_counts)
        for (auto v : row) by_doc += v;
      for (const auto& row : s.topic_word_counts)
        for (auto v : row) by_word += v;
      consistent = consistent && by_topic == s.total_tokens && by_doc == s.total_tokens && by_word == s.total_tokens;
    });
    c.expect(consistent, "Gibbs counts inconsistent (seed " + std::to_string(seed) + ")");
    for (const auto& rows : {model.topic_word, model.doc_topic}) {
      for (const auto& row : rows) {
        double sum = 0;
        for (double p : row) sum += p;
        c.expect(std::abs(sum - 1.0) <= kRowSumTolerance, "probability row does not sum to 1");
      }
    }
    std::set<int> seen;
    for (std::size_t t = 0; t < 3; ++t) seen.insert(group_of(top_words(model, t, 1).front()));
    pure_runs += seen.size() == 3 && !seen.count(-1);

    const auto typology = induce_typology(common.cases, options);
    c.expect(typology.model.topic_word == model.topic_word, "induce_typology differs from lda_fit");
  }
  std::printf("       distinct top-word groups in %d of 10 seeds\n", pure_runs);
  c.expect(pure_runs >= 9, "top words separated groups in only " + std::to_string(pure_runs) + " of 10 seeds");
}

// ---------------------------------------------------------------- 7

void strategy_filtering(Check& c) {
  TempDir dir;
  testing_support::write_implicit_corpus(dir / "ih.tsv", {{"explicit_hate", 200}, {"implicit_hate", 300}, {"not_hate", 300}});
  RunConfig cfg;
  cfg.dataset.name = DatasetName::kImplicitHate;
  cfg.dataset.path = dir / "ih.tsv";
  cfg.split = {{{"explicit_hate", 40}, {"implicit_hate", 50}, {"not_hate", 60}}, 5};
  cfg.strategies = {parse_strategy("tar_in"), parse_strategy("defn_tar_in")};
  cfg.backends = {testing_support::mock_config("oracle")};
  cfg.output_dir = dir / "run";
  const auto samples = load_samples(cfg).samples;
  RunHooks hooks;
  hooks.backends["oracle"] = std::make_shared<testing_support::OracleBackend>(samples);
  run(cfg, hooks);
  for (const char* st : {"tar_in", "defn_tar_in"}) {
    const auto records = read_records(records_path(dir / "run", "oracle", st));
    std::size_t explicit_count = 0;
    for (const auto& r : records) explicit_count += r.gold_label == "explicit_hate";
    c.equal(explicit_count, std::size_t{0}, std::string(st) + " explicit_hate records");
    c.equal(records.size(), std::size_t{110}, std::string(st) + " record count");
  }

  RunConfig ts;
  ts.dataset.name = DatasetName::kToxicSpans;
  ts.dataset.path = dir / "toxic.csv";  // never read
  ts.dataset.nontoxic_path = dir / "nontoxic.csv";
  ts.backends = {testing_support::mock_config("m")};
  ts.output_dir = dir / "ts-run";
  for (const char* st : {"tar_in", "tar_out", "defn_tar_in", "defn_tar_out"}) {
    ts.strategies = {parse_strategy("vanilla"), parse_strategy(st)};
    bool rejected = false;
    try {
      validate(ts);
    } catch (const StrategyError&) {
      rejected = true;
    }
    c.expect(rejected, std::string("toxicspans ") + st + " passed validation");
    auto probe = mock_backend({}, "toxic");
    RunHooks h;
    h.backends["m"] = probe;
    try {
      run(ts, h);
      c.expect(false, std::string("toxicspans ") + st + " ran");
    } catch (const StrategyError&) {
    }
    c.equal(probe->calls(), std::size_t{0}, std::string("backend calls for toxicspans ") + st);
    c.expect(!fs::exists(dir / "ts-run"), "rejected run created an output directory");
  }
}

}  // namespace

int main() {
  criterion(1, "dataset fidelity", 30000, dataset_fidelity);
  criterion(2, "template golden suite", 1000, golden_suite);
  criterion(3, "parser round trip", 5000, parser_round_trip);
  criterion(4, "metric oracles", 60000, metric_oracles);
  criterion(5, "end-to-end determinism", 60000, end_to_end);
  criterion(6, "typology pipeline", 120000, typology_pipeline);
  criterion(7, "strategy filtering", 5000, strategy_filtering);
  return failed_criteria;
}
