#pragma once

// Builders for small corpora in the public release formats, plus a scratch
// directory helper. Shared by the unit and acceptance tests.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

namespace testing_support {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("hateprobe-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << content;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {"people", "really", "think", "today", "going",  "world",
                                                 "always", "never",  "place", "right", "school", "music",
                                                 "watch",  "family", "money", "night", "weekend", "coffee"};
  return words;
}

// HateXplain release layout: dataset.json keyed by post id with annotator
// labels ("hatespeech" spelling), rationale masks and targets, plus
// post_id_divisions.json. `test_counts` uses schema labels. Extra train
// posts (some with three-way ties) exercise the division filter.
inline void write_hatexplain_release(const fs::path& dir, const std::map<std::string, int>& test_counts,
                                     int train_posts = 50, std::uint64_t seed = 1) {
  using nlohmann::ordered_json;
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const auto& words = filler_words();

  ordered_json data = ordered_json::object();
  ordered_json divisions = {{"train", ordered_json::array()}, {"val", ordered_json::array()},
                            {"test", ordered_json::array()}};
  auto raw = [](const std::string& label) { return label == "hate speech" ? std::string("hatespeech") : label; };
  int serial = 0;
  auto make_post = [&](const std::string& majority, bool tie, const std::string& split) {
    const std::string id = std::to_string(1100000000000000000LL + serial++) + "_twitter";
    std::vector<std::string> tokens;
    const std::size_t len = 6 + pick(10);
    for (std::size_t i = 0; i < len; ++i) tokens.push_back(words[pick(words.size())]);
    tokens.push_back("<user>");

    static const std::vector<std::string> labels = {"hate speech", "normal", "offensive"};
    std::vector<std::string> votes;
    if (tie) {
      votes = labels;
    } else {
      std::string other = labels[pick(3)];
      votes = {majority, majority, pick(2) == 0 ? majority : other};
    }
    ordered_json annotators = ordered_json::array();
    for (std::size_t a = 0; a < votes.size(); ++a) {
      ordered_json targets = votes[a] == "normal" ? ordered_json::array({"None"})
                                                  : ordered_json::array({a < 2 ? "African" : "Women"});
      annotators.push_back({{"label", raw(votes[a])}, {"annotator_id", 200 + static_cast<int>(a)},
                            {"target", targets}});
    }
    ordered_json rationales = ordered_json::array();
    if (majority != "normal" && !tie) {
      for (int a = 0; a < 2; ++a) {
        ordered_json mask = ordered_json::array();
        for (std::size_t i = 0; i < tokens.size(); ++i) mask.push_back(i % 3 == static_cast<std::size_t>(a) ? 1 : 0);
        rationales.push_back(mask);
      }
    }
    data[id] = {{"post_id", id}, {"annotators", annotators}, {"rationales", rationales}, {"post_tokens", tokens}};
    divisions[split].push_back(id);
  };

  std::vector<std::string> order;
  for (const auto& [label, n] : test_counts)
    for (int i = 0; i < n; ++i) order.push_back(label);
  // Interleave labels the way a real split would.
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[pick(i)]);
  for (const auto& label : order) make_post(label, false, "test");
  for (int i = 0; i < train_posts; ++i) make_post("offensive", i % 5 == 0, i % 2 == 0 ? "train" : "val");

  write_text(dir / "dataset.json", data.dump());
  write_text(dir / "post_id_divisions.json", divisions.dump());
}

// Implicit-hate TSV (ID, post, class, implied_statement, target).
inline void write_implicit_corpus(const fs::path& path, const std::map<std::string, int>& pool_sizes,
                                  std::uint64_t seed = 2) {
  std::mt19937_64 rng(seed);
  const auto& words = filler_words();
  std::string out = "ID\tpost\tclass\timplied_statement\ttarget\n";
  int serial = 0;
  std::vector<std::string> order;
  for (const auto& [label, n] : pool_sizes)
    for (int i = 0; i < n; ++i) order.push_back(label);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  for (const auto& label : order) {
    std::string post;
    for (int w = 0; w < 8; ++w) post += (w ? " " : "") + words[rng() % words.size()];
    std::string implied, target;
    if (label == "implicit_hate") {
      if (serial % 7 != 0) implied = "group " + std::to_string(serial % 5) + " is dangerous";
      target = "group " + std::to_string(serial % 5);
    }
    out += "ih" + std::to_string(serial++) + "\t" + post + "\t" + label + "\t" + implied + "\t" + target + "\n";
  }
  write_text(path, out);
}

// ToxicSpans CSV (id, text, spans as a JSON offset list) and a plain
// non-toxic CSV (id, text). Every tenth toxic post has no spans.
inline void write_toxicspans_corpora(const fs::path& toxic_path, const fs::path& nontoxic_path, int toxic_rows,
                                     int nontoxic_rows) {
  const auto& words = filler_words();
  std::string toxic = "id,text,spans\n";
  for (int i = 0; i < toxic_rows; ++i) {
    const std::string head = words[static_cast<std::size_t>(i) % words.size()];
    const std::string post = head + " you absolute idiot, what a mess";
    std::string spans = "[]";
    if (i % 10 != 0) {
      const std::size_t b = head.size() + 14;  // "idiot"
      spans = "[";
      for (std::size_t k = b; k < b + 5; ++k) spans += (k == b ? "" : ", ") + std::to_string(k);
      spans += "]";
    }
    toxic += "t" + std::to_string(i) + ",\"" + post + "\",\"" + spans + "\"\n";
  }
  std::string nontoxic = "id,text\n";
  for (int i = 0; i < nontoxic_rows; ++i) {
    nontoxic += "n" + std::to_string(i) + ",\"a calm " + words[static_cast<std::size_t>(i) % words.size()] +
                " post, number " + std::to_string(i) + "\"\n";
  }
  write_text(toxic_path, toxic);
  write_text(nontoxic_path, nontoxic);
}

}  // namespace testing_support
