#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "corpora.hpp"
#include "hateprobe/backends.hpp"
#include "hateprobe/cache.hpp"
#include "hateprobe/digest.hpp"
#include "hateprobe/error.hpp"
#include "hateprobe/gateway.hpp"
#include "hateprobe/rate_limiter.hpp"

using namespace hateprobe;
using testing_support::TempDir;

namespace {

// Replays a fixed script of replies, then keeps returning the last one.
class ScriptedBackend final : public CompletionBackend {
 public:
  explicit ScriptedBackend(std::vector<BackendReply> script) : script_(std::move(script)) {}
  BackendReply send(const std::string&, const BackendConfig&) override {
    std::lock_guard lock(mutex_);
    const std::size_t i = std::min(calls_++, script_.size() - 1);
    return script_[i];
  }
  std::size_t calls() const { return calls_; }

 private:
  std::mutex mutex_;
  std::vector<BackendReply> script_;
  std::size_t calls_ = 0;
};

BackendReply ok(std::string text) { return {BackendReply::Status::kOk, std::move(text), {}, 0.0}; }
BackendReply transient() { return {BackendReply::Status::kTransient, {}, "HTTP 503", 0.0}; }
BackendReply fatal() { return {BackendReply::Status::kFatal, {}, "HTTP 400", 0.0}; }
BackendReply limited(double after) { return {BackendReply::Status::kRateLimited, {}, "HTTP 429", after}; }

BackendConfig fast_config(const std::string& model = "m") {
  BackendConfig c;
  c.model_id = model;
  c.requests_per_minute = 600000;
  c.max_retries = 2;
  c.timeout_seconds = 10;
  c.backoff_initial_seconds = 1;
  return c;
}

}  // namespace

TEST_CASE("sha256 and prompt digests") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto d = prompt_digest("p", "m", 0.0);
  CHECK(d.size() == 64);
  CHECK(d == prompt_digest("p", "m", 0.0));
  CHECK(d != prompt_digest("p", "m2", 0.0));
  CHECK(d != prompt_digest("p", "m", 0.7));
  CHECK(prompt_digest("ab", "c", 0) != prompt_digest("a", "bc", 0));
}

TEST_CASE("cache persists and survives a torn tail") {
  TempDir dir;
  const auto path = dir / "cache.jsonl";
  {
    CompletionCache c(path);
    c.store({"d1", "normal", 1, "m"});
    c.store({"d2", "bad \xff bytes", 2, "m"});
    CHECK(c.size() == 2);
  }
  {
    std::ofstream(path, std::ios::app) << "{\"digest\": \"d3\", \"raw_te";
  }
  CompletionCache c(path);
  CHECK(c.dropped_lines() == 1);
  CHECK(c.size() == 2);
  CHECK(c.lookup("d1") == "normal");
  CHECK(c.lookup("d2").has_value());
  CHECK_FALSE(c.lookup("d3"));
  c.store({"d3", "offensive", 3, "m"});
  CompletionCache again(path);
  CHECK(again.dropped_lines() == 0);
  CHECK(again.lookup("d3") == "offensive");
}

TEST_CASE("in-memory cache") {
  CompletionCache c;
  CHECK_FALSE(c.lookup("x"));
  c.store({"x", "y", 0, "m"});
  CHECK(c.lookup("x") == "y");
  CHECK_FALSE(c.path());
}

TEST_CASE("rate limiter spaces requests") {
  auto clock = std::make_shared<ManualClock>();
  RateLimiter limiter(60, clock);
  for (int i = 0; i < 4; ++i) limiter.acquire();
  double slept = 0;
  for (double s : clock->sleeps()) slept += s;
  CHECK(slept == doctest::Approx(3.0));

  auto clock2 = std::make_shared<ManualClock>();
  RateLimiter idle(60, clock2);
  idle.acquire();
  clock2->advance(Seconds(10));
  idle.acquire();
  CHECK(clock2->sleeps().empty());
}

TEST_CASE("gateway is cache-first") {
  auto backend = mock_backend({contains_rule("hello", "offensive")}, "normal");
  Gateway g(std::make_shared<CompletionCache>(), std::make_shared<ManualClock>());
  const auto cfg = fast_config();
  g.register_backend(cfg, backend);
  CHECK(g.complete("hello there", cfg) == "offensive");
  CHECK(g.complete("hello there", cfg) == "offensive");
  CHECK(g.complete("other", cfg) == "normal");
  CHECK(backend->calls() == 2);
  CHECK(g.stats().cache_hits == 1);
  CHECK(g.stats().backend_calls == 2);
}

TEST_CASE("transient failures are retried with capped exponential backoff") {
  auto clock = std::make_shared<ManualClock>();
  Gateway g(std::make_shared<CompletionCache>(), clock);
  auto cfg = fast_config();
  auto backend = std::make_shared<ScriptedBackend>(std::vector<BackendReply>{transient()});
  g.register_backend(cfg, backend);
  try {
    g.complete("p", cfg);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.attempts() == 3);
  }
  CHECK(backend->calls() == 3);
  CHECK(clock->sleeps() == std::vector<double>{1.0, 2.0});

  auto clock2 = std::make_shared<ManualClock>();
  Gateway capped(std::make_shared<CompletionCache>(), clock2);
  cfg.max_retries = 3;
  cfg.backoff_initial_seconds = 2;
  cfg.timeout_seconds = 3;
  capped.register_backend(cfg, std::make_shared<ScriptedBackend>(std::vector<BackendReply>{transient()}));
  CHECK_THROWS_AS(capped.complete("p", cfg), BackendError);
  CHECK(clock2->sleeps() == std::vector<double>{2.0, 3.0, 3.0});
}

TEST_CASE("a retried success is cached; failures are not") {
  auto cache = std::make_shared<CompletionCache>();
  Gateway g(cache, std::make_shared<ManualClock>());
  auto cfg = fast_config();
  auto backend = std::make_shared<ScriptedBackend>(std::vector<BackendReply>{transient(), ok("toxic")});
  g.register_backend(cfg, backend);
  CHECK(g.complete("p", cfg) == "toxic");
  CHECK(g.stats().retries == 1);
  CHECK(cache->size() == 1);

  auto bad = std::make_shared<ScriptedBackend>(std::vector<BackendReply>{fatal()});
  auto cfg2 = fast_config("m2");
  g.register_backend(cfg2, bad);
  CHECK_THROWS_AS(g.complete("p", cfg2), BackendError);
  CHECK(bad->calls() == 1);  // fatal replies are not retried
  CHECK(cache->size() == 1);
}

TEST_CASE("429 waits do not consume attempts") {
  auto clock = std::make_shared<ManualClock>();
  Gateway g(std::make_shared<CompletionCache>(), clock);
  auto cfg = fast_config();
  cfg.max_retries = 0;
  g.register_backend(cfg, std::make_shared<ScriptedBackend>(
                              std::vector<BackendReply>{limited(5), limited(0), limited(0), ok("normal")}));
  CHECK(g.complete("p", cfg) == "normal");
  CHECK(g.stats().rate_limit_waits == 3);
  double slept = 0;
  for (double s : clock->sleeps()) slept += s;
  CHECK(slept >= 5.0 + 1.0 + 2.0 - 1e-9);

  auto cfg2 = fast_config("forever");
  g.register_backend(cfg2, std::make_shared<ScriptedBackend>(std::vector<BackendReply>{limited(1)}));
  CHECK_THROWS_AS(g.complete("p", cfg2), BackendError);
}

TEST_CASE("unregistered model fails cleanly") {
  Gateway g(std::make_shared<CompletionCache>(), std::make_shared<ManualClock>());
  CHECK_THROWS_AS(g.complete("p", fast_config("ghost")), BackendError);
}

TEST_CASE("concurrent identical prompts share one backend call") {
  class Slow final : public CompletionBackend {
   public:
    BackendReply send(const std::string&, const BackendConfig&) override {
      ++calls;
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      return ok("hate speech");
    }
    std::atomic<int> calls{0};
  };
  auto slow = std::make_shared<Slow>();
  Gateway g(std::make_shared<CompletionCache>());
  const auto cfg = fast_config();
  g.register_backend(cfg, slow);
  std::vector<std::thread> threads;
  std::atomic<int> right{0};
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      if (g.complete("same prompt", cfg) == "hate speech") ++right;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(right == 8);
  CHECK(slow->calls == 1);
}

TEST_CASE("concurrent writers keep the cache log intact") {
  TempDir dir;
  {
    auto cache = std::make_shared<CompletionCache>(dir / "c.jsonl");
    Gateway g(cache);
    const auto cfg = fast_config();
    g.register_backend(cfg, mock_backend({}, "normal"));
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < 50; ++i) g.complete("prompt " + std::to_string(t * 50 + i), cfg);
      });
    }
    for (auto& th : threads) th.join();
  }
  CompletionCache reopened(dir / "c.jsonl");
  CHECK(reopened.size() == 200);
  CHECK(reopened.dropped_lines() == 0);
}

TEST_CASE("backend config json and validation") {
  auto j = nlohmann::json::parse(R"({"kind": "chat", "model_id": "gpt-3.5-turbo", "base_url": "http://x",
                                     "temperature": 0.2, "max_retries": 5})");
  auto c = backend_config_from_json(j);
  CHECK(c.kind == BackendKind::kChat);
  CHECK(c.max_retries == 5);
  CHECK(backend_config_from_json(to_json(c)).temperature == 0.2);
  c.base_url.clear();
  CHECK_THROWS_AS(validate(c), DataError);
  CHECK_THROWS(parse_backend_kind("carrier-pigeon"));

  auto m = backend_config_from_json(nlohmann::json::parse(
      R"({"kind": "mock", "model_id": "mk", "rules": [{"contains": "idiot", "response": "toxic"},
                                                    {"regex": "^Consider", "response": "non_toxic"}],
          "default": "unsure"})"));
  auto mb = mock_backend_from_config(m);
  CHECK(mb->respond("you idiot") == "toxic");
  CHECK(mb->respond("Consider this") == "non_toxic");
  CHECK(mb->respond("hm") == "unsure");
}

TEST_CASE("http backends speak the expected wire formats") {
  httplib::Server server;
  std::string seen_auth, seen_body;
  std::atomic<int> flaky{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    res.set_content(R"({"choices": [{"message": {"role": "assistant", "content": "offensive"}}]})",
                    "application/json");
  });
  server.Post("/v1/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (flaky++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"choices": [{"text": " normal"}]})", "application/json");
  });
  server.Post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    if (body.at("inputs") == "limit me") {
      res.status = 429;
      res.set_header("Retry-After", "7");
      return;
    }
    if (body.at("inputs") == "reject me") {
      res.status = 400;
      res.set_content("bad request", "text/plain");
      return;
    }
    res.set_content(R"([{"generated_text": "hate speech"}])", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread runner([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::string url = "http://127.0.0.1:" + std::to_string(port);
  HttpBackend http;

  ::setenv("HATEPROBE_TEST_KEY", "sk-test", 1);
  BackendConfig chat = fast_config("gpt-test");
  chat.kind = BackendKind::kChat;
  chat.base_url = url;
  chat.api_key_env = "HATEPROBE_TEST_KEY";
  auto r = http.send("classify this", chat);
  CHECK(r.status == BackendReply::Status::kOk);
  CHECK(r.text == "offensive");
  CHECK(seen_auth == "Bearer sk-test");
  auto body = nlohmann::json::parse(seen_body);
  CHECK(body["model"] == "gpt-test");
  CHECK(body["messages"].size() == 1);
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["messages"][0]["content"] == "classify this");
  CHECK(body["temperature"] == 0.0);

  BackendConfig completion = chat;
  completion.kind = BackendKind::kCompletion;
  completion.model_id = "davinci-test";
  Gateway g(std::make_shared<CompletionCache>(), std::make_shared<ManualClock>());
  g.register_backend(completion, std::make_shared<HttpBackend>());
  CHECK(g.complete("x", completion) == " normal");
  CHECK(g.stats().retries == 1);

  BackendConfig local = fast_config("flan-t5");
  local.kind = BackendKind::kLocal;
  local.base_url = url;
  CHECK(http.send("hi", local).text == "hate speech");
  auto lim = http.send("limit me", local);
  CHECK(lim.status == BackendReply::Status::kRateLimited);
  CHECK(lim.retry_after_seconds == 7.0);
  auto rej = http.send("reject me", local);
  CHECK(rej.status == BackendReply::Status::kFatal);
  CHECK(rej.error.find("bad request") != std::string::npos);

  server.stop();
  runner.join();

  local.timeout_seconds = 1;
  CHECK(http.send("hi", local).status == BackendReply::Status::kTransient);  // nobody listening
}
