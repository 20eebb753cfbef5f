#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "llmfs/dataset.hpp"
#include "llmfs/error.hpp"
#include "llmfs/format.hpp"
#include "llmfs/parallel.hpp"
#include "llmfs/rng.hpp"
#include "llmfs/score_vector.hpp"
#include "llmfs/selection.hpp"
#include "llmfs/sha256.hpp"
#include "llmfs/stats.hpp"

namespace llmfs {

// The classification objective sentence spliced into every prompt.
struct TaskContext {
  std::string text =
      "classify whether a given file is malware (1) or benign (0)";
};

struct Prompt {
  std::string text;
  std::size_t feature_index = 0;
};

enum class BackendKind { http, mock };

struct LlmConfig {
  BackendKind backend_kind = BackendKind::mock;
  std::string endpoint_url = "http://127.0.0.1:8080/v1/chat/completions";
  std::string model_name = "mock-model";
  double temperature = 0.0;  // deterministic decoding; anything else rejected
  double timeout_seconds = 30.0;
  std::size_t max_retries = 2;
  std::size_t max_parallel = 4;
  std::string cache_path;  // empty -> in-memory cache only

  void validate() const {
    if (temperature != 0.0)
      fail(Errc::invalid_config, "temperature must be 0");
    if (max_parallel == 0)
      fail(Errc::invalid_config, "max_parallel must be >= 1");
    if (!(timeout_seconds > 0.0))
      fail(Errc::invalid_config, "timeout must be positive");
  }
};

struct RawResponse {
  std::string content;
  double latency_seconds = 0.0;
  bool from_cache = false;
};

namespace detail {

inline std::string join_samples(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_sig6(xs[i]);
  }
  out += "]";
  return out;
}

}  // namespace detail

// Renders the fixed-field-order template; identical descriptors yield
// byte-identical prompts, which is what makes the cache digests stable.
inline Prompt build_prompt(const FeatureDescriptor& desc,
                           const TaskContext& ctx,
                           std::size_t feature_index = 0) {
  using detail::format_sig6;
  std::string t;
  t += "You are assisting with a binary malware-detection task: ";
  t += ctx.text;
  t += ".\nFeature name: ";
  t += desc.name;
  t += "\nGlobal statistics: mean=" + format_sig6(desc.mu);
  t += ", std=" + format_sig6(desc.sigma);
  t += ", median=" + format_sig6(desc.median);
  t += ", min=" + format_sig6(desc.min);
  t += ", max=" + format_sig6(desc.max);
  t += ", IQR=" + format_sig6(desc.iqr);
  t += "\nClass-conditional: malware_mean=" + format_sig6(desc.mu_pos);
  t += ", benign_mean=" + format_sig6(desc.mu_neg);
  t += ", malware_std=" + format_sig6(desc.sigma_pos);
  t += ", benign_std=" + format_sig6(desc.sigma_neg);
  t += ", mean_difference=" + format_sig6(desc.delta_mu);
  t += "\nRepresentative samples: malware=" +
       detail::join_samples(desc.samples_pos);
  t += ", benign=" + detail::join_samples(desc.samples_neg);
  t += "\nRespond with a single number between 0 and 1 indicating the "
       "importance of this feature for the classification task. "
       "Output only the number.";
  return {std::move(t), feature_index};
}

// Total parse: first decimal-number token, accepted only when finite and in
// [0,1]; every failure path yields the neutral 0.5.
inline double parse_score(std::string_view content) {
  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    bool starter = (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
    if (!starter) continue;
    // strtod needs a terminated buffer; copy the tail once.
    std::string tail(content.substr(i));
    char* end = nullptr;
    double v = std::strtod(tail.c_str(), &end);
    if (end == tail.c_str()) continue;  // sign/dot with no digits
    if (std::isfinite(v) && v >= 0.0 && v <= 1.0) return v;
    return 0.5;  // first numeric token was invalid
  }
  return 0.5;  // no numeric token at all
}

inline double parse_score(const RawResponse& resp) {
  return parse_score(resp.content);
}

// Deterministic offline stand-in: standardized class separation in [0,1).
inline double mock_score(const FeatureDescriptor& desc) {
  double sep = std::fabs(desc.delta_mu);
  return sep / (desc.sigma_pos + desc.sigma_neg + sep + 1e-9);
}

inline std::string cache_digest(const std::string& model_name,
                                const std::string& prompt_text) {
  return detail::sha256_hex(model_name + "\n" + prompt_text);
}

// Thread-safe score cache with optional append-only file backing. Records
// are `<64-hex-digest>\t<score>`; unparseable or out-of-range lines are
// skipped on load so a damaged cache degrades to recomputation.
class ScoreCache {
 public:
  ScoreCache() = default;

  explicit ScoreCache(std::string path) : path_(std::move(path)) {
    if (path_.empty()) return;
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto tab = line.find('\t');
      if (tab != 64) continue;
      std::string digest = line.substr(0, 64);
      if (digest.find_first_not_of("0123456789abcdef") != std::string::npos)
        continue;
      char* end = nullptr;
      const char* begin = line.c_str() + 65;
      double score = std::strtod(begin, &end);
      if (end == begin || *end != '\0') continue;
      if (!(score >= 0.0 && score <= 1.0)) continue;
      entries_[digest] = score;
    }
  }

  std::optional<double> lookup(const std::string& digest) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(digest);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void insert(const std::string& digest, double score) {
    if (!(score >= 0.0 && score <= 1.0))
      fail(Errc::invalid_config, "cache scores must lie in [0,1]");
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, fresh] = entries_.emplace(digest, score);
    if (!fresh) return;  // append-only: first write wins
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    if (!out) fail(Errc::io_error, "cannot append to cache: " + path_);
    out << digest << '\t' << detail::format_g17(score) << '\n';
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.size();
  }

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, double> entries_;
};

// A chat-completion backend returns the assistant message content for one
// prompt. Implementations throw BackendUnreachable for transport-level
// failures (retried) and MalformedResponseBody for undecodable replies.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const std::string& prompt_text,
                               const LlmConfig& cfg) = 0;
};

// Pure, reentrant backend that reads the class-conditional fields back out
// of the prompt and answers with the separation score at six significant
// digits — offline runs stay fully deterministic.
class MockBackend : public Backend {
 public:
  std::string complete(const std::string& prompt_text,
                       const LlmConfig& cfg) override {
    (void)cfg;
    double sigma_pos = field(prompt_text, "malware_std=");
    double sigma_neg = field(prompt_text, "benign_std=");
    double delta_mu = field(prompt_text, "mean_difference=");
    double sep = std::fabs(delta_mu);
    return detail::format_sig6(sep / (sigma_pos + sigma_neg + sep + 1e-9));
  }

 private:
  static double field(const std::string& text, const std::string& key) {
    auto pos = text.find(key);
    if (pos == std::string::npos)
      fail(Errc::malformed_response_body,
           "mock backend: prompt lacks field " + key);
    return std::strtod(text.c_str() + pos + key.size(), nullptr);
  }
};

namespace detail {

struct ParsedUrl {
  std::string host;
  int port = 80;
  std::string path = "/";
};

// Accepts plain-http URLs only; encrypted transports are out of scope for
// the local-backend setups this targets.
inline ParsedUrl parse_http_url(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0)
    fail(Errc::invalid_config,
         "endpoint must be a plain http:// URL, got: " + url);
  ParsedUrl out;
  std::string rest = url.substr(scheme.size());
  auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  if (slash != std::string::npos) out.path = rest.substr(slash);
  auto colon = authority.find(':');
  if (colon == std::string::npos) {
    out.host = authority;
  } else {
    out.host = authority.substr(0, colon);
    char* end = nullptr;
    long port = std::strtol(authority.c_str() + colon + 1, &end, 10);
    if (end == authority.c_str() + colon + 1 || *end != '\0' || port <= 0 ||
        port > 65535)
      fail(Errc::invalid_config, "bad port in endpoint URL: " + url);
    out.port = static_cast<int>(port);
  }
  if (out.host.empty())
    fail(Errc::invalid_config, "endpoint URL has no host: " + url);
  return out;
}

}  // namespace detail

}  // namespace llmfs

// httplib and nlohmann/json are only needed by the HTTP backend below.
#include "httplib.h"
#include "json.hpp"

namespace llmfs {

// OpenAI-style chat-completion client over plain HTTP. The bearer token is
// read from LLMFS_API_KEY when present.
class HttpBackend : public Backend {
 public:
  std::string complete(const std::string& prompt_text,
                       const LlmConfig& cfg) override {
    auto url = detail::parse_http_url(cfg.endpoint_url);
    httplib::Client client(url.host, url.port);
    auto whole = std::chrono::duration<double>(cfg.timeout_seconds);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(whole);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
        whole - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (const char* key = std::getenv("LLMFS_API_KEY"))
      headers.emplace("Authorization", std::string("Bearer ") + key);

    nlohmann::json body;
    body["model"] = cfg.model_name;
    body["messages"] = nlohmann::json::array(
        {{{"role", "user"}, {"content", prompt_text}}});
    body["temperature"] = 0;

    auto res = client.Post(url.path, headers, body.dump(),
                           "application/json");
    if (!res)
      fail(Errc::backend_unreachable,
           "no response from " + cfg.endpoint_url);
    if (res->status != 200)
      fail(Errc::backend_unreachable,
           "backend returned HTTP " + std::to_string(res->status));

    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded())
      fail(Errc::malformed_response_body, "response body is not JSON");
    try {
      return reply.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const nlohmann::json::exception&) {
      fail(Errc::malformed_response_body,
           "response lacks choices[0].message.content");
    }
  }
};

inline std::unique_ptr<Backend> make_backend(const LlmConfig& cfg) {
  if (cfg.backend_kind == BackendKind::mock)
    return std::make_unique<MockBackend>();
  return std::make_unique<HttpBackend>();
}

struct ScoringStats {
  std::size_t fallbacks = 0;         // scores that degraded to 0.5
  std::size_t cache_hits = 0;
  std::size_t backend_requests = 0;  // actual completions attempted
};

// Orchestrates describe -> prompt -> query -> parse with caching, bounded
// parallelism, retry with exponential backoff, and the neutral fallback.
class LlmScorer {
 public:
  LlmScorer(LlmConfig cfg, TaskContext ctx, Backend* backend = nullptr)
      : cfg_(std::move(cfg)),
        ctx_(std::move(ctx)),
        cache_(cfg_.cache_path),
        borrowed_(backend) {
    cfg_.validate();
    if (ctx_.text.empty()) fail(Errc::invalid_config, "task context is empty");
    if (!borrowed_) owned_ = make_backend(cfg_);
  }

  // Cache-first single-prompt query. Misses hit the backend (with retries
  // for unreachability), and the parsed score is persisted immediately so a
  // rerun never re-asks.
  RawResponse query(const Prompt& prompt) {
    const std::string digest = cache_digest(cfg_.model_name, prompt.text);
    if (auto hit = cache_.lookup(digest)) {
      cache_hits_.fetch_add(1, std::memory_order_relaxed);
      return {detail::format_g17(*hit), 0.0, true};
    }
    auto t0 = std::chrono::steady_clock::now();
    std::string content = complete_with_retry(prompt.text);
    double latency =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    cache_.insert(digest, parse_score(content));
    return {std::move(content), latency, false};
  }

  // Algorithm core: one score per feature, ordered by feature index, with
  // unreachable or undecodable backends degrading to 0.5 (also cached, so
  // warm reruns stay bit-identical and offline).
  ScoreVector score_all_features(const Dataset& train, std::uint64_t seed) {
    auto descriptors = describe_all(train, 5, seed, cfg_.max_parallel);
    ScoreVector sv;
    sv.method_name = "llm";
    sv.scores.assign(train.d(), 0.5);
    detail::parallel_for(train.d(), cfg_.max_parallel, [&](std::size_t j) {
      sv.scores[j] = resolve(build_prompt(descriptors[j], ctx_, j));
    });
    return sv;
  }

  // Hybrid mode: only the top-m features by the prefilter score are sent to
  // the backend; everything else gets the -1 sentinel so top-k (k <= m) can
  // never resurrect a pruned feature.
  ScoreVector prefilter_rerank(const Dataset& train,
                               const ScoreVector& prefilter, std::size_t m,
                               std::uint64_t seed) {
    if (prefilter.scores.size() != train.d())
      fail(Errc::dimension_mismatch,
           "prefilter score vector does not match dataset width");
    SelectionResult survivors = top_k(prefilter, m);
    ScoreVector sv;
    sv.method_name = "llm_prefilter";
    sv.scores.assign(train.d(), -1.0);
    detail::parallel_for(
        survivors.indices.size(), cfg_.max_parallel, [&](std::size_t r) {
          std::size_t j = survivors.indices[r];
          auto desc = describe_feature(train, j, 5, derive_seed(seed, j));
          sv.scores[j] = resolve(build_prompt(desc, ctx_, j));
        });
    return sv;
  }

  ScoringStats stats() const {
    return {fallbacks_.load(), cache_hits_.load(), backend_requests_.load()};
  }

  ScoreCache& cache() { return cache_; }
  const LlmConfig& config() const { return cfg_; }

 private:
  double resolve(const Prompt& prompt) {
    try {
      return parse_score(query(prompt));
    } catch (const Error& e) {
      if (e.code() != Errc::backend_unreachable &&
          e.code() != Errc::malformed_response_body)
        throw;
      fallbacks_.fetch_add(1, std::memory_order_relaxed);
      cache_.insert(cache_digest(cfg_.model_name, prompt.text), 0.5);
      return 0.5;
    }
  }

  std::string complete_with_retry(const std::string& prompt_text) {
    Backend& backend = borrowed_ ? *borrowed_ : *owned_;
    std::chrono::milliseconds backoff(100);
    for (std::size_t attempt = 0;; ++attempt) {
      try {
        backend_requests_.fetch_add(1, std::memory_order_relaxed);
        return backend.complete(prompt_text, cfg_);
      } catch (const Error& e) {
        if (e.code() != Errc::backend_unreachable ||
            attempt >= cfg_.max_retries)
          throw;
        std::this_thread::sleep_for(backoff);
        backoff = std::min(backoff * 2, std::chrono::milliseconds(2000));
      }
    }
  }

  LlmConfig cfg_;
  TaskContext ctx_;
  ScoreCache cache_;
  Backend* borrowed_ = nullptr;
  std::unique_ptr<Backend> owned_;
  std::atomic<std::size_t> fallbacks_{0};
  std::atomic<std::size_t> cache_hits_{0};
  std::atomic<std::size_t> backend_requests_{0};
};

inline ScoreVector score_all_features(const Dataset& train,
                                      const LlmConfig& cfg,
                                      const TaskContext& ctx,
                                      std::uint64_t seed) {
  LlmScorer scorer(cfg, ctx);
  return scorer.score_all_features(train, seed);
}

inline ScoreVector prefilter_rerank(const Dataset& train,
                                    const ScoreVector& prefilter,
                                    std::size_t m, const LlmConfig& cfg,
                                    const TaskContext& ctx,
                                    std::uint64_t seed = 0) {
  LlmScorer scorer(cfg, ctx);
  return scorer.prefilter_rerank(train, prefilter, m, seed);
}

}  // namespace llmfs
