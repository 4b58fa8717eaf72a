#pragma once

#include "ppaudit/corpus.hpp"
#include "ppaudit/personas.hpp"
#include "ppaudit/prompting.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace ppaudit {

enum class ProviderKind { http_chat, simulated };

std::string provider_kind_name(ProviderKind k);
std::optional<ProviderKind> provider_kind_from_name(std::string_view name);

struct RetryPolicy {
    int max_attempts = 4;
    std::vector<int> backoff_ms = {250, 1000, 4000};  // clamped to the last entry
};

struct PersonaBias {
    int drift = 0;             // signed ordinal label shift
    double probability = 0.0;  // chance the shift is applied per completion
};

struct SimulatedAnnotatorParams {
    uint64_t seed = 0;
    std::map<std::string, PersonaBias> bias;  // persona id -> bias
    double rationale_fidelity = 1.0;          // P(gold rationale token reproduced)
    double false_mark_rate = 0.0;             // P(non-gold token marked)
};

struct ProviderConfig {
    ProviderKind kind = ProviderKind::simulated;
    std::string endpoint_url;   // http_chat: base URL, e.g. https://host/api/v1
    std::string model_name = "simulated-annotator";
    std::string api_key_env;    // env var holding the bearer token; never persisted
    int max_parallel = 4;
    RetryPolicy retry;
    std::string params_json = "{}";  // sampling params forwarded verbatim
    std::optional<std::string> reasoning_effort;
};

struct RawResponse {
    std::string work_item_key;
    std::string text;           // completion exactly as received
    double latency_seconds = 0.0;
    int attempt = 1;
    std::string timestamp;
};

// Cache key: digest of (model name, sampling params, rendered prompt text,
// run index), so prompt or parameter edits invalidate stale entries.
std::string completion_cache_key(const ProviderConfig & config, std::string_view prompt_text,
                                 int run);

// Append-only JSONL response cache, one RawResponse per line. Writes are
// serialized; reads hit an in-memory index loaded at construction.
class ResponseCache {
  public:
    explicit ResponseCache(std::string path);
    std::optional<RawResponse> find(const std::string & digest) const;
    void put(const std::string & digest, const RawResponse & response);
    size_t size() const;

  private:
    std::string path_;
    mutable std::mutex mutex_;
    std::map<std::string, RawResponse> index_;
};

// Deterministic offline annotator: emits a think block plus JSON whose
// label is the canonical gold shifted by the persona's bias with the
// configured probability (clamped to the label range), and whose rationale
// words follow the fidelity/false-mark Bernoulli model. Output is a pure
// function of (params.seed, instance id, persona id, run).
std::string simulate(const SimulatedAnnotatorParams & params, const Instance & instance,
                     const Persona & persona, int run);

struct CompletionRequest {
    std::string work_item_key;
    RenderedPrompt prompt;
    const Instance * instance = nullptr;  // required by the simulated provider
    const Persona * persona = nullptr;
    int run = 1;
};

// Dispatches one completion. Cache hits return the stored response without
// touching the network; transient HTTP failures (connect errors, 429, 5xx)
// are retried per the policy; in-flight requests never exceed max_parallel.
class Provider {
  public:
    Provider(ProviderConfig config, std::shared_ptr<ResponseCache> cache,
             SimulatedAnnotatorParams simulated = {});
    ~Provider();

    RawResponse complete(const CompletionRequest & request);

    const ProviderConfig & config() const { return config_; }
    size_t cache_hits() const { return cache_hits_.load(); }

  private:
    RawResponse complete_http(const CompletionRequest & request);

    ProviderConfig config_;
    std::shared_ptr<ResponseCache> cache_;
    SimulatedAnnotatorParams simulated_;
    std::atomic<size_t> cache_hits_{0};
    struct Gate;
    std::unique_ptr<Gate> gate_;
};

}  // namespace ppaudit
