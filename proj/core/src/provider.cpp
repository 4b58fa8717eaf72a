#include "ppaudit/provider.hpp"

#include "ppaudit/util.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

using nlohmann::json;

namespace ppaudit {

std::string provider_kind_name(ProviderKind k) {
    return k == ProviderKind::http_chat ? "http_chat" : "simulated";
}

std::optional<ProviderKind> provider_kind_from_name(std::string_view name) {
    std::string n = to_lower(name);
    if (n == "http_chat" || n == "http") return ProviderKind::http_chat;
    if (n == "simulated" || n == "sim") return ProviderKind::simulated;
    return std::nullopt;
}

std::string completion_cache_key(const ProviderConfig & config, std::string_view prompt_text,
                                 int run) {
    std::string material = config.model_name;
    material += '\x1f';
    material += config.params_json;
    material += '\x1f';
    material += prompt_text;
    material += '\x1f';
    material += std::to_string(run);
    return digest_hex(material);
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;  // fresh cache
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("digest")) continue;
        RawResponse r;
        r.work_item_key = j.value("key", "");
        r.text = j.value("text", "");
        r.latency_seconds = j.value("latency", 0.0);
        r.attempt = j.value("attempt", 1);
        r.timestamp = j.value("timestamp", "");
        index_[j["digest"].get<std::string>()] = std::move(r);
    }
}

std::optional<RawResponse> ResponseCache::find(const std::string & digest) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = index_.find(digest);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::put(const std::string & digest, const RawResponse & response) {
    std::lock_guard<std::mutex> lock(mutex_);
    json j;
    j["digest"] = digest;
    j["key"] = response.work_item_key;
    j["text"] = response.text;
    j["latency"] = response.latency_seconds;
    j["attempt"] = response.attempt;
    j["timestamp"] = response.timestamp;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot append to response cache: " + path_);
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    index_[digest] = response;
}

size_t ResponseCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return index_.size();
}

namespace {

double uniform01(std::mt19937_64 & rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool bernoulli(std::mt19937_64 & rng, double p) {
    if (p <= 0.0) {
        uniform01(rng);  // keep the draw count fixed so streams stay aligned
        return false;
    }
    if (p >= 1.0) {
        uniform01(rng);
        return true;
    }
    return uniform01(rng) < p;
}

}  // namespace

std::string simulate(const SimulatedAnnotatorParams & params, const Instance & instance,
                     const Persona & persona, int run) {
    if (!instance.has_canonical_gold()) {
        throw ValidationError("simulate: instance " + instance.id + " has no canonical gold");
    }
    GoldAnnotation gold = instance.canonical_gold();

    std::string stream = instance.id;
    stream += '\x1f';
    stream += persona.id;
    stream += '\x1f';
    stream += std::to_string(run);
    std::mt19937_64 rng(mix_seed(params.seed, fnv1a64(stream)));

    int label = gold.label;
    auto bias_it = params.bias.find(persona.id);
    if (bias_it != params.bias.end() && bias_it->second.drift != 0) {
        if (bernoulli(rng, bias_it->second.probability)) {
            label += bias_it->second.drift;
        }
    }
    int max_label = instance.task == Task::cose ? static_cast<int>(instance.options.size()) - 1 : 2;
    label = std::clamp(label, 0, max_label);

    std::vector<std::string> rationale;
    for (size_t i = 0; i < instance.tokens.size(); ++i) {
        bool gold_marked = i < gold.rationale_mask.size() && gold.rationale_mask[i];
        double p = gold_marked ? params.rationale_fidelity : params.false_mark_rate;
        if (bernoulli(rng, p)) rationale.push_back(instance.tokens[i].surface);
    }

    std::string label_text;
    json payload;
    if (instance.task == Task::cose) {
        label_text = instance.options[static_cast<size_t>(label)];
        payload["answer"] = label_text;
        payload["answer_index"] = label;
    } else {
        label_text = label_names(instance.task)[static_cast<size_t>(label)];
        payload["label"] = label_text;
    }
    payload["rationale"] = rationale;

    std::string think = "Reading this as a person who ";
    think += persona.description.empty() ? std::string("weighs the text plainly")
                                         : persona.description;
    think += ". Going over the words one by one, the overall impression settles on ";
    think += label_text;
    think += ".";

    return "<think>" + think + "</think>\n" + payload.dump();
}

// counting semaphore bounding in-flight requests
struct Provider::Gate {
    explicit Gate(int limit) : available(limit) {}
    std::mutex m;
    std::condition_variable cv;
    int available;

    void acquire() {
        std::unique_lock<std::mutex> lock(m);
        cv.wait(lock, [&] { return available > 0; });
        --available;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(m);
            ++available;
        }
        cv.notify_one();
    }
};

Provider::Provider(ProviderConfig config, std::shared_ptr<ResponseCache> cache,
                   SimulatedAnnotatorParams simulated)
    : config_(std::move(config)), cache_(std::move(cache)), simulated_(std::move(simulated)) {
    if (config_.max_parallel < 1) throw ConfigError("provider: max_parallel must be >= 1");
    if (config_.kind == ProviderKind::http_chat) {
        if (config_.endpoint_url.empty()) throw ConfigError("provider: http_chat requires endpoint_url");
        if (config_.model_name.empty()) throw ConfigError("provider: http_chat requires model_name");
    }
    json params = json::parse(config_.params_json, nullptr, false);
    if (params.is_discarded() || !params.is_object()) {
        throw ConfigError("provider: params must be a JSON object");
    }
    gate_ = std::make_unique<Gate>(config_.max_parallel);
}

Provider::~Provider() = default;

RawResponse Provider::complete(const CompletionRequest & request) {
    std::string digest = completion_cache_key(config_, request.prompt.text, request.run);
    if (cache_) {
        if (auto hit = cache_->find(digest)) {
            ++cache_hits_;
            return *hit;
        }
    }

    RawResponse response;
    if (config_.kind == ProviderKind::simulated) {
        if (!request.instance || !request.persona) {
            throw ConfigError("simulated provider needs instance and persona context");
        }
        auto start = std::chrono::steady_clock::now();
        response.text = simulate(simulated_, *request.instance, *request.persona, request.run);
        response.latency_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        response.work_item_key = request.work_item_key;
        response.attempt = 1;
        response.timestamp = iso8601_utc_now();
    } else {
        gate_->acquire();
        try {
            response = complete_http(request);
        } catch (...) {
            gate_->release();
            throw;
        }
        gate_->release();
    }

    if (cache_) cache_->put(digest, response);
    return response;
}

namespace {

struct ParsedUrl {
    std::string base;         // scheme://host[:port]
    std::string path_prefix;  // may be empty
};

ParsedUrl split_url(const std::string & url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint_url must include a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.base = url;
    } else {
        out.base = url.substr(0, path_start);
        out.path_prefix = url.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    }
    return out;
}

bool transient_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

RawResponse Provider::complete_http(const CompletionRequest & request) {
    const char * key = nullptr;
    if (!config_.api_key_env.empty()) {
        key = std::getenv(config_.api_key_env.c_str());
        if (!key || std::string_view(key).empty()) {
            throw ConfigError("API key env var '" + config_.api_key_env + "' is not set");
        }
    }

    ParsedUrl url = split_url(config_.endpoint_url);
    json body;
    body["model"] = config_.model_name;
    body["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt.text}}});
    if (config_.reasoning_effort) body["reasoning_effort"] = *config_.reasoning_effort;
    json params = json::parse(config_.params_json, nullptr, false);
    if (params.is_object()) {
        for (auto it = params.begin(); it != params.end(); ++it) body[it.key()] = it.value();
    }
    std::string payload = body.dump();
    std::string path = url.path_prefix + "/chat/completions";

    int last_status = 0;
    std::string last_error;
    int max_attempts = std::max(config_.retry.max_attempts, 1);
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        auto start = std::chrono::steady_clock::now();
        httplib::Client client(url.base);
        client.set_connection_timeout(30);
        client.set_read_timeout(600);
        httplib::Headers headers;
        if (key) headers.emplace("Authorization", std::string("Bearer ") + key);
        auto res = client.Post(path, headers, payload, "application/json");
        double latency =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        if (res && res->status >= 200 && res->status < 300) {
            json reply = json::parse(res->body, nullptr, false);
            if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
                reply["choices"].empty()) {
                throw TransportError("malformed chat completion reply for " + request.work_item_key,
                                     res->status);
            }
            const json & choice = reply["choices"][0];
            if (!choice.contains("message") || !choice["message"].contains("content") ||
                !choice["message"]["content"].is_string()) {
                throw TransportError("chat completion reply is missing message content for " +
                                         request.work_item_key,
                                     res->status);
            }
            RawResponse out;
            out.work_item_key = request.work_item_key;
            out.text = choice["message"]["content"].get<std::string>();
            out.latency_seconds = latency;
            out.attempt = attempt;
            out.timestamp = iso8601_utc_now();
            return out;
        }

        if (res) {
            last_status = res->status;
            last_error = "HTTP " + std::to_string(res->status);
            if (!transient_status(res->status)) {
                throw TransportError("non-retryable " + last_error + " for " + request.work_item_key,
                                     last_status);
            }
        } else {
            last_status = 0;
            last_error = "connection error (" + httplib::to_string(res.error()) + ")";
        }

        if (attempt < max_attempts && !config_.retry.backoff_ms.empty()) {
            size_t slot = std::min(static_cast<size_t>(attempt - 1),
                                   config_.retry.backoff_ms.size() - 1);
            std::this_thread::sleep_for(std::chrono::milliseconds(config_.retry.backoff_ms[slot]));
        }
    }
    throw TransportError("retries exhausted for " + request.work_item_key + ": " + last_error,
                         last_status);
}

}  // namespace ppaudit
