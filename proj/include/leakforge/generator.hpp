#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "leakforge/common.hpp"
#include "leakforge/hash.hpp"
#include "leakforge/io.hpp"
#include "leakforge/keywords.hpp"
#include "leakforge/prompt.hpp"
#include "leakforge/rng.hpp"

namespace leakforge {

enum class Backend { openai_compatible, mock_echo, mock_resample };

inline const char* backend_name(Backend b) {
    switch (b) {
        case Backend::openai_compatible: return "openai_compatible";
        case Backend::mock_echo: return "mock_echo";
        case Backend::mock_resample: return "mock_resample";
    }
    return "?";
}

inline Backend backend_from_name(const std::string& name) {
    if (name == "openai_compatible" || name == "openai") return Backend::openai_compatible;
    if (name == "mock_echo" || name == "mock-echo") return Backend::mock_echo;
    if (name == "mock_resample" || name == "mock-resample" || name == "mock")
        return Backend::mock_resample;
    throw config_error("unknown generator backend: " + name);
}

struct GeneratorConfig {
    Backend backend = Backend::mock_resample;
    std::string model_name = "mock";
    std::string endpoint_url = "https://api.openai.com/v1";
    std::string api_key_env = "LEAKFORGE_API_KEY";
    double temperature = 1.0;
    std::chrono::milliseconds timeout{60000};
    int max_parallel = 1;
    std::string cache_dir;  // empty: caching disabled
};

struct TokenUsage {
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

struct GenerationRecord {
    std::string prompt_hash;
    std::string model_name;
    std::string raw_response;
    double latency_ms = 0.0;
    std::optional<TokenUsage> token_usage;
    bool from_cache = false;
};

struct GeneratorStats {
    long backend_calls = 0;  // completions actually produced (any backend)
    long network_calls = 0;  // HTTP requests issued
    long cache_hits = 0;
    long cache_misses = 0;
};

struct generation_error : std::runtime_error {
    bool retryable;
    generation_error(const std::string& msg, bool retryable_) : std::runtime_error(msg), retryable(retryable_) {}
};

inline std::string prompt_digest(const std::string& prompt_text) { return digest128(prompt_text); }

/// The exact chat-completions request envelope the artifact emits.
inline std::string chat_request_body(const PromptBatch& prompt, const GeneratorConfig& config) {
    json body;
    body["model"] = config.model_name;
    body["messages"] = json::array({json{{"role", "user"}, {"content", prompt.prompt_text}}});
    body["temperature"] = config.temperature;
    return body.dump();
}

/// Text-generation port. Mock backends are pure functions of the prompt, so
/// experiments that use them are end-to-end byte-reproducible.
class TextGenerator {
public:
    virtual ~TextGenerator() = default;
    virtual GenerationRecord complete(const PromptBatch& prompt) = 0;
    virtual const GeneratorStats& stats() const = 0;
};

class Generator : public TextGenerator {
public:
    explicit Generator(GeneratorConfig config) : config_(std::move(config)) {
        if (config_.max_parallel < 1) throw config_error("max_parallel must be >= 1");
        if (config_.timeout.count() <= 0) throw config_error("timeout must be positive");
    }

    GenerationRecord complete(const PromptBatch& prompt) override {
        const std::string hash = prompt_digest(prompt.prompt_text);
        if (auto cached = lookup_cache(hash)) {
            std::lock_guard lock(mutex_);
            ++stats_.cache_hits;
            cached->from_cache = true;
            return *cached;
        }
        if (!config_.cache_dir.empty()) {
            std::lock_guard lock(mutex_);
            ++stats_.cache_misses;
        }

        auto start = std::chrono::steady_clock::now();
        GenerationRecord record;
        record.prompt_hash = hash;
        record.model_name = config_.model_name;
        switch (config_.backend) {
            case Backend::mock_echo: record.raw_response = mock_echo(prompt); break;
            case Backend::mock_resample: record.raw_response = mock_resample(prompt); break;
            case Backend::openai_compatible: record = openai_complete(prompt, hash); break;
        }
        record.latency_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        {
            std::lock_guard lock(mutex_);
            ++stats_.backend_calls;
        }
        record_cache(record);
        return record;
    }

    const GeneratorStats& stats() const override { return stats_; }
    const GeneratorConfig& config() const { return config_; }

    /// Content-addressed lookup; a corrupt entry counts as a miss.
    std::optional<GenerationRecord> lookup_cache(const std::string& prompt_hash) const {
        if (config_.cache_dir.empty()) return std::nullopt;
        std::filesystem::path p = cache_path(prompt_hash);
        if (!std::filesystem::exists(p)) return std::nullopt;
        try {
            json j = json::parse(read_text_file(p));
            GenerationRecord rec;
            rec.prompt_hash = j.at("prompt_hash").get<std::string>();
            rec.model_name = j.at("model_name").get<std::string>();
            rec.raw_response = j.at("raw_response").get<std::string>();
            rec.latency_ms = j.value("latency_ms", 0.0);
            if (j.contains("token_usage") && !j["token_usage"].is_null()) {
                TokenUsage u;
                u.prompt_tokens = j["token_usage"].value("prompt_tokens", 0L);
                u.completion_tokens = j["token_usage"].value("completion_tokens", 0L);
                rec.token_usage = u;
            }
            return rec;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "leakforge: warning: corrupt cache entry %s (%s), treating as miss\n",
                         p.string().c_str(), e.what());
            return std::nullopt;
        }
    }

    void record_cache(const GenerationRecord& record) const {
        if (config_.cache_dir.empty()) return;
        json j;
        j["prompt_hash"] = record.prompt_hash;
        j["model_name"] = record.model_name;
        j["raw_response"] = record.raw_response;
        j["latency_ms"] = json_real(record.latency_ms);
        if (record.token_usage) {
            j["token_usage"] = json{{"prompt_tokens", record.token_usage->prompt_tokens},
                                    {"completion_tokens", record.token_usage->completion_tokens}};
        } else {
            j["token_usage"] = nullptr;
        }
        atomic_write_text(cache_path(record.prompt_hash), j.dump());
    }

private:
    GeneratorConfig config_;
    GeneratorStats stats_;
    mutable std::mutex mutex_;

    std::filesystem::path cache_path(const std::string& prompt_hash) const {
        return std::filesystem::path(config_.cache_dir) / config_.model_name / (prompt_hash + ".json");
    }

    static std::string mock_echo(const PromptBatch& prompt) {
        std::string out;
        for (std::size_t i = 0; i < prompt.example_bodies.size(); ++i) {
            if (i) out += "###";
            out += prompt.example_bodies[i];
        }
        return out;
    }

    /// Unigram resampling from the example bodies: requested_count pseudo-docs
    /// of roughly mean example length, seeded by the prompt digest so the
    /// output is a pure function of the prompt.
    std::string mock_resample(const PromptBatch& prompt) const {
        std::vector<std::string> bag;
        std::size_t total_tokens = 0;
        for (const std::string& body : prompt.example_bodies) {
            std::vector<std::string> words = tokenize(body);
            total_tokens += words.size();
            for (std::string& w : words) bag.push_back(std::move(w));
        }
        if (bag.empty()) return {};
        std::size_t doc_len = std::max<std::size_t>(
            1, (total_tokens + prompt.example_bodies.size() / 2) / std::max<std::size_t>(1, prompt.example_bodies.size()));

        RngStream stream(derive_seed(fnv1a64(prompt.prompt_text), config_.model_name));
        std::string out;
        for (int d = 0; d < prompt.requested_count; ++d) {
            if (d) out += "###";
            for (std::size_t w = 0; w < doc_len; ++w) {
                if (w) out += ' ';
                out += bag[static_cast<std::size_t>(stream.below(bag.size()))];
            }
        }
        return out;
    }

    GenerationRecord openai_complete(const PromptBatch& prompt, const std::string& hash) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0')
            throw config_error("API key environment variable not set: " + config_.api_key_env);

        // split endpoint_url into host part and path prefix
        std::string url = config_.endpoint_url;
        std::size_t scheme_end = url.find("://");
        std::size_t path_start =
            scheme_end == std::string::npos ? url.find('/') : url.find('/', scheme_end + 3);
        std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
        std::string path_prefix = path_start == std::string::npos ? "" : url.substr(path_start);
        while (!path_prefix.empty() && path_prefix.back() == '/') path_prefix.pop_back();

        httplib::Client client(base);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
        client.set_bearer_token_auth(key);

        {
            std::lock_guard lock(mutex_);
            ++stats_.network_calls;
        }
        httplib::Result res = client.Post(path_prefix + "/chat/completions",
                                          chat_request_body(prompt, config_), "application/json");
        if (!res)
            throw generation_error("HTTP request failed: " + httplib::to_string(res.error()), true);
        if (res->status < 200 || res->status >= 300)
            throw generation_error("HTTP status " + std::to_string(res->status) + ": " + res->body,
                                   true);

        GenerationRecord record;
        record.prompt_hash = hash;
        record.model_name = config_.model_name;
        try {
            json j = json::parse(res->body);
            record.raw_response = j.at("choices").at(0).at("message").at("content").get<std::string>();
            if (j.contains("usage")) {
                TokenUsage u;
                u.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
                u.completion_tokens = j["usage"].value("completion_tokens", 0L);
                record.token_usage = u;
            }
        } catch (const json::exception& e) {
            throw generation_error(std::string("malformed response envelope: ") + e.what(), false);
        }
        return record;
    }
};

}  // namespace leakforge
