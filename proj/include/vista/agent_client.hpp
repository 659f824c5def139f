#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <json.hpp>

#include "vista/annotations.hpp"
#include "vista/digest.hpp"
#include "vista/frame_sampler.hpp"
#include "vista/png_io.hpp"
#include "vista/prompts.hpp"

namespace vista {

enum class Stage { scene, risk };

inline std::string_view to_string(Stage s) { return s == Stage::scene ? "scene" : "risk"; }

struct AgentRequest {
    std::string role_header;
    std::string user_text;
    std::shared_ptr<const FrameSequence> frames; // may be null for text-only tests
    Stage stage = Stage::scene;
    std::string context_tag; // clip id, for audit and quarantine attribution

    std::string frames_digest() const {
        if (!frames) return "no-frames";
        std::string bytes;
        for (const auto& f : frames->frames)
            bytes.append(reinterpret_cast<const char*>(f.rgb.data()), f.rgb.size());
        return sha256_hex(bytes);
    }

    // Stable byte representation; cache keys and determinism checks hang off this.
    std::string canonical_string() const {
        std::string out = role_header;
        out += '\x1e';
        out += user_text;
        out += '\x1e';
        out += to_string(stage);
        out += '\x1e';
        out += frames_digest();
        return out;
    }
};

struct ProviderConfig {
    std::string name;            // "mock" or a provider label
    std::string endpoint_url;    // chat-completion endpoint, full URL
    std::string model_id;
    std::string api_key_env;     // environment variable holding the key
    int max_output_tokens = 1024;
    double temperature = 0.0;    // both stages default to deterministic sampling
    double request_timeout_s = 60.0;
    int max_retries = 3;
    int backoff_initial_ms = 250;

    void validate() const {
        if (temperature < 0.0) throw std::invalid_argument("provider " + name + ": temperature < 0");
        if (max_retries < 0 || max_retries > 8)
            throw std::invalid_argument("provider " + name + ": max_retries outside [0, 8]");
        if (name != "mock" && endpoint_url.empty())
            throw std::invalid_argument("provider " + name + ": endpoint_url required");
        if (model_id.empty()) throw std::invalid_argument("provider " + name + ": model_id required");
    }
};

struct ProviderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TransientProviderError : ProviderError {
    using ProviderError::ProviderError;
};
struct AuthenticationError : ProviderError {
    using ProviderError::ProviderError;
};
struct MalformedResponseError : ProviderError {
    using ProviderError::ProviderError;
};
struct RetriesExhaustedError : ProviderError {
    RetriesExhaustedError(const std::string& context, int attempts, const std::string& last)
        : ProviderError("retries exhausted after " + std::to_string(attempts) + " attempts (" +
                        context + "): " + last),
          attempts(attempts) {}
    int attempts;
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string complete(const AgentRequest& request) = 0;
};

inline AgentRequest build_scene_prompt(std::shared_ptr<const FrameSequence> frames) {
    if (!frames || frames->frames.size() < 2)
        throw std::invalid_argument("build_scene_prompt: frame sequence missing or too short");
    AgentRequest req;
    req.role_header = prompts::kSceneSystem;
    req.user_text = prompts::scene_user_prompt(frames->frames.size(), frames->interval_s);
    req.frames = std::move(frames);
    req.stage = Stage::scene;
    req.context_tag = req.frames->clip_id;
    return req;
}

inline AgentRequest build_risk_prompt(std::shared_ptr<const FrameSequence> frames,
                                      const SceneAnnotation& scene) {
    if (!frames || frames->frames.size() < 2)
        throw std::invalid_argument("build_risk_prompt: frame sequence missing or too short");
    if (!scene.complete())
        throw std::invalid_argument("build_risk_prompt: scene annotation incomplete");
    AgentRequest req;
    req.role_header = prompts::kRiskSystem;
    req.user_text = prompts::risk_user_prompt(render_scene(scene));
    req.frames = std::move(frames);
    req.stage = Stage::risk;
    req.context_tag = req.frames->clip_id;
    return req;
}

// Retries transient failures with exponential backoff; authentication and
// malformed-response errors surface immediately, stamped with request context.
inline std::string call_with_retry(ChatProvider& provider, const AgentRequest& request,
                                   const ProviderConfig& config) {
    config.validate();
    const std::string context =
        "clip " + request.context_tag + ", stage " + std::string(to_string(request.stage));
    std::string last_error;
    const int attempts_allowed = config.max_retries + 1;
    for (int attempt = 0; attempt < attempts_allowed; ++attempt) {
        if (attempt > 0 && config.backoff_initial_ms > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config.backoff_initial_ms << (attempt - 1)));
        try {
            return provider.complete(request);
        } catch (const TransientProviderError& e) {
            last_error = e.what();
        } catch (const AuthenticationError& e) {
            throw AuthenticationError(context + ": " + e.what());
        } catch (const MalformedResponseError& e) {
            throw MalformedResponseError(context + ": " + e.what());
        }
    }
    throw RetriesExhaustedError(context, attempts_allowed, last_error);
}

// Disk-backed response cache keyed by (model, canonical request). Safe under
// concurrent read/write; an empty directory means memory-only.
class ResponseCache {
public:
    ResponseCache() = default;
    explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    static std::string key_for(const std::string& model_id, const AgentRequest& request) {
        return sha256_hex(model_id + '\x1e' + request.canonical_string());
    }

    std::optional<std::string> lookup(const std::string& key) const {
        {
            std::scoped_lock lock(mu_);
            auto it = mem_.find(key);
            if (it != mem_.end()) return it->second;
        }
        if (dir_.empty()) return std::nullopt;
        std::ifstream in(path_for(key), std::ios::binary);
        if (!in) return std::nullopt;
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::scoped_lock lock(mu_);
        mem_[key] = text;
        return text;
    }

    void store(const std::string& key, const std::string& text) {
        {
            std::scoped_lock lock(mu_);
            mem_[key] = text;
        }
        if (dir_.empty()) return;
        const auto final_path = path_for(key);
        const auto tmp_path = final_path.string() + ".tmp" + std::to_string(
            std::hash<std::thread::id>{}(std::this_thread::get_id()) & 0xffff);
        {
            std::ofstream out(tmp_path, std::ios::binary);
            out << text;
        }
        std::filesystem::rename(tmp_path, final_path);
    }

private:
    std::filesystem::path path_for(const std::string& key) const { return dir_ / (key + ".txt"); }

    std::filesystem::path dir_;
    mutable std::mutex mu_;
    mutable std::unordered_map<std::string, std::string> mem_;
};

// Serves identical (request, model) pairs from the cache; only misses reach the
// provider. provider_calls counts logical calls issued (retries not included).
class CachingExecutor {
public:
    CachingExecutor(ChatProvider& provider, ResponseCache& cache, ProviderConfig config)
        : provider_(provider), cache_(cache), config_(std::move(config)) {
        config_.validate();
    }

    std::string fetch(const AgentRequest& request) {
        const std::string key = ResponseCache::key_for(config_.model_id, request);
        if (auto hit = cache_.lookup(key)) return *hit;
        ++provider_calls_;
        std::string text = call_with_retry(provider_, request, config_);
        cache_.store(key, text);
        return text;
    }

    long provider_calls() const { return provider_calls_.load(); }
    const ProviderConfig& config() const { return config_; }

private:
    ChatProvider& provider_;
    ResponseCache& cache_;
    ProviderConfig config_;
    std::atomic<long> provider_calls_{0};
};

namespace detail {

inline std::string base64_encode(std::string_view data) {
    static const char* table = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    size_t i = 0;
    while (i + 3 <= data.size()) {
        const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                           (static_cast<unsigned char>(data[i + 1]) << 8) |
                           static_cast<unsigned char>(data[i + 2]);
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out.push_back(table[(v >> 6) & 63]);
        out.push_back(table[v & 63]);
        i += 3;
    }
    const size_t rem = data.size() - i;
    if (rem == 1) {
        const unsigned v = static_cast<unsigned char>(data[i]) << 16;
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out += "==";
    } else if (rem == 2) {
        const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                           (static_cast<unsigned char>(data[i + 1]) << 8);
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out.push_back(table[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

struct SplitUrl {
    std::string base; // scheme://host[:port]
    std::string path; // leading '/'
};

inline SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw std::invalid_argument("endpoint_url must include a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace detail

// Chat-completion wire client: authenticated POST carrying a system message and a
// user message whose content interleaves the prompt text with base64 PNG frames.
class HttpChatProvider final : public ChatProvider {
public:
    explicit HttpChatProvider(ProviderConfig config) : config_(std::move(config)) {
        config_.validate();
    }

    std::string complete(const AgentRequest& request) override {
        const char* key = config_.api_key_env.empty() ? nullptr
                                                      : std::getenv(config_.api_key_env.c_str());
        if (!key || !*key)
            throw AuthenticationError("provider " + config_.name + ": no key in $" +
                                      config_.api_key_env);
        const auto url = detail::split_url(config_.endpoint_url);
        httplib::Client client(url.base);
        client.set_connection_timeout(static_cast<time_t>(config_.request_timeout_s));
        client.set_read_timeout(static_cast<time_t>(config_.request_timeout_s));

        const std::string body = build_body(request).dump();
        httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
        auto res = client.Post(url.path, headers, body, "application/json");
        if (!res)
            throw TransientProviderError("provider " + config_.name + ": connection error " +
                                         httplib::to_string(res.error()));
        if (res->status == 401 || res->status == 403)
            throw AuthenticationError("provider " + config_.name + ": HTTP " +
                                      std::to_string(res->status));
        if (res->status == 408 || res->status == 429 || res->status >= 500)
            throw TransientProviderError("provider " + config_.name + ": HTTP " +
                                         std::to_string(res->status));
        if (res->status != 200)
            throw ProviderError("provider " + config_.name + ": HTTP " +
                                std::to_string(res->status));
        return extract_content(res->body);
    }

    nlohmann::ordered_json build_body(const AgentRequest& request) const {
        nlohmann::ordered_json body;
        body["model"] = config_.model_id;
        body["temperature"] = config_.temperature;
        body["max_tokens"] = config_.max_output_tokens;
        nlohmann::ordered_json user_content = nlohmann::ordered_json::array();
        user_content.push_back({{"type", "text"}, {"text", request.user_text}});
        if (request.frames) {
            for (const auto& frame : request.frames->frames) {
                user_content.push_back(
                    {{"type", "image_url"},
                     {"image_url",
                      {{"url", "data:image/png;base64," + detail::base64_encode(encode_png(frame))}}}});
            }
        }
        body["messages"] = nlohmann::ordered_json::array(
            {{{"role", "system"}, {"content", request.role_header}},
             {{"role", "user"}, {"content", user_content}}});
        return body;
    }

    std::string extract_content(const std::string& response_body) const {
        try {
            const auto j = nlohmann::json::parse(response_body);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw MalformedResponseError("provider " + config_.name +
                                         ": unexpected response shape: " + e.what());
        }
    }

private:
    ProviderConfig config_;
};

} // namespace vista
