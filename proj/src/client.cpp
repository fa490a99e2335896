#include "tsexam/client.hpp"

#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "tsexam/errors.hpp"

namespace tsexam::harness {

namespace {

// One limiter per endpoint name+url, shared by all threads of a run.
class RateLimiter {
public:
    void acquire(double requests_per_minute) {
        if (requests_per_minute <= 0.0) return;
        const auto interval = std::chrono::duration<double>(60.0 / requests_per_minute);
        std::unique_lock<std::mutex> lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        auto earliest = next_ < now ? now : next_;
        next_ = earliest + std::chrono::duration_cast<std::chrono::steady_clock::duration>(interval);
        lock.unlock();
        std::this_thread::sleep_until(earliest);
    }

private:
    std::mutex mutex_;
    std::chrono::steady_clock::time_point next_{};
};

RateLimiter& limiter_for(const ModelEndpoint& endpoint) {
    static std::mutex registry_mutex;
    static std::map<std::string, std::unique_ptr<RateLimiter>> registry;
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto& slot = registry[endpoint.name + "|" + endpoint.base_url];
    if (!slot) slot = std::make_unique<RateLimiter>();
    return *slot;
}

bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

void ModelEndpoint::validate() const {
    if (name.empty()) throw ConfigError("endpoint: name is empty");
    if (base_url.empty()) throw ConfigError("endpoint '" + name + "': base_url is empty");
    if (model.empty()) throw ConfigError("endpoint '" + name + "': model is empty");
    if (timeout_seconds <= 0) throw ConfigError("endpoint '" + name + "': timeout must be > 0");
    if (retry.max_retries < 0) throw ConfigError("endpoint '" + name + "': negative retry count");
    if (requests_per_minute < 0.0) throw ConfigError("endpoint '" + name + "': negative rate limit");
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    static const char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out.push_back(table[(v >> 6) & 63]);
        out.push_back(table[v & 63]);
    }
    if (i + 1 == bytes.size()) {
        const std::uint32_t v = bytes[i] << 16;
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out.append("==");
    } else if (i + 2 == bytes.size()) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out.push_back(table[(v >> 18) & 63]);
        out.push_back(table[(v >> 12) & 63]);
        out.push_back(table[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

Json chat_request(const ModelEndpoint& endpoint, const Prompt& prompt,
                  const PromptConfig& config) {
    Json message;
    message["role"] = "user";
    if (!prompt.has_image()) {
        message["content"] = prompt.flatten_text();
    } else {
        Json parts = Json::array();
        for (const auto& part : prompt.parts) {
            if (part.kind == PromptPart::Kind::Text) {
                parts.push_back(Json{{"type", "text"}, {"text", part.text}});
            } else {
                parts.push_back(Json{
                    {"type", "image_url"},
                    {"image_url",
                     Json{{"url", "data:image/png;base64," +
                                      base64_encode(std::span(part.png.data(), part.png.size()))}}}});
            }
        }
        message["content"] = std::move(parts);
    }

    Json j;
    j["model"] = endpoint.model;
    j["messages"] = Json::array({std::move(message)});
    j["max_tokens"] = config.max_tokens;
    j["temperature"] = config.temperature;
    j["seed"] = config.seed;
    return j;
}

RawResponse parse_chat_response(const Json& j) {
    if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array() ||
        j["choices"].empty()) {
        throw ProtocolError("chat response lacks a choices array");
    }
    const Json& first = j["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content")) {
        throw ProtocolError("chat response choice lacks message.content");
    }
    const Json& content = first["message"]["content"];
    RawResponse out;
    if (content.is_string()) {
        out.text = content.get<std::string>();
    } else if (content.is_null()) {
        out.text.clear();
    } else {
        throw ProtocolError("chat response content is neither string nor null");
    }
    if (j.contains("usage") && j["usage"].is_object()) {
        const Json& usage = j["usage"];
        if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer()) {
            out.prompt_tokens = usage["prompt_tokens"].get<std::int64_t>();
        }
        if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number_integer()) {
            out.completion_tokens = usage["completion_tokens"].get<std::int64_t>();
        }
    }
    if (j.contains("model") && j["model"].is_string()) out.model = j["model"].get<std::string>();
    return out;
}

RawResponse query_model(const ModelEndpoint& endpoint, const Prompt& prompt,
                        const PromptConfig& config) {
    endpoint.validate();
    config.validate();
    if (prompt.has_image() && !endpoint.supports_images) {
        throw CapabilityError("endpoint '" + endpoint.name +
                              "' is text-only but the prompt attaches an image");
    }

    std::string credential;
    if (!endpoint.credential_env.empty()) {
        const char* value = std::getenv(endpoint.credential_env.c_str());
        if (value == nullptr || *value == '\0') {
            throw CredentialError("environment variable '" + endpoint.credential_env +
                                  "' (credential for endpoint '" + endpoint.name +
                                  "') is not set");
        }
        credential = value;
    }

    const std::string body = chat_request(endpoint, prompt, config).dump();
    httplib::Headers headers;
    if (!credential.empty()) headers.emplace("Authorization", "Bearer " + credential);

    auto& limiter = limiter_for(endpoint);
    const auto started = std::chrono::steady_clock::now();
    std::string last_error;

    for (int attempt = 0; attempt <= endpoint.retry.max_retries; ++attempt) {
        if (attempt > 0) {
            double backoff = endpoint.retry.initial_backoff_ms;
            for (int i = 1; i < attempt; ++i) backoff *= endpoint.retry.backoff_multiplier;
            std::this_thread::sleep_for(
                std::chrono::milliseconds(static_cast<std::int64_t>(backoff)));
        }
        limiter.acquire(endpoint.requests_per_minute);

        httplib::Client client(endpoint.base_url);
        client.set_connection_timeout(endpoint.timeout_seconds, 0);
        client.set_read_timeout(endpoint.timeout_seconds, 0);
        client.set_write_timeout(endpoint.timeout_seconds, 0);

        auto result = client.Post(endpoint.path, headers, body, "application/json");
        if (!result) {
            last_error = "connection failure: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status == 401 || result->status == 403) {
            throw CredentialError("endpoint '" + endpoint.name + "' rejected the credential (HTTP " +
                                  std::to_string(result->status) + ")");
        }
        if (retryable_status(result->status)) {
            last_error = "HTTP " + std::to_string(result->status);
            continue;
        }
        if (result->status != 200) {
            throw TransportError("endpoint '" + endpoint.name + "' answered HTTP " +
                                 std::to_string(result->status));
        }

        Json reply;
        try {
            reply = Json::parse(result->body);
        } catch (const std::exception& e) {
            throw ProtocolError("endpoint '" + endpoint.name + "' returned invalid JSON: " +
                                e.what());
        }
        RawResponse out = parse_chat_response(reply);
        out.endpoint_name = endpoint.name;
        if (out.model.empty()) out.model = endpoint.model;
        out.retries = attempt;
        out.latency_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return out;
    }

    throw TransportError("endpoint '" + endpoint.name + "' failed after " +
                         std::to_string(endpoint.retry.max_retries + 1) + " attempts (" +
                         last_error + ")");
}

}  // namespace tsexam::harness
