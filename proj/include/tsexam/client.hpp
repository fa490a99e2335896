#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tsexam/prompt.hpp"

namespace tsexam::harness {

struct RetryPolicy {
    int max_retries = 3;           // additional attempts after the first
    int initial_backoff_ms = 250;  // doubled after every failed attempt
    double backoff_multiplier = 2.0;
};

// A chat-completion service. The credential is an environment variable NAME;
// the secret itself never appears in configs or artifacts and is read at
// request time.
struct ModelEndpoint {
    std::string name;  // candidate id used in transcripts and reports
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string credential_env;  // empty = unauthenticated endpoint
    int timeout_seconds = 60;
    RetryPolicy retry;
    double requests_per_minute = 0.0;  // 0 = unlimited
    bool supports_images = false;

    void validate() const;  // name/base_url/model nonempty, timeout > 0
};

struct RawResponse {
    std::string text;  // may legitimately be empty
    std::optional<std::int64_t> prompt_tokens;
    std::optional<std::int64_t> completion_tokens;
    double latency_seconds = 0.0;
    std::string endpoint_name;
    std::string model;
    int retries = 0;
};

// Request document in the documented chat-completion shape (single user
// message; text-only prompts flatten to one string, image prompts use typed
// content parts with base64 data URLs).
Json chat_request(const ModelEndpoint& endpoint, const Prompt& prompt, const PromptConfig& config);

// Reply text extracted from a chat-completion response document.
// Throws ProtocolError when the shape does not match.
RawResponse parse_chat_response(const Json& j);

// Sends the prompt. Checks capability (image prompt on a text-only endpoint
// is a CapabilityError) and credentials (unresolvable variable is a
// CredentialError) before any network activity. Transient failures
// (connect errors, timeouts, HTTP 429/5xx) are retried with exponential
// backoff per the policy; a shared per-endpoint limiter enforces the
// request rate across threads. Exhausted retries raise TransportError.
RawResponse query_model(const ModelEndpoint& endpoint, const Prompt& prompt,
                        const PromptConfig& config);

std::string base64_encode(std::span<const std::uint8_t> bytes);

}  // namespace tsexam::harness
