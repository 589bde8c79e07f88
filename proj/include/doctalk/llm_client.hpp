#pragma once

#include "doctalk/common.hpp"

#include <atomic>
#include <chrono>
#include <cstddef>
#include <semaphore>
#include <string>

namespace doctalk {

struct GenerateParams {
    int max_tokens = 128;
    double temperature = 0.0;
};

/// Text-completion endpoint. Implementations must be thread-safe; transport
/// failures surface as LlmError.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string generate(const std::string& prompt, const GenerateParams& params) = 0;
    virtual std::string id() const = 0;
};

struct HttpLlmOptions {
    std::string endpoint;
    std::chrono::milliseconds timeout{60000};
    std::size_t retries = 3;
    std::chrono::milliseconds backoff_base{500};
    std::size_t max_in_flight = 8;
    std::string model_id = "http";
    /// Sent as "Authorization: Bearer ..." when non-empty. Never logged.
    std::string api_key;
};

/// POST {endpoint}/generate {"prompt", "max_tokens", "temperature"} -> {"text"}.
class HttpLlmClient final : public LlmClient {
public:
    explicit HttpLlmClient(HttpLlmOptions options);
    std::string generate(const std::string& prompt, const GenerateParams& params) override;
    std::string id() const override { return options_.model_id; }
    std::size_t requests_sent() const { return requests_.load(); }

private:
    HttpLlmOptions options_;
    std::string host_;
    std::string base_path_;
    std::counting_semaphore<1024> in_flight_;
    std::atomic<std::size_t> requests_{0};
};

/// Service-free generator: turns the target utterance quoted in an
/// elicitation prompt into a templated question. Deterministic.
class OfflineQuestionLlm final : public LlmClient {
public:
    std::string generate(const std::string& prompt, const GenerateParams& params) override;
    std::string id() const override { return "offline"; }
};

}  // namespace doctalk
