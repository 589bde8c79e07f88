#include "doctalk/llm_client.hpp"

#include "doctalk/scorer.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <thread>

namespace doctalk {

HttpLlmClient::HttpLlmClient(HttpLlmOptions options)
    : options_(std::move(options)),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(options_.max_in_flight, 1, 1024))) {
    if (options_.endpoint.empty()) {
        throw std::invalid_argument("llm client: endpoint is required");
    }
    std::tie(host_, base_path_) = split_endpoint(options_.endpoint);
}

std::string HttpLlmClient::generate(const std::string& prompt, const GenerateParams& params) {
    const nlohmann::json body{{"prompt", prompt},
                              {"max_tokens", params.max_tokens},
                              {"temperature", params.temperature}};
    const std::string payload = body.dump();

    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    httplib::Headers headers;
    if (!options_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + options_.api_key);
    }

    std::string last_error;
    for (std::size_t attempt = 0; attempt <= options_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(options_.backoff_base * (1LL << std::min<std::size_t>(attempt - 1, 16)));
        }
        httplib::Result res;
        {
            in_flight_.acquire();
            ++requests_;
            res = client.Post(base_path_ + "/generate", headers, payload, "application/json");
            in_flight_.release();
        }
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500 || res->status == 429) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw LlmError("llm returned HTTP " + std::to_string(res->status));
        }
        const auto reply = nlohmann::json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.is_object() || !reply.contains("text") ||
            !reply["text"].is_string()) {
            throw ProtocolError("llm reply lacks a \"text\" string");
        }
        return reply["text"].get<std::string>();
    }
    throw LlmError("llm retries exhausted (" + last_error + ")");
}

std::string OfflineQuestionLlm::generate(const std::string& prompt, const GenerateParams&) {
    std::string_view target = prompt;
    const auto open = prompt.rfind("<answer>");
    const auto close = prompt.rfind("</answer>");
    if (open != std::string::npos && close != std::string::npos && close > open) {
        target = std::string_view(prompt).substr(open + 8, close - open - 8);
    }
    std::string topic;
    std::size_t taken = 0;
    for (auto word : split_whitespace(target)) {
        std::string cleaned;
        for (char c : word) {
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '\'') cleaned += c;
        }
        if (cleaned.empty()) continue;
        if (!topic.empty()) topic += ' ';
        topic += cleaned;
        if (++taken == 6) break;
    }
    if (topic.empty()) return "Can you tell me more about this topic?";
    return "What can you tell me about " + topic + "?";
}

}  // namespace doctalk
