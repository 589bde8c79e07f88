#include "doctalk/scorer.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

namespace doctalk {

std::vector<double> Scorer::score_batch(std::string_view context,
                                        const std::vector<std::string>& candidates) {
    std::vector<std::string_view> views(candidates.begin(), candidates.end());
    return score_batch(context, std::span<const std::string_view>(views));
}

namespace {

using TermFreq = std::unordered_map<std::string, double>;

TermFreq term_frequencies(std::string_view text) {
    TermFreq tf;
    for (auto w : split_whitespace(text)) tf[to_lower(w)] += 1.0;
    return tf;
}

double lexical_score(const TermFreq& a, const TermFreq& b) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    double dot = 0.0;
    std::size_t shared = 0;
    for (const auto& [word, count] : small) {
        if (auto it = large.find(word); it != large.end()) {
            ++shared;
            dot += count * it->second;
        }
    }
    auto norm = [](const TermFreq& tf) {
        double s = 0.0;
        for (const auto& [_, c] : tf) s += c * c;
        return std::sqrt(s);
    };
    const double jaccard =
        static_cast<double>(shared) / static_cast<double>(a.size() + b.size() - shared);
    const double cosine = dot / (norm(a) * norm(b));
    return std::min(1.0, 0.5 * jaccard + 0.5 * cosine + kScoreFloor);
}

TermFreq checked_tf(std::string_view text) {
    auto tf = term_frequencies(text);
    if (tf.empty()) {
        throw std::invalid_argument("lexical scorer: empty text");
    }
    return tf;
}

}  // namespace

double lexical_baseline_score(std::string_view context, std::string_view candidate) {
    return lexical_score(checked_tf(context), checked_tf(candidate));
}

std::vector<double> LexicalScorer::score_batch(std::string_view context,
                                               std::span<const std::string_view> candidates) {
    std::vector<double> out;
    out.reserve(candidates.size());
    try {
        const auto ctx = checked_tf(context);
        for (auto c : candidates) out.push_back(lexical_score(ctx, checked_tf(c)));
    } catch (const std::invalid_argument& e) {
        throw ScorerError(e.what());
    }
    return out;
}

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = endpoint.find('/', host_start);
    if (slash == std::string::npos) return {endpoint, ""};
    std::string base = endpoint.substr(slash);
    while (!base.empty() && base.back() == '/') base.pop_back();
    return {endpoint.substr(0, slash), base};
}

RemoteScorer::RemoteScorer(RemoteScorerOptions options)
    : options_(std::move(options)),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(options_.max_in_flight, 1, 1024))) {
    if (options_.endpoint.empty()) {
        throw std::invalid_argument("remote scorer: endpoint is required");
    }
    if (options_.batch_size == 0) {
        throw std::invalid_argument("remote scorer: batch_size must be positive");
    }
    std::tie(host_, base_path_) = split_endpoint(options_.endpoint);
}

bool RemoteScorer::ping() const {
    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    return static_cast<bool>(client.Get(base_path_.empty() ? "/" : base_path_));
}

std::vector<double> RemoteScorer::score_batch(std::string_view context,
                                              std::span<const std::string_view> candidates) {
    std::vector<double> out;
    out.reserve(candidates.size());
    for (std::size_t begin = 0; begin < candidates.size(); begin += options_.batch_size) {
        const auto len = std::min(options_.batch_size, candidates.size() - begin);
        const auto scores = post_chunk(context, candidates.subspan(begin, len));
        out.insert(out.end(), scores.begin(), scores.end());
    }
    return out;
}

std::vector<double> RemoteScorer::post_chunk(std::string_view context,
                                             std::span<const std::string_view> chunk) {
    nlohmann::json body;
    body["context"] = context;
    auto& cands = body["candidates"] = nlohmann::json::array();
    for (auto c : chunk) cands.push_back(c);
    const std::string payload = body.dump();

    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);

    std::string last_error;
    for (std::size_t attempt = 0; attempt <= options_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(options_.backoff_base * (1LL << std::min<std::size_t>(attempt - 1, 16)));
        }
        httplib::Result res;
        {
            in_flight_.acquire();
            ++requests_;
            res = client.Post(base_path_ + "/score", payload, "application/json");
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
            throw ScorerError("scorer returned HTTP " + std::to_string(res->status));
        }
        const auto reply = nlohmann::json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.is_object() || !reply.contains("scores") ||
            !reply["scores"].is_array()) {
            throw ProtocolError("scorer reply lacks a \"scores\" array");
        }
        const auto& scores = reply["scores"];
        if (scores.size() != chunk.size()) {
            throw ProtocolError("scorer returned " + std::to_string(scores.size()) +
                                " scores for " + std::to_string(chunk.size()) + " candidates");
        }
        std::vector<double> out;
        out.reserve(scores.size());
        for (const auto& s : scores) {
            if (!s.is_number()) throw ProtocolError("non-numeric score in scorer reply");
            out.push_back(s.get<double>());
        }
        return out;
    }
    throw ScorerError("scorer retries exhausted (" + last_error + ")");
}

}  // namespace doctalk
