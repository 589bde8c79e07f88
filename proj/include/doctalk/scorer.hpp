#pragma once

#include "doctalk/common.hpp"

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace doctalk {

/// Conversational-reward scorer: how well does each candidate follow `context`
/// as the assistant's next utterance. Implementations must be thread-safe.
class Scorer {
public:
    virtual ~Scorer() = default;

    /// One score per candidate, same order. Throws ScorerError on failure.
    virtual std::vector<double> score_batch(std::string_view context,
                                            std::span<const std::string_view> candidates) = 0;

    virtual std::string id() const = 0;

    std::vector<double> score_batch(std::string_view context,
                                    const std::vector<std::string>& candidates);
};

inline constexpr double kScoreFloor = 1e-6;

/// 0.5 * Jaccard(word sets) + 0.5 * cosine(tf vectors) + 1e-6, capped at 1.
/// Words are lowercased whitespace tokens. Throws std::invalid_argument on
/// empty input.
double lexical_baseline_score(std::string_view context, std::string_view candidate);

/// Offline stand-in for the neural CR model.
class LexicalScorer final : public Scorer {
public:
    using Scorer::score_batch;
    std::vector<double> score_batch(std::string_view context,
                                    std::span<const std::string_view> candidates) override;
    std::string id() const override { return "lexical"; }
};

struct RemoteScorerOptions {
    std::string endpoint;  // scheme://host:port[/base]
    std::size_t batch_size = 100;
    std::chrono::milliseconds timeout{30000};
    std::size_t retries = 3;
    std::chrono::milliseconds backoff_base{200};
    std::size_t max_in_flight = 8;
};

/// HTTP client for a scoring service:
/// POST {endpoint}/score {"context", "candidates"} -> {"scores": [...]}.
class RemoteScorer final : public Scorer {
public:
    explicit RemoteScorer(RemoteScorerOptions options);

    using Scorer::score_batch;
    std::vector<double> score_batch(std::string_view context,
                                    std::span<const std::string_view> candidates) override;
    std::string id() const override { return "remote:" + options_.endpoint; }

    /// Number of HTTP requests issued so far, retries included.
    std::size_t requests_sent() const { return requests_.load(); }

    /// True if the endpoint answers at all (any HTTP status).
    bool ping() const;

private:
    std::vector<double> post_chunk(std::string_view context,
                                   std::span<const std::string_view> chunk);

    RemoteScorerOptions options_;
    std::string host_;
    std::string base_path_;
    std::counting_semaphore<1024> in_flight_;
    std::atomic<std::size_t> requests_{0};
};

/// Decorator counting calls and pair evaluations.
class CountingScorer final : public Scorer {
public:
    explicit CountingScorer(Scorer& inner) : inner_(inner) {}

    using Scorer::score_batch;
    std::vector<double> score_batch(std::string_view context,
                                    std::span<const std::string_view> candidates) override {
        ++calls_;
        pairs_ += candidates.size();
        return inner_.score_batch(context, candidates);
    }
    std::string id() const override { return inner_.id(); }

    std::size_t calls() const { return calls_.load(); }
    std::size_t pairs() const { return pairs_.load(); }

private:
    Scorer& inner_;
    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> pairs_{0};
};

/// Splits "http://host:port/base" into ("http://host:port", "/base").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint);

}  // namespace doctalk
