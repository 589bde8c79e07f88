#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace doctalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Raised when an external service answers with something that violates its wire contract.
class ProtocolError : public Error {
public:
    using Error::Error;
};

class ScorerError : public Error {
public:
    using Error::Error;
};

class LlmError : public Error {
public:
    using Error::Error;
};

// Random source shared by every sampler. mt19937_64 is fully specified by the
// standard; we draw uniforms ourselves so streams replay bit-exactly across
// standard library implementations.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

/// Uniform integer in [0, bound). bound must be > 0.
std::size_t uniform_index(Rng& rng, std::size_t bound);

/// Inverse-CDF draw from non-negative weights. Consumes exactly one uniform.
/// Throws std::invalid_argument if weights is empty or sums to zero.
std::size_t sample_categorical(std::span<const double> weights, Rng& rng);

/// Stable 64-bit FNV-1a hash.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Seed for an independent stream keyed by (global seed, key), e.g. one per anchor.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view key);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::size_t word_count(std::string_view s);
std::string to_lower(std::string_view s);
std::string hex64(std::uint64_t v);

/// Runs fn(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace doctalk
