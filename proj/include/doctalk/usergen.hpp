#pragma once

#include "doctalk/llm_client.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace doctalk {

inline constexpr std::size_t kDefaultHistoryWindow = 8;
inline constexpr std::size_t kDefaultMaxAttempts = 3;
inline constexpr std::size_t kMinUserWords = 3;
inline constexpr std::size_t kMaxUserWords = 60;
inline constexpr std::size_t kLeakSpanWords = 15;

/// Prompt template with {history} and {target} placeholders.
struct PromptTemplate {
    std::string id;
    std::string text;

    static PromptTemplate builtin();
    /// Reads a plain-text template; its id is the file stem.
    static PromptTemplate from_file(const std::filesystem::path& path);
};

struct HistoryTurn {
    std::string user;
    std::string assistant;
};

struct GenerationRequest {
    std::vector<HistoryTurn> history;  // oldest first
    std::string target_assistant_text;
    std::string template_id;
};

struct GenerationMeta {
    std::string model_id;
    std::size_t attempt_count = 0;
    bool truncated_history = false;
};

struct UserUtterance {
    std::string text;
    std::size_t turn_index = 0;
    GenerationMeta meta;
};

struct UsergenOptions {
    std::size_t history_window = kDefaultHistoryWindow;
    std::size_t max_attempts = kDefaultMaxAttempts;
    GenerateParams params;
};

/// Renders the template with the last `history_window` turns and the target.
/// An empty history renders no history block at all. Pure.
std::string build_elicitation_prompt(const GenerationRequest& req, const PromptTemplate& tmpl,
                                     std::size_t history_window = kDefaultHistoryWindow);

/// Trims, strips wrapping quotes, and keeps only the first non-empty line.
std::string postprocess_response(std::string_view raw);

enum class Violation { Empty, TooShort, TooLong, NotAQuestion, Leakage };

std::string_view to_string(Violation v);

/// Empty list means the utterance is acceptable.
std::vector<Violation> validate_user_utterance(std::string_view text, std::string_view target_assistant_text);

/// Why a turn could not be generated.
class TurnError : public Error {
public:
    enum class Kind { Transport, Validation };
    TurnError(Kind kind, const std::string& what, std::size_t attempts)
        : Error(what), kind(kind), attempts(attempts) {}
    Kind kind;
    std::size_t attempts;
};

/// Asks the LLM for the question that elicits the target utterance, retrying
/// with the violations appended until it validates or attempts run out.
UserUtterance generate_user_utterance(LlmClient& llm, const GenerationRequest& req,
                                      const PromptTemplate& tmpl, const UsergenOptions& options = {});

}  // namespace doctalk
