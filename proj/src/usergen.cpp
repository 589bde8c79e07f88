#include "doctalk/usergen.hpp"

#include <algorithm>
#include <iterator>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace doctalk {

namespace {

constexpr std::string_view kBuiltinTemplate =
    "You write the user's next question in an information-seeking dialogue between a curious "
    "user and a knowledgeable assistant.\n"
    "\n"
    "{history}"
    "The assistant's next reply is:\n"
    "<answer>\n"
    "{target}\n"
    "</answer>\n"
    "\n"
    "Write the one question the user asked that this reply answers.\n"
    "- Output a single standalone question and nothing else.\n"
    "- Do not quote the reply verbatim.\n"
    "- No preamble, labels, or quotation marks.\n"
    "\n"
    "Question:";

constexpr std::string_view kCueWords[] = {
    "what",    "who",      "whom",     "whose",  "which",   "when",    "where",   "why",
    "how",     "is",       "are",      "was",    "were",    "do",      "does",    "did",
    "can",     "could",    "would",    "should", "will",    "shall",   "has",     "have",
    "had",     "may",      "might",    "tell",   "describe", "explain", "give",   "list",
    "share",   "summarize", "show",    "please", "name",    "provide", "walk",    "outline",
    "compare", "discuss",  "elaborate", "identify"};

std::string render_history(const std::vector<HistoryTurn>& history, std::size_t window) {
    if (history.empty() || window == 0) return {};
    const std::size_t first = history.size() > window ? history.size() - window : 0;
    std::string out = "Conversation so far:\n";
    for (std::size_t i = first; i < history.size(); ++i) {
        out += "User: " + history[i].user + "\n";
        out += "Assistant: " + history[i].assistant + "\n";
    }
    out += "\n";
    return out;
}

// Lowercased tokens with leading/trailing punctuation removed.
std::vector<std::string> leak_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (auto w : split_whitespace(text)) {
        std::size_t b = 0;
        std::size_t e = w.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(w[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(w[e - 1]))) --e;
        if (e > b) out.push_back(to_lower(w.substr(b, e - b)));
    }
    return out;
}

std::string ngram_key(const std::vector<std::string>& toks, std::size_t begin, std::size_t n) {
    std::string key;
    for (std::size_t i = begin; i < begin + n; ++i) {
        key += toks[i];
        key += '\x1f';
    }
    return key;
}

bool leaks_target(std::string_view text, std::string_view target) {
    const auto q = leak_tokens(text);
    const auto t = leak_tokens(target);
    if (q.size() < kLeakSpanWords || t.size() < kLeakSpanWords) return false;
    std::unordered_set<std::string> spans;
    for (std::size_t i = 0; i + kLeakSpanWords <= t.size(); ++i) spans.insert(ngram_key(t, i, kLeakSpanWords));
    for (std::size_t i = 0; i + kLeakSpanWords <= q.size(); ++i) {
        if (spans.count(ngram_key(q, i, kLeakSpanWords))) return true;
    }
    return false;
}

std::string join_violations(const std::vector<Violation>& vs) {
    std::string out;
    for (auto v : vs) {
        if (!out.empty()) out += ", ";
        out += to_string(v);
    }
    return out;
}

bool strip_pair(std::string_view& s, std::string_view open, std::string_view close) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
        s = trim(s.substr(open.size(), s.size() - open.size() - close.size()));
        return true;
    }
    return false;
}

}  // namespace

PromptTemplate PromptTemplate::builtin() {
    return {"builtin-v1", std::string(kBuiltinTemplate)};
}

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open template: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    PromptTemplate t{path.stem().string(), ss.str()};
    if (t.text.find("{target}") == std::string::npos) {
        throw std::invalid_argument("template lacks a {target} placeholder: " + path.string());
    }
    return t;
}

std::string build_elicitation_prompt(const GenerationRequest& req, const PromptTemplate& tmpl,
                                     std::size_t history_window) {
    // Single left-to-right pass so substituted text is never re-expanded.
    static constexpr std::string_view kHistory = "{history}";
    static constexpr std::string_view kTarget = "{target}";
    const std::string_view src = tmpl.text;
    std::string out;
    out.reserve(src.size() + req.target_assistant_text.size() + 512);
    std::size_t i = 0;
    while (i < src.size()) {
        const auto rest = src.substr(i);
        if (rest.starts_with(kHistory)) {
            out += render_history(req.history, history_window);
            i += kHistory.size();
        } else if (rest.starts_with(kTarget)) {
            out += req.target_assistant_text;
            i += kTarget.size();
        } else {
            out += src[i++];
        }
    }
    return out;
}

std::string postprocess_response(std::string_view raw) {
    auto s = trim(raw);
    if (const auto nl = s.find_first_of("\r\n"); nl != std::string_view::npos) {
        s = trim(s.substr(0, nl));
    }
    for (std::string_view label : {"Question:", "question:", "User:", "Q:"}) {
        if (s.starts_with(label)) {
            s = trim(s.substr(label.size()));
            break;
        }
    }
    strip_pair(s, "\"", "\"") || strip_pair(s, "'", "'") || strip_pair(s, "“", "”") ||
        strip_pair(s, "`", "`");
    return std::string(s);
}

std::string_view to_string(Violation v) {
    switch (v) {
        case Violation::Empty: return "empty";
        case Violation::TooShort: return "too_short";
        case Violation::TooLong: return "too_long";
        case Violation::NotAQuestion: return "not_a_question";
        case Violation::Leakage: return "leakage";
    }
    return "unknown";
}

std::vector<Violation> validate_user_utterance(std::string_view text, std::string_view target) {
    const auto t = trim(text);
    if (t.empty()) return {Violation::Empty};
    std::vector<Violation> out;
    const auto words = word_count(t);
    if (words < kMinUserWords) out.push_back(Violation::TooShort);
    if (words > kMaxUserWords) out.push_back(Violation::TooLong);

    bool question = t.ends_with('?');
    if (!question) {
        const auto toks = leak_tokens(t);
        question = !toks.empty() &&
                   std::find(std::begin(kCueWords), std::end(kCueWords), toks.front()) != std::end(kCueWords);
    }
    if (!question) out.push_back(Violation::NotAQuestion);
    if (leaks_target(t, target)) out.push_back(Violation::Leakage);
    return out;
}

UserUtterance generate_user_utterance(LlmClient& llm, const GenerationRequest& req,
                                      const PromptTemplate& tmpl, const UsergenOptions& options) {
    if (trim(req.target_assistant_text).empty()) {
        throw std::invalid_argument("generation request has an empty target");
    }
    const std::size_t max_attempts = std::max<std::size_t>(1, options.max_attempts);
    const std::string base_prompt = build_elicitation_prompt(req, tmpl, options.history_window);
    std::string prompt = base_prompt;
    std::vector<Violation> last;
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        std::string raw;
        try {
            raw = llm.generate(prompt, options.params);
        } catch (const Error& e) {
            throw TurnError(TurnError::Kind::Transport, e.what(), attempt);
        }
        auto text = postprocess_response(raw);
        last = validate_user_utterance(text, req.target_assistant_text);
        if (last.empty()) {
            return UserUtterance{std::move(text), 0,
                                 GenerationMeta{llm.id(), attempt,
                                                req.history.size() > options.history_window}};
        }
        prompt = base_prompt + "\n\nYour previous answer was rejected (" + join_violations(last) +
                 "). Reply with one standalone question of " + std::to_string(kMinUserWords) + " to " +
                 std::to_string(kMaxUserWords) + " words.\n\nQuestion:";
    }
    throw TurnError(TurnError::Kind::Validation,
                    "user utterance failed validation after " + std::to_string(max_attempts) +
                        " attempts: " + join_violations(last),
                    max_attempts);
}

}  // namespace doctalk
