#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace doctalk {

struct SourceRef {
    std::string doc_id;
    std::size_t seg_index = 0;

    friend bool operator==(const SourceRef&, const SourceRef&) = default;
    friend auto operator<=>(const SourceRef&, const SourceRef&) = default;
};

struct Turn {
    std::size_t turn_index = 1;
    std::string user_text;
    std::string assistant_text;
    SourceRef source;
};

struct ConversationMeta {
    std::uint64_t seed = 0;
    std::string scorer_id;
    std::string template_id;
    std::string created_at;
};

struct Conversation {
    std::string conv_id;
    std::string anchor_id;
    std::vector<std::string> source_doc_ids;
    std::vector<Turn> turns;
    ConversationMeta meta;
};

/// Field layout of one output line:
/// {"conv_id", "anchor_id", "source_doc_ids", "turns": [{"turn_index", "user",
///  "assistant", "source": {"doc_id", "seg_index"}}], "meta"}.
nlohmann::ordered_json to_json(const Conversation& conv);
Conversation conversation_from_json(const nlohmann::json& j);

std::string to_jsonl_line(const Conversation& conv);

/// Streams conversations from a JSONL file. A malformed line throws an Error
/// naming the file and line number.
void for_each_conversation(const std::filesystem::path& path,
                           const std::function<void(Conversation&&)>& fn);
std::vector<Conversation> read_conversations(const std::filesystem::path& path);
void write_conversations(const std::filesystem::path& path, const std::vector<Conversation>& convs);

}  // namespace doctalk
