#include "doctalk/conversation.hpp"

#include "doctalk/common.hpp"

#include <fstream>

namespace doctalk {

nlohmann::ordered_json to_json(const Conversation& conv) {
    nlohmann::ordered_json j;
    j["conv_id"] = conv.conv_id;
    j["anchor_id"] = conv.anchor_id;
    j["source_doc_ids"] = conv.source_doc_ids;
    auto& turns = j["turns"] = nlohmann::ordered_json::array();
    for (const auto& t : conv.turns) {
        nlohmann::ordered_json turn;
        turn["turn_index"] = t.turn_index;
        turn["user"] = t.user_text;
        turn["assistant"] = t.assistant_text;
        turn["source"] = {{"doc_id", t.source.doc_id}, {"seg_index", t.source.seg_index}};
        turns.push_back(std::move(turn));
    }
    j["meta"] = {{"seed", conv.meta.seed},
                 {"scorer_id", conv.meta.scorer_id},
                 {"template_id", conv.meta.template_id},
                 {"created_at", conv.meta.created_at}};
    return j;
}

Conversation conversation_from_json(const nlohmann::json& j) {
    Conversation c;
    c.conv_id = j.at("conv_id").get<std::string>();
    c.anchor_id = j.at("anchor_id").get<std::string>();
    c.source_doc_ids = j.value("source_doc_ids", std::vector<std::string>{});
    for (const auto& t : j.at("turns")) {
        Turn turn;
        turn.turn_index = t.at("turn_index").get<std::size_t>();
        turn.user_text = t.at("user").get<std::string>();
        turn.assistant_text = t.at("assistant").get<std::string>();
        const auto& src = t.at("source");
        turn.source = {src.at("doc_id").get<std::string>(), src.at("seg_index").get<std::size_t>()};
        c.turns.push_back(std::move(turn));
    }
    if (const auto m = j.find("meta"); m != j.end() && m->is_object()) {
        c.meta.seed = m->value("seed", std::uint64_t{0});
        c.meta.scorer_id = m->value("scorer_id", std::string{});
        c.meta.template_id = m->value("template_id", std::string{});
        c.meta.created_at = m->value("created_at", std::string{});
    }
    return c;
}

std::string to_jsonl_line(const Conversation& conv) {
    return to_json(conv).dump() + "\n";
}

void for_each_conversation(const std::filesystem::path& path,
                           const std::function<void(Conversation&&)>& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open conversations file: " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        Conversation conv;
        try {
            conv = conversation_from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        fn(std::move(conv));
    }
}

std::vector<Conversation> read_conversations(const std::filesystem::path& path) {
    std::vector<Conversation> out;
    for_each_conversation(path, [&](Conversation&& c) { out.push_back(std::move(c)); });
    return out;
}

void write_conversations(const std::filesystem::path& path, const std::vector<Conversation>& convs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& c : convs) out << to_jsonl_line(c);
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace doctalk
