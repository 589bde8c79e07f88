#include "doctalk/evalsuite.hpp"

#include "doctalk/common.hpp"

#include <cctype>
#include <fstream>

namespace doctalk {

JudgeSample judge_sample_from_json(const nlohmann::json& j) {
    JudgeSample s;
    s.sample_id = j.value("sample_id", std::string{});
    for (const auto& t : j.at("conversation")) {
        s.conversation.push_back({t.at("role").get<std::string>(), t.at("text").get<std::string>()});
    }
    s.system_prompt = j.value("system_prompt", std::string{});
    s.intents = j.at("intents").get<std::vector<std::string>>();
    if (s.intents.empty() || s.intents.size() > 3) {
        throw std::invalid_argument("judge sample needs 1-3 intents");
    }
    if (j.contains("response_intro") || j.contains("response_bullets")) {
        s.response_intro = j.value("response_intro", std::string{});
        s.response_bullets = j.value("response_bullets", std::vector<std::string>{});
    } else {
        auto sections = split_response(j.at("response").get<std::string>());
        s.response_intro = std::move(sections.intro);
        s.response_bullets = std::move(sections.bullets);
    }
    return s;
}

std::vector<JudgeSample> read_judge_samples(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open judge samples: " + path.string());
    std::vector<JudgeSample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            out.push_back(judge_sample_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::optional<bool> parse_yes_no(std::string_view reply) {
    const auto words = split_whitespace(reply);
    if (words.empty()) return std::nullopt;
    std::string w;
    for (char c : words.front()) {
        if (std::isalpha(static_cast<unsigned char>(c))) w += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    if (w == "YES") return true;
    if (w == "NO") return false;
    return std::nullopt;
}

std::string build_judge_prompt(const JudgeSample& sample, std::size_t intent, bool bullet_section) {
    std::string p =
        "You check whether one part of a shopping assistant's reply addresses a specific user "
        "intent.\n\n";
    p += "System prompt the assistant followed:\n" + sample.system_prompt + "\n\n";
    p += "Conversation:\n";
    for (const auto& t : sample.conversation) p += t.role + ": " + t.text + "\n";
    p += "\n";
    if (bullet_section) {
        p += "Part of the reply under review (bullet points):\n<section>\n";
        for (const auto& b : sample.response_bullets) p += "- " + b + "\n";
    } else {
        p += "Part of the reply under review (introduction paragraph):\n<section>\n";
        p += sample.response_intro + "\n";
    }
    p += "</section>\n\n";
    p += "User intent:\n" + sample.intents.at(intent) + "\n\n";
    p += "Does this part of the reply address the intent? Answer with exactly one word, YES or NO.";
    return p;
}

JudgeVerdict judge_with_llm(LlmClient& llm, const JudgeSample& sample, const GenerateParams& params) {
    JudgeVerdict v;
    const bool has_intro = !trim(sample.response_intro).empty();
    const bool has_bullets = !sample.response_bullets.empty();
    for (std::size_t i = 0; i < sample.intents.size(); ++i) {
        for (const bool bullet : {false, true}) {
            if (bullet ? !has_bullets : !has_intro) continue;
            const auto prompt = build_judge_prompt(sample, i, bullet);
            std::optional<bool> answer;
            for (int attempt = 0; attempt < 2 && !answer; ++attempt) {
                ++v.requests;
                answer = parse_yes_no(llm.generate(prompt, params));
            }
            if (!answer) ++v.unparseable;
            if (answer.value_or(false)) (bullet ? v.bullet : v.intro).insert(i);
        }
    }
    return v;
}

JudgeReport summarize_judge(std::vector<JudgeReport::Row> rows) {
    JudgeReport r;
    r.rows = std::move(rows);
    if (r.rows.empty()) return r;
    for (const auto& row : r.rows) {
        r.intro += row.metrics.intro;
        r.bullet += row.metrics.bullet;
        r.loose += row.metrics.loose;
        r.strict += row.metrics.strict;
    }
    const auto n = static_cast<double>(r.rows.size());
    r.intro /= n;
    r.bullet /= n;
    r.loose /= n;
    r.strict /= n;
    return r;
}

nlohmann::ordered_json to_json(const JudgeReport& report) {
    nlohmann::ordered_json j;
    j["samples"] = report.rows.size();
    j["intro"] = report.intro;
    j["bullet_point"] = report.bullet;
    j["loose"] = report.loose;
    j["strict"] = report.strict;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json r;
        r["sample_id"] = row.sample_id;
        r["intro"] = row.metrics.intro;
        r["bullet_point"] = row.metrics.bullet;
        r["loose"] = row.metrics.loose;
        r["strict"] = row.metrics.strict;
        r["addressed_intro"] = row.metrics.addressed_intro;
        r["addressed_bullet"] = row.metrics.addressed_bullet;
        r["unparseable"] = row.unparseable;
        rows.push_back(std::move(r));
    }
    return j;
}

}  // namespace doctalk
