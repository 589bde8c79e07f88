#include "doctalk/evalsuite.hpp"

#include "doctalk/common.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>

namespace doctalk {

std::vector<std::string> normalize_answer(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (unsigned char c : text) {
        if (std::ispunct(c)) continue;
        cleaned += static_cast<char>(std::tolower(c));
    }
    std::vector<std::string> out;
    for (auto w : split_whitespace(cleaned)) {
        if (w == "a" || w == "an" || w == "the") continue;
        out.emplace_back(w);
    }
    return out;
}

namespace {

OverlapMetrics overlap_one(const std::vector<std::string>& pred, const std::vector<std::string>& ref) {
    OverlapMetrics m;
    m.answer_word_count = pred.size();
    if (pred.empty() && ref.empty()) {
        m.precision = m.recall = m.f1 = 1.0;
        return m;
    }
    if (pred.empty() || ref.empty()) return m;
    std::unordered_map<std::string_view, std::size_t> ref_counts;
    for (const auto& w : ref) ++ref_counts[w];
    std::size_t common = 0;
    for (const auto& w : pred) {
        auto it = ref_counts.find(w);
        if (it != ref_counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return m;
    m.precision = static_cast<double>(common) / static_cast<double>(pred.size());
    m.recall = static_cast<double>(common) / static_cast<double>(ref.size());
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

}  // namespace

OverlapMetrics token_overlap_prf(std::string_view pred, const std::vector<std::string>& refs) {
    if (refs.empty()) {
        throw std::invalid_argument("token_overlap_prf: no reference answers");
    }
    const auto pred_tokens = normalize_answer(pred);
    OverlapMetrics best;
    bool first = true;
    for (const auto& ref : refs) {
        const auto m = overlap_one(pred_tokens, normalize_answer(ref));
        if (first || m.f1 > best.f1) {
            best = m;
            first = false;
        }
    }
    best.answer_word_count = word_count(pred);
    return best;
}

OverlapReport turn_level_aggregate(const std::vector<std::pair<QATurnRecord, OverlapMetrics>>& records) {
    if (records.empty()) {
        throw std::invalid_argument("turn_level_aggregate: no records");
    }
    struct Sums {
        long double p = 0, r = 0, f = 0, w = 0;
        std::size_t n = 0;
        void add(const OverlapMetrics& m) {
            p += m.precision;
            r += m.recall;
            f += m.f1;
            w += static_cast<long double>(m.answer_word_count);
            ++n;
        }
        TurnAggregate mean() const {
            const auto d = static_cast<long double>(n);
            return {static_cast<double>(p / d), static_cast<double>(r / d), static_cast<double>(f / d),
                    static_cast<double>(w / d), n};
        }
    };
    std::map<std::size_t, Sums> groups;
    Sums all;
    for (const auto& [rec, m] : records) {
        groups[rec.turn_index].add(m);
        all.add(m);
    }
    OverlapReport report;
    for (const auto& [turn, sums] : groups) report.per_turn.emplace(turn, sums.mean());
    report.overall = all.mean();
    return report;
}

nlohmann::ordered_json to_json(const OverlapReport& report) {
    auto agg = [](const TurnAggregate& a) {
        nlohmann::ordered_json j;
        j["precision"] = a.precision;
        j["recall"] = a.recall;
        j["f1"] = a.f1;
        j["avg_words"] = a.answer_words;
        j["count"] = a.count;
        return j;
    };
    nlohmann::ordered_json j;
    j["overall"] = agg(report.overall);
    auto& turns = j["per_turn"] = nlohmann::ordered_json::array();
    for (const auto& [turn, a] : report.per_turn) {
        auto row = agg(a);
        row["turn_index"] = turn;
        turns.push_back(std::move(row));
    }
    return j;
}

nlohmann::ordered_json to_json(const QATurnRecord& r) {
    nlohmann::ordered_json j;
    j["dialogue_id"] = r.dialogue_id;
    j["turn_index"] = r.turn_index;
    j["question"] = r.question;
    j["reference_answers"] = r.reference_answers;
    j["model_answer"] = r.model_answer;
    return j;
}

std::vector<QATurnRecord> read_qa_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open QA records: " + path.string());
    std::vector<QATurnRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            QATurnRecord r;
            r.dialogue_id = j.at("dialogue_id").get<std::string>();
            r.turn_index = j.at("turn_index").get<std::size_t>();
            r.question = j.value("question", std::string{});
            r.reference_answers = j.at("reference_answers").get<std::vector<std::string>>();
            r.model_answer = j.at("model_answer").get<std::string>();
            if (r.reference_answers.empty() || r.turn_index < 1) {
                throw std::invalid_argument("needs turn_index >= 1 and at least one reference");
            }
            out.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<QATurnRecord> convert_coqa(const nlohmann::json& coqa) {
    std::vector<QATurnRecord> out;
    for (const auto& story : coqa.at("data")) {
        const auto id = story.at("id").get<std::string>();
        std::map<std::size_t, QATurnRecord> turns;
        for (const auto& q : story.at("questions")) {
            auto& r = turns[q.at("turn_id").get<std::size_t>()];
            r.dialogue_id = id;
            r.turn_index = q.at("turn_id").get<std::size_t>();
            r.question = q.at("input_text").get<std::string>();
        }
        auto add_answers = [&](const nlohmann::json& answers) {
            for (const auto& a : answers) {
                const auto t = a.at("turn_id").get<std::size_t>();
                if (auto it = turns.find(t); it != turns.end()) {
                    it->second.reference_answers.push_back(a.at("input_text").get<std::string>());
                }
            }
        };
        add_answers(story.at("answers"));
        if (const auto extra = story.find("additional_answers"); extra != story.end()) {
            for (const auto& [_, answers] : extra->items()) add_answers(answers);
        }
        for (auto& [_, r] : turns) {
            if (!r.reference_answers.empty()) out.push_back(std::move(r));
        }
    }
    return out;
}

namespace {

// Returns the bullet body if `line` is a bullet item.
std::optional<std::string_view> bullet_body(std::string_view line) {
    auto s = trim(line);
    for (std::string_view marker : {"- ", "* ", "• "}) {
        if (s.starts_with(marker)) return trim(s.substr(marker.size()));
    }
    if (s == "-" || s == "*" || s == "•") return std::string_view{};
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')') &&
        (i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1])))) {
        return trim(s.substr(i + 1));
    }
    return std::nullopt;
}

}  // namespace

ResponseSections split_response(std::string_view response) {
    ResponseSections out;
    enum class Phase { Intro, Bullets, Trailer } phase = Phase::Intro;
    std::vector<std::string_view> intro_lines;
    std::size_t pos = 0;
    while (pos <= response.size()) {
        std::size_t eol = response.find('\n', pos);
        if (eol == std::string_view::npos) eol = response.size();
        const auto line = response.substr(pos, eol - pos);
        pos = eol + 1;
        const auto body = bullet_body(line);
        switch (phase) {
            case Phase::Intro:
                if (body) {
                    phase = Phase::Bullets;
                    out.bullets.emplace_back(*body);
                } else {
                    intro_lines.push_back(line);
                }
                break;
            case Phase::Bullets:
                if (body) {
                    out.bullets.emplace_back(*body);
                } else if (!trim(line).empty()) {
                    phase = Phase::Trailer;
                    out.trailing.emplace_back(trim(line));
                }
                break;
            case Phase::Trailer:
                if (!trim(line).empty()) out.trailing.emplace_back(trim(line));
                break;
        }
    }
    std::string intro;
    for (std::size_t i = 0; i < intro_lines.size(); ++i) {
        if (i) intro += '\n';
        intro += intro_lines[i];
    }
    out.intro = std::string(trim(intro));
    return out;
}

double intent_coverage(const IntentSet& addressed, const IntentSet& intents) {
    if (intents.empty()) {
        throw std::invalid_argument("intent_coverage: no intents");
    }
    std::size_t hit = 0;
    for (auto a : addressed) hit += intents.count(a);
    return static_cast<double>(hit) / static_cast<double>(intents.size());
}

IntentCoverageReport judge_metrics(const IntentSet& intro, const IntentSet& bullet, const IntentSet& intents) {
    IntentSet either;
    IntentSet both;
    std::set_union(intro.begin(), intro.end(), bullet.begin(), bullet.end(), std::inserter(either, either.end()));
    std::set_intersection(intro.begin(), intro.end(), bullet.begin(), bullet.end(),
                          std::inserter(both, both.end()));
    IntentCoverageReport r;
    r.intro = intent_coverage(intro, intents);
    r.bullet = intent_coverage(bullet, intents);
    r.loose = intent_coverage(either, intents);
    r.strict = intent_coverage(both, intents);
    r.addressed_intro = intro;
    r.addressed_bullet = bullet;
    return r;
}

}  // namespace doctalk
