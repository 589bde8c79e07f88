#include "doctalk/assembly.hpp"

#include "doctalk/common.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace doctalk {

std::string make_conv_id(const std::string& anchor_id, std::uint64_t global_seed) {
    return "dt-" + hex64(derive_seed(global_seed, "conv:" + anchor_id));
}

Conversation assemble_conversation(const std::vector<Segment>& ordered_segments,
                                   const std::vector<UserUtterance>& user_utterances,
                                   const AssemblyMeta& meta) {
    if (ordered_segments.empty()) {
        throw std::invalid_argument("assemble_conversation: no segments");
    }
    if (ordered_segments.size() != user_utterances.size()) {
        throw std::invalid_argument("assemble_conversation: " + std::to_string(ordered_segments.size()) +
                                    " segments but " + std::to_string(user_utterances.size()) +
                                    " user utterances");
    }
    Conversation conv;
    conv.conv_id = make_conv_id(meta.anchor_id, meta.global_seed);
    conv.anchor_id = meta.anchor_id;
    conv.source_doc_ids = meta.source_doc_ids;
    conv.meta = {meta.global_seed, meta.scorer_id, meta.template_id, meta.created_at};
    conv.turns.reserve(ordered_segments.size());

    std::set<SourceRef> sources;
    for (std::size_t i = 0; i < ordered_segments.size(); ++i) {
        const auto& seg = ordered_segments[i];
        const auto& user = user_utterances[i];
        SourceRef src{seg.doc_id, seg.seg_index};
        if (!sources.insert(src).second) {
            throw std::invalid_argument("assemble_conversation: duplicate source " + seg.doc_id + "#" +
                                        std::to_string(seg.seg_index));
        }
        if (!validate_user_utterance(user.text, seg.text).empty()) {
            throw std::invalid_argument("assemble_conversation: invalid user utterance at turn " +
                                        std::to_string(i + 1));
        }
        conv.turns.push_back(Turn{i + 1, user.text, seg.text, std::move(src)});
        if (conv.turns.back().assistant_text != seg.text) {
            throw std::logic_error("purity violation: assistant text diverged from its source segment");
        }
    }
    return conv;
}

std::size_t count_doc_shifts(const Conversation& conv) {
    std::size_t shifts = 0;
    for (std::size_t i = 1; i < conv.turns.size(); ++i) {
        if (conv.turns[i].source.doc_id != conv.turns[i - 1].source.doc_id) ++shifts;
    }
    return shifts;
}

std::size_t purity_violations(const Conversation& conv, const CorpusHandle& corpus,
                              std::size_t min_words) {
    std::unordered_map<std::string, std::vector<Segment>> cache;
    std::size_t bad = 0;
    for (const auto& turn : conv.turns) {
        const auto* doc = corpus.find(turn.source.doc_id);
        if (!doc) {
            ++bad;
            continue;
        }
        auto it = cache.find(doc->doc_id);
        if (it == cache.end()) it = cache.emplace(doc->doc_id, segment_document(*doc, min_words)).first;
        const auto& segs = it->second;
        if (turn.source.seg_index >= segs.size() || segs[turn.source.seg_index].text != turn.assistant_text) {
            ++bad;
        }
    }
    return bad;
}

SummaryStats summarize(std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("summarize: empty sample");
    }
    SummaryStats s;
    s.count = values.size();
    long double sum = 0.0L;
    for (double v : values) sum += v;
    s.mean = static_cast<double>(sum / values.size());
    long double sq = 0.0L;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(static_cast<double>(sq / values.size()));
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    const std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
    return s;
}

void StatsAccumulator::add(const Conversation& conv) {
    turns_.push_back(static_cast<double>(conv.turns.size()));
    doc_shifts_.push_back(static_cast<double>(count_doc_shifts(conv)));
    for (const auto& t : conv.turns) {
        assistant_words_.push_back(static_cast<double>(word_count(t.assistant_text)));
        user_words_.push_back(static_cast<double>(word_count(t.user_text)));
    }
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
    auto append = [](std::vector<double>& dst, const std::vector<double>& src) {
        dst.insert(dst.end(), src.begin(), src.end());
    };
    append(turns_, other.turns_);
    append(assistant_words_, other.assistant_words_);
    append(user_words_, other.user_words_);
    append(doc_shifts_, other.doc_shifts_);
}

CorpusStats StatsAccumulator::finish() const {
    if (turns_.empty()) {
        throw std::invalid_argument("compute_stats: empty dataset");
    }
    CorpusStats stats;
    stats.conversation_count = turns_.size();
    stats.turns = summarize(turns_);
    stats.assistant_words = summarize(assistant_words_);
    stats.user_words = summarize(user_words_);
    stats.doc_shifts = summarize(doc_shifts_);
    return stats;
}

CorpusStats compute_stats(const std::vector<Conversation>& dataset) {
    StatsAccumulator acc;
    for (const auto& c : dataset) acc.add(c);
    return acc.finish();
}

nlohmann::ordered_json to_json(const CorpusStats& stats) {
    auto row = [](const char* metric, const SummaryStats& s) {
        nlohmann::ordered_json r;
        r["metric"] = metric;
        r["mean"] = s.mean;
        r["std"] = s.std;
        r["median"] = s.median;
        r["min"] = s.min;
        r["max"] = s.max;
        r["count"] = s.count;
        return r;
    };
    nlohmann::ordered_json j;
    j["conversation_count"] = stats.conversation_count;
    j["turns_per_conversation"] = row("# turns per conversation", stats.turns);
    j["assistant_utterance_words"] = row("Asst Utterance Length (# words)", stats.assistant_words);
    j["user_utterance_words"] = row("User Utterance Length (# words)", stats.user_words);
    j["doc_shifts_per_conversation"] = row("# Doc Shifts per conversation", stats.doc_shifts);
    return j;
}

std::vector<Conversation> truncate_variant(const std::vector<Conversation>& dataset,
                                           std::size_t max_turns, std::size_t replicas) {
    if (max_turns < 1 || replicas < 1) {
        throw std::invalid_argument("truncate_variant: max_turns and replicas must be >= 1");
    }
    std::vector<Conversation> out;
    out.reserve(dataset.size() * replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
        for (const auto& conv : dataset) {
            Conversation c = conv;
            if (c.turns.size() > max_turns) c.turns.resize(max_turns);
            c.conv_id += "-r" + std::to_string(r);
            out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace doctalk
