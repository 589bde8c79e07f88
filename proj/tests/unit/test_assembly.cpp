#include <doctest.h>

#include "doctalk/assembly.hpp"
#include "test_support.hpp"

#include <cmath>
#include <fstream>

using namespace doctalk;
using doctalk::testing::make_doc;
using doctalk::testing::TempDir;

namespace {

UserUtterance q(const std::string& text) { return UserUtterance{text, 0, {}}; }

Conversation with_sources(const std::vector<std::string>& docs) {
    Conversation c;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        c.turns.push_back(Turn{i + 1, "What next?", "text " + std::to_string(i), SourceRef{docs[i], i}});
    }
    return c;
}

Conversation with_turns(std::size_t n, const std::string& id = "c") {
    Conversation c;
    c.conv_id = id;
    for (std::size_t i = 0; i < n; ++i) {
        c.turns.push_back(Turn{i + 1, "Why is that so?", "because of reasons " + std::to_string(i), SourceRef{"D", i}});
    }
    return c;
}

// Paragraph k of a document, cut from the blank-line-joined retained text.
std::string refetch(const CorpusHandle& corpus, const SourceRef& src) {
    const auto text = retained_text(corpus.at(src.doc_id).text, kDefaultMinWords);
    std::size_t begin = 0;
    for (std::size_t k = 0; k < src.seg_index; ++k) {
        begin = text.find("\n\n", begin);
        if (begin == std::string::npos) return {};
        begin += 2;
    }
    const auto end = text.find("\n\n", begin);
    return text.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
}

CorpusHandle small_corpus() {
    return CorpusHandle::from_documents(
        {make_doc("D1", "The bridge was first built of timber around the year 1200.\n\n"
                        "Floods destroyed it twice before the stone arches went up.\n\nShort one."),
         make_doc("D2", "A toll was charged on carts crossing until the late 1800s.\n\n"
                        "Today only pedestrians may use the old medieval crossing.")},
        0);
}

}  // namespace

TEST_CASE("three segments and three questions make turns 1..3") {
    const auto c = small_corpus();
    std::vector<Segment> segs{segment_document(c.at("D1"))[0], segment_document(c.at("D2"))[1],
                              segment_document(c.at("D1"))[1]};
    AssemblyMeta meta{"D1", {"D1", "D2"}, 42, "lexical", "builtin-v1", "2024-01-01"};
    const auto conv = assemble_conversation(
        segs, {q("When was the bridge built?"), q("Who can use it today?"), q("What happened in the floods?")},
        meta);
    REQUIRE(conv.turns.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(conv.turns[i].turn_index == i + 1);
        CHECK(conv.turns[i].assistant_text == segs[i].text);
        CHECK(conv.turns[i].assistant_text == refetch(c, conv.turns[i].source));
    }
    CHECK(conv.turns[1].source == SourceRef{"D2", 1});
    CHECK(conv.conv_id == make_conv_id("D1", 42));
    CHECK(conv.meta.created_at == "2024-01-01");
    CHECK(purity_violations(conv, c) == 0);
}

TEST_CASE("assembly rejects bad input") {
    const auto c = small_corpus();
    const auto segs = segment_document(c.at("D1"));
    AssemblyMeta meta{"D1", {"D1"}, 1, "", "", ""};
    CHECK_THROWS_AS(assemble_conversation(segs, {q("When was the bridge built?")}, meta), std::invalid_argument);
    CHECK_THROWS_AS(assemble_conversation({}, {}, meta), std::invalid_argument);
    CHECK_THROWS_AS(assemble_conversation({segs[0], segs[0]}, {q("When was it built?"), q("Why was it rebuilt?")}, meta),
                    std::invalid_argument);
    CHECK_THROWS_AS(assemble_conversation({segs[0]}, {q("no")}, meta), std::invalid_argument);
}

TEST_CASE("purity check catches edited assistant text") {
    const auto c = small_corpus();
    const auto segs = segment_document(c.at("D2"));
    auto conv = assemble_conversation(segs, {q("What was charged?"), q("Who may cross today?")},
                                      AssemblyMeta{"D2", {"D2"}, 3, "", "", ""});
    CHECK(purity_violations(conv, c) == 0);
    conv.turns[1].assistant_text += " ";
    CHECK(purity_violations(conv, c) == 1);
    conv.turns[0].source.seg_index = 9;
    CHECK(purity_violations(conv, c) == 2);
}

TEST_CASE("conv ids are deterministic per anchor and seed") {
    CHECK(make_conv_id("A", 1) == make_conv_id("A", 1));
    CHECK(make_conv_id("A", 1) != make_conv_id("B", 1));
    CHECK(make_conv_id("A", 1) != make_conv_id("A", 2));
    CHECK(make_conv_id("A", 1).rfind("dt-", 0) == 0);
}

TEST_CASE("doc shift examples") {
    CHECK(count_doc_shifts(with_sources({"D1", "D1", "D1"})) == 0);
    CHECK(count_doc_shifts(with_sources({"D1", "D3", "D6", "D6"})) == 2);
    CHECK(count_doc_shifts(with_sources({"D1", "D2", "D1", "D2"})) == 3);
    CHECK(count_doc_shifts(with_sources({})) == 0);
}

TEST_CASE("summary statistics") {
    auto s = summarize({4});
    CHECK(s.mean == 4);
    CHECK(s.std == 0);
    CHECK(s.median == 4);
    s = summarize({2, 6});
    CHECK(s.mean == 4);
    CHECK(s.median == 4);
    CHECK(s.std == 2);
    s = summarize({5, 1, 3});
    CHECK(s.median == 3);
    CHECK(s.min == 1);
    CHECK(s.max == 5);
    CHECK(s.std == doctest::Approx(std::sqrt(8.0 / 3.0)));
    CHECK_THROWS(summarize({}));
}

TEST_CASE("compute_stats examples") {
    auto st = compute_stats({with_turns(4)});
    CHECK(st.turns.mean == 4);
    CHECK(st.turns.std == 0);
    CHECK(st.turns.median == 4);
    CHECK(st.user_words.mean == 4);
    CHECK(st.assistant_words.mean == 4);

    st = compute_stats({with_turns(2), with_turns(6)});
    CHECK(st.turns.mean == 4);
    CHECK(st.turns.median == 4);
    CHECK(st.turns.std == 2);
    CHECK(st.conversation_count == 2);
    CHECK_THROWS_AS(compute_stats({}), std::invalid_argument);

    const auto j = to_json(st);
    for (const char* row : {"turns_per_conversation", "assistant_utterance_words", "user_utterance_words",
                            "doc_shifts_per_conversation"}) {
        REQUIRE(j.contains(row));
        CHECK(j[row].contains("metric"));
        CHECK(j[row]["std"].get<double>() >= 0.0);
    }
}

TEST_CASE("stats are unchanged by self-concatenation") {
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Conversation> ds;
        const auto n = 1 + uniform_index(rng, 10);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::string> docs;
            const auto turns = 1 + uniform_index(rng, 12);
            for (std::size_t t = 0; t < turns; ++t) docs.push_back("D" + std::to_string(uniform_index(rng, 3)));
            ds.push_back(with_sources(docs));
        }
        auto doubled = ds;
        doubled.insert(doubled.end(), ds.begin(), ds.end());
        const auto a = compute_stats(ds);
        const auto b = compute_stats(doubled);
        for (auto [x, y] : {std::pair{a.turns, b.turns}, std::pair{a.doc_shifts, b.doc_shifts}}) {
            CHECK(x.mean == doctest::Approx(y.mean).epsilon(1e-12));
            CHECK(x.median == y.median);
            CHECK(x.std == doctest::Approx(y.std).epsilon(1e-9));
        }
        StatsAccumulator left, right;
        for (const auto& c : ds) left.add(c);
        for (const auto& c : ds) right.add(c);
        left.merge(right);
        CHECK(left.finish().turns.median == b.turns.median);
        CHECK(left.conversations() == 2 * n);
    }
}

TEST_CASE("truncate_variant examples") {
    auto out = truncate_variant({with_turns(82, "long")});
    REQUIRE(out.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(out[r].turns.size() == 30);
        CHECK(out[r].conv_id == "long-r" + std::to_string(r));
    }
    CHECK(truncate_variant({with_turns(12)}, 30, 1)[0].turns.size() == 12);

    std::vector<Conversation> hundred;
    for (int i = 0; i < 100; ++i) hundred.push_back(with_turns(40, "c" + std::to_string(i)));
    out = truncate_variant(hundred, 30, 3);
    CHECK(out.size() == 300);
    CHECK(out[100].conv_id == "c0-r1");

    const auto twice = truncate_variant(out, 30, 3);
    CHECK(twice.size() == 900);
    for (const auto& c : twice) CHECK(c.turns.size() == 30);
    CHECK_THROWS(truncate_variant(hundred, 0, 3));
    CHECK_THROWS(truncate_variant(hundred, 30, 0));
}

TEST_CASE("conversations round trip through JSONL") {
    TempDir dir;
    const auto c = small_corpus();
    auto conv = assemble_conversation(segment_document(c.at("D2")), {q("What was charged?"), q("Who may cross today?")},
                                      AssemblyMeta{"D2", {"D2"}, 3, "lexical", "builtin-v1", "x"});
    write_conversations(dir / "o.jsonl", {conv, conv});
    const auto back = read_conversations(dir / "o.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(to_jsonl_line(back[1]) == to_jsonl_line(conv));
    const auto j = to_json(conv);
    CHECK(j["turns"][0].contains("user"));
    CHECK(j["turns"][0]["source"]["doc_id"] == "D2");
    {
        std::ofstream(dir / "bad.jsonl") << to_jsonl_line(conv) << "\n{broken\n";
    }
    CHECK_THROWS_AS(read_conversations(dir / "bad.jsonl"), Error);
}
