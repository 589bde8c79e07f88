#include <doctest.h>

#include "doctalk/pipeline.hpp"
#include "doctalk/synthetic.hpp"
#include "test_support.hpp"

#include <fstream>
#include <sstream>

using namespace doctalk;
using doctalk::testing::FnLlm;
using doctalk::testing::FnScorer;
using doctalk::testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Mock generator: a question built from a hash of the target text.
std::string mock_question(const std::string& prompt) {
    const auto b = prompt.find("<answer>\n");
    const auto e = prompt.find("\n</answer>");
    const auto target = prompt.substr(b + 9, e - b - 9);
    return "Which detail number " + std::to_string(fnv1a64(target) % 100000) + " comes next?";
}

struct Fixture {
    TempDir dir;
    PipelineConfig config;

    explicit Fixture(std::size_t documents = 30, std::uint64_t corpus_seed = 7) {
        SyntheticCorpusOptions o;
        o.documents = documents;
        o.seed = corpus_seed;
        write_corpus_jsonl(dir / "corpus.jsonl", make_synthetic_documents(o));
        config.corpus_path = (dir / "corpus.jsonl").string();
        config.output_path = (dir / "out.jsonl").string();
        config.global_seed = 99;
        config.anchors = 10;
        config.created_at = "2024-01-01T00:00:00Z";
    }

    int run(LlmClient& llm) {
        LexicalScorer scorer;
        std::ostringstream log;
        return cmd_synthesize(config, scorer, llm, log);
    }

    nlohmann::json report() const {
        return nlohmann::json::parse(slurp(config.output_path + ".report.json"));
    }
};

}  // namespace

TEST_CASE("default config snapshot") {
    const PipelineConfig c;
    const auto j = to_json(c);
    CHECK(j["min_qrels"] == 10);
    CHECK(j["max_edges_per_doc"] == 20);
    CHECK(j["max_depth"] == 3);
    CHECK(j["n_docs"] == 3);
    CHECK(j["min_words"] == 5);
    CHECK(j["variant_max_turns"] == 30);
    CHECK(j["variant_replicas"] == 3);
    CHECK(j["history_window"] == 8);
    CHECK(j["max_attempts"] == 3);
    CHECK(j["scorer"]["kind"] == "lexical");
    CHECK(j["scorer"]["batch_size"] == 100);
    CHECK(j["llm"]["max_tokens"] == 128);
    CHECK(j["llm"]["temperature"] == 0.0);
    CHECK(j["workers"] == 1);
    CHECK(j["anchors"] == 0);
}

TEST_CASE("config JSON round trip and layering") {
    PipelineConfig c;
    c.corpus_path = "c.jsonl";
    c.global_seed = 17;
    c.scorer.kind = "remote";
    c.scorer.endpoint = "http://localhost:9000";
    c.llm.endpoint = "http://localhost:9001";
    const auto back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
    CHECK(to_json(back) == to_json(c));

    const auto partial = config_from_json(nlohmann::json::parse(R"({"n_docs": 5, "llm": {"max_tokens": 64}})"), c);
    CHECK(partial.n_docs == 5);
    CHECK(partial.llm.max_tokens == 64);
    CHECK(partial.global_seed == 17);
    CHECK(partial.llm.endpoint == "http://localhost:9001");

    TempDir dir;
    {
        std::ofstream(dir / "cfg.json") << R"({"corpus_path":"x","workers":4})";
        std::ofstream(dir / "bad.json") << "[1,2";
    }
    const auto loaded = load_config(dir / "cfg.json");
    CHECK(loaded.workers == 4);
    CHECK(loaded.min_qrels == 10);
    CHECK_THROWS(load_config(dir / "bad.json"));
    CHECK_THROWS_AS(load_config(dir / "none.json"), IoError);
}

TEST_CASE("config validation") {
    PipelineConfig c;
    c.llm.kind = "offline";
    CHECK_NOTHROW(c.validate());
    c.scorer.kind = "remote";
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.scorer.kind = "lexical";
    c.llm.kind = "http";
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.llm.kind = "offline";
    c.workers = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    std::ostringstream log;
    CHECK(cmd_synthesize(c, log) == 2);
}

TEST_CASE("ten-anchor run emits ten pure conversations") {
    Fixture f;
    FnLlm llm(mock_question);
    REQUIRE(f.run(llm) == 0);
    const auto convs = read_conversations(f.config.output_path);
    CHECK(convs.size() == 10);
    const auto rep = f.report();
    CHECK(rep["anchors_attempted"] == 10);
    CHECK(rep["conversations_emitted"] == 10);
    CHECK(rep["conversations_failed"] == 0);
    CHECK(rep["llm_calls"].get<std::size_t>() == llm.calls.load());

    const auto corpus = load_corpus(f.config.corpus_path).corpus;
    std::set<std::string> ids;
    for (const auto& c : convs) {
        ids.insert(c.conv_id);
        CHECK(c.conv_id == make_conv_id(c.anchor_id, 99));
        CHECK(c.source_doc_ids.front() == c.anchor_id);
        CHECK(c.source_doc_ids.size() <= 3);
        CHECK(purity_violations(c, corpus) == 0);
        CHECK(c.meta.created_at == "2024-01-01T00:00:00Z");
        CHECK(c.meta.scorer_id == "lexical");
        // Full traversal: every segment of the sampled documents appears once.
        std::size_t segs = 0;
        for (const auto& d : c.source_doc_ids) segs += segment_document(corpus.at(d)).size();
        CHECK(c.turns.size() == segs);
        for (std::size_t t = 0; t < c.turns.size(); ++t) CHECK(c.turns[t].turn_index == t + 1);
    }
    CHECK(ids.size() == 10);
}

TEST_CASE("rerun with the same seed is byte identical, workers or not") {
    Fixture f;
    FnLlm llm(mock_question);
    REQUIRE(f.run(llm) == 0);
    const auto first = slurp(f.config.output_path);
    REQUIRE(f.run(llm) == 0);
    CHECK(slurp(f.config.output_path) == first);
    f.config.workers = 4;
    REQUIRE(f.run(llm) == 0);
    CHECK(slurp(f.config.output_path) == first);
    f.config.global_seed = 100;
    REQUIRE(f.run(llm) == 0);
    CHECK(slurp(f.config.output_path) != first);
}

TEST_CASE("unreachable LLM fails every anchor as llm_transport with exit 0") {
    Fixture f;
    f.config.llm.kind = "http";
    f.config.llm.endpoint = "http://127.0.0.1:" + std::to_string(doctalk::testing::closed_port());
    f.config.llm.retries = 0;
    f.config.llm.timeout_ms = 500;
    std::ostringstream log;
    CHECK(cmd_synthesize(f.config, log) == 0);
    const auto rep = f.report();
    CHECK(rep["conversations_emitted"] == 0);
    CHECK(rep["conversations_failed"] == 10);
    CHECK(rep["failed_by_class"]["llm_transport"] == 10);
    CHECK(log.str().find("warning") != std::string::npos);
    CHECK(read_conversations(f.config.output_path).empty());
}

TEST_CASE("scorer outage is isolated per anchor") {
    Fixture f;
    FnLlm llm(mock_question);
    FnScorer broken([](auto, auto) -> double { throw ScorerError("down"); });
    std::ostringstream log;
    CHECK(cmd_synthesize(f.config, broken, llm, log) == 0);
    const auto rep = f.report();
    CHECK(rep["anchors_attempted"] == 10);
    CHECK(rep["failed_by_class"]["scorer"].get<std::size_t>() + rep["conversations_emitted"].get<std::size_t>() == 10);
}

TEST_CASE("validation failures are classified") {
    Fixture f;
    FnLlm llm([](const std::string&) { return "ok"; });
    REQUIRE(f.run(llm) == 0);
    const auto rep = f.report();
    CHECK(rep["failed_by_class"]["llm_validation"] == 10);
    CHECK(rep["anchors_attempted"].get<std::size_t>() ==
          rep["conversations_emitted"].get<std::size_t>() + rep["conversations_failed"].get<std::size_t>());
}

TEST_CASE("resume skips conversations already written") {
    Fixture f;
    FnLlm llm(mock_question);
    f.config.anchors = 4;
    REQUIRE(f.run(llm) == 0);
    const auto partial = slurp(f.config.output_path);
    f.config.anchors = 10;
    f.config.resume = true;
    REQUIRE(f.run(llm) == 0);
    const auto rep = f.report();
    const auto convs = read_conversations(f.config.output_path);
    std::set<std::string> ids;
    for (const auto& c : convs) ids.insert(c.conv_id);
    CHECK(ids.size() == convs.size());
    CHECK(slurp(f.config.output_path).rfind(partial, 0) == 0);
    // Resumed anchors are the ones the 4-anchor sample shares with the 10-anchor sample.
    PipelineConfig four = f.config;
    four.anchors = 4;
    const auto corpus = load_corpus(f.config.corpus_path).corpus;
    const auto a4 = select_anchors(corpus, four);
    const auto a10 = select_anchors(corpus, f.config);
    std::size_t shared = 0;
    for (const auto& a : a4) shared += std::count(a10.begin(), a10.end(), a);
    CHECK(rep["skipped_existing"] == shared);
    CHECK(rep["anchors_attempted"] == 10 - shared);
    CHECK(convs.size() == 4 + 10 - shared);
}

TEST_CASE("per-anchor seeds do not depend on the anchor set") {
    Fixture f;
    FnLlm llm(mock_question);
    f.config.anchors = 0;
    REQUIRE(f.run(llm) == 0);
    const auto all = read_conversations(f.config.output_path);
    const auto corpus = load_corpus(f.config.corpus_path).corpus;
    LexicalScorer scorer;
    for (std::size_t i = 0; i < all.size(); i += 3) {
        const auto alone = synthesize_anchor(corpus, all[i].anchor_id, f.config, scorer, llm, PromptTemplate::builtin());
        REQUIRE(alone.conversation);
        CHECK(to_jsonl_line(*alone.conversation) == to_jsonl_line(all[i]));
    }
}

TEST_CASE("anchor sampling is seeded and ordered") {
    Fixture f;
    const auto corpus = load_corpus(f.config.corpus_path).corpus;
    const auto a = select_anchors(corpus, f.config);
    CHECK(a.size() == 10);
    CHECK(a == select_anchors(corpus, f.config));
    CHECK(std::is_sorted(a.begin(), a.end()));
    f.config.anchors = 0;
    CHECK(select_anchors(corpus, f.config) == corpus.anchor_ids());
}

TEST_CASE("missing corpus is a fatal error") {
    Fixture f;
    f.config.corpus_path = (f.dir / "missing.jsonl").string();
    FnLlm llm(mock_question);
    CHECK(f.run(llm) == 1);
}
