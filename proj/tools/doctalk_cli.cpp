// doctalk: command-line front end for the dialogue synthesis pipeline and its
// evaluation harnesses. Run `doctalk --help` for the subcommand list.

#include "doctalk/assembly.hpp"
#include "doctalk/corpus.hpp"
#include "doctalk/docgraph.hpp"
#include "doctalk/evalsuite.hpp"
#include "doctalk/pipeline.hpp"
#include "doctalk/reward.hpp"
#include "doctalk/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace doctalk;

void write_json(const std::string& path, const nlohmann::ordered_json& j) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
}

struct ScorerFlags {
    std::string kind = "lexical";
    std::string endpoint;
    std::size_t batch_size = 100;

    void attach(CLI::App* app) {
        app->add_option("--scorer", kind, "Scorer kind")->check(CLI::IsMember({"lexical", "remote"}));
        app->add_option("--scorer-endpoint", endpoint, "Scoring service base URL");
        app->add_option("--scorer-batch", batch_size, "Candidates per scoring request");
    }
    std::unique_ptr<Scorer> make() const {
        ScorerConfig c;
        c.kind = kind;
        c.endpoint = endpoint;
        c.batch_size = batch_size;
        return make_scorer(c);
    }
};

int run_ingest_check(const std::string& corpus, const std::string& qrels, std::size_t min_qrels,
                     std::size_t min_words, const std::string& out) {
    LoadOptions opt;
    opt.min_qrels = min_qrels;
    if (!qrels.empty()) opt.qrels_path = qrels;
    const auto loaded = load_corpus(corpus, opt);
    std::size_t unusable = 0;
    std::size_t segments = 0;
    for (const auto& d : loaded.corpus.documents()) {
        const auto n = segment_document(d, min_words).size();
        segments += n;
        if (n == 0) ++unusable;
    }
    nlohmann::ordered_json j;
    j["documents"] = loaded.corpus.size();
    j["anchors"] = loaded.corpus.anchor_ids().size();
    j["min_qrels"] = min_qrels;
    j["lines_read"] = loaded.report.lines_read;
    j["skipped_lines"] = loaded.report.skipped_lines;
    j["duplicate_ids"] = loaded.report.duplicate_ids;
    j["dropped_outlinks"] = loaded.report.dropped_outlinks;
    j["qrels_merged"] = loaded.report.qrels_merged;
    j["segments"] = segments;
    j["unusable_documents"] = unusable;
    auto& errs = j["errors"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < loaded.report.errors.size() && i < 50; ++i) {
        errs.push_back({{"line", loaded.report.errors[i].line}, {"message", loaded.report.errors[i].message}});
    }
    write_json(out, j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"doctalk - synthesize multi-turn dialogues from linked documents"};
    app.require_subcommand(1);

    // synthesize
    auto* synth = app.add_subcommand("synthesize", "Run the full three-stage pipeline");
    std::string config_path;
    std::optional<std::string> corpus_flag, out_flag, anchors_flag, created_at_flag, report_flag;
    std::optional<std::uint64_t> seed_flag;
    std::optional<std::size_t> workers_flag;
    std::optional<std::string> scorer_kind, scorer_endpoint, llm_kind, llm_endpoint;
    bool resume_flag = false;
    synth->add_option("--config", config_path, "JSON config file");
    synth->add_option("--corpus", corpus_flag, "Corpus JSONL");
    synth->add_option("--seed", seed_flag, "Global seed");
    synth->add_option("--anchors", anchors_flag, "Number of anchors to sample, or 'all'");
    synth->add_option("--workers", workers_flag, "Worker threads");
    synth->add_option("--out", out_flag, "Output JSONL");
    synth->add_option("--report", report_flag, "Run report path (default <out>.report.json)");
    synth->add_option("--created-at", created_at_flag, "Timestamp recorded in conversation meta");
    synth->add_option("--scorer", scorer_kind, "lexical | remote");
    synth->add_option("--scorer-endpoint", scorer_endpoint, "Scoring service base URL");
    synth->add_option("--llm", llm_kind, "http | offline");
    synth->add_option("--llm-endpoint", llm_endpoint, "Generation service base URL");
    synth->add_flag("--resume", resume_flag, "Skip conv_ids already present in the output");

    // ingest-check
    auto* ingest = app.add_subcommand("ingest-check", "Validate a corpus and report anchor counts");
    std::string ic_corpus, ic_qrels, ic_out;
    std::size_t ic_min_qrels = 10, ic_min_words = kDefaultMinWords;
    ingest->add_option("--corpus", ic_corpus, "Corpus JSONL")->required();
    ingest->add_option("--qrels", ic_qrels, "Optional TREC-style qrels file");
    ingest->add_option("--min-qrels", ic_min_qrels, "Anchor filter threshold");
    ingest->add_option("--min-words", ic_min_words, "Minimum words per paragraph");
    ingest->add_option("--out", ic_out, "Report path (default stdout)");

    // stats
    auto* stats = app.add_subcommand("stats", "Corpus statistics over a conversation JSONL");
    std::string st_in, st_out;
    stats->add_option("--in", st_in, "Conversations JSONL")->required();
    stats->add_option("--out", st_out, "Report path (default stdout)");

    // variant
    auto* variant = app.add_subcommand("variant", "Truncate conversations and replicate the set");
    std::string va_in, va_out;
    std::size_t va_turns = kVariantMaxTurns, va_replicas = kVariantReplicas;
    variant->add_option("--in", va_in, "Conversations JSONL")->required();
    variant->add_option("--out", va_out, "Output JSONL")->required();
    variant->add_option("--max-turns", va_turns, "Turns kept per conversation");
    variant->add_option("--replicas", va_replicas, "Copies of the truncated set");

    // mine-cr
    auto* mine = app.add_subcommand("mine-cr", "Mine reward-model training triples");
    std::string mi_in, mi_out;
    MiningOptions mi_opt;
    ScorerFlags mi_scorer;
    mine->add_option("--in", mi_in, "Conversations JSONL")->required();
    mine->add_option("--out", mi_out, "Triples JSONL")->required();
    mine->add_option("--k", mi_opt.k, "Negatives per bucket");
    mine->add_option("--pool", mi_opt.cross_pool_size, "Cross-conversation pool scored per query");
    mine->add_option("--seed", mi_opt.seed, "Seed");
    mine->add_option("--workers", mi_opt.workers, "Worker threads");
    mi_scorer.attach(mine);

    // eval-mrr
    auto* mrr = app.add_subcommand("eval-mrr", "Next-utterance MRR of a scorer");
    std::string mr_in, mr_out;
    MrrOptions mr_opt;
    ScorerFlags mr_scorer;
    mrr->add_option("--in", mr_in, "Conversations JSONL")->required();
    mrr->add_option("--out", mr_out, "Report path (default stdout)");
    mrr->add_option("--distractors", mr_opt.distractors_per_query, "Cross-conversation distractors per query");
    mrr->add_flag("--all-pairs", mr_opt.all_pairs, "Query every consecutive pair");
    mrr->add_option("--seed", mr_opt.seed, "Seed");
    mr_scorer.attach(mrr);

    // eval-qa
    auto* qa = app.add_subcommand("eval-qa", "Turn-level word-overlap P/R/F1");
    std::string qa_in, qa_out;
    qa->add_option("--in", qa_in, "QA turn records JSONL")->required();
    qa->add_option("--out", qa_out, "Report path (default stdout)");

    // eval-judge
    auto* judge = app.add_subcommand("eval-judge", "Intent coverage via an LLM judge");
    std::string ju_in, ju_out, ju_endpoint, ju_key_env = "DOCTALK_LLM_API_KEY";
    judge->add_option("--in", ju_in, "Judge samples JSONL")->required();
    judge->add_option("--out", ju_out, "Report path (default stdout)");
    judge->add_option("--llm-endpoint", ju_endpoint, "Judge service base URL")->required();
    judge->add_option("--api-key-env", ju_key_env, "Environment variable with a bearer token");

    // docgraph-dump
    auto* dump = app.add_subcommand("docgraph-dump", "Build and cache one anchor's document graph");
    std::string dg_corpus, dg_anchor, dg_out;
    std::size_t dg_depth = kDefaultMaxDepth, dg_edges = kDefaultMaxEdgesPerDoc;
    dump->add_option("--corpus", dg_corpus, "Corpus JSONL")->required();
    dump->add_option("--anchor", dg_anchor, "Anchor doc_id")->required();
    dump->add_option("--max-depth", dg_depth, "Expansion depth");
    dump->add_option("--max-edges", dg_edges, "Outlinks kept per document");
    dump->add_option("--out", dg_out, "Graph JSON path (default stdout)");

    // toy-corpus
    auto* toy = app.add_subcommand("toy-corpus", "Write a random synthetic corpus");
    std::string toy_out;
    SyntheticCorpusOptions toy_opt;
    toy->add_option("--out", toy_out, "Corpus JSONL")->required();
    toy->add_option("--documents", toy_opt.documents, "Number of documents");
    toy->add_option("--seed", toy_opt.seed, "Seed");

    // coqa-convert
    auto* coqa = app.add_subcommand("coqa-convert", "Flatten a CoQA JSON file into QA turn records");
    std::string cq_in, cq_out;
    coqa->add_option("--in", cq_in, "CoQA JSON")->required();
    coqa->add_option("--out", cq_out, "QA records JSONL")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            PipelineConfig config = config_path.empty() ? PipelineConfig{} : load_config(config_path);
            if (corpus_flag) config.corpus_path = *corpus_flag;
            if (out_flag) config.output_path = *out_flag;
            if (report_flag) config.report_path = *report_flag;
            if (seed_flag) config.global_seed = *seed_flag;
            if (workers_flag) config.workers = *workers_flag;
            if (created_at_flag) config.created_at = *created_at_flag;
            if (anchors_flag) config.anchors = *anchors_flag == "all" ? 0 : std::stoul(*anchors_flag);
            if (scorer_kind) config.scorer.kind = *scorer_kind;
            if (scorer_endpoint) config.scorer.endpoint = *scorer_endpoint;
            if (llm_kind) config.llm.kind = *llm_kind;
            if (llm_endpoint) config.llm.endpoint = *llm_endpoint;
            if (resume_flag) config.resume = true;
            return cmd_synthesize(config, std::cerr);
        }
        if (*ingest) return run_ingest_check(ic_corpus, ic_qrels, ic_min_qrels, ic_min_words, ic_out);
        if (*stats) {
            StatsAccumulator acc;
            for_each_conversation(st_in, [&](Conversation&& c) { acc.add(c); });
            write_json(st_out, to_json(acc.finish()));
            return 0;
        }
        if (*variant) {
            write_conversations(va_out, truncate_variant(read_conversations(va_in), va_turns, va_replicas));
            return 0;
        }
        if (*mine) {
            auto scorer = mi_scorer.make();
            const auto result = mine_training_triples(read_conversations(mi_in), *scorer, mi_opt);
            std::ofstream out(mi_out, std::ios::binary);
            if (!out) throw IoError("cannot write " + mi_out);
            for (const auto& t : result.triples) out << to_json(t).dump() << "\n";
            std::cerr << result.triples.size() << " triples, " << result.skipped << " conversations skipped\n";
            return 0;
        }
        if (*mrr) {
            auto scorer = mr_scorer.make();
            write_json(mr_out, to_json(evaluate_mrr(*scorer, read_conversations(mr_in), mr_opt)));
            return 0;
        }
        if (*qa) {
            std::vector<std::pair<QATurnRecord, OverlapMetrics>> scored;
            for (auto& r : read_qa_records(qa_in)) {
                auto m = token_overlap_prf(r.model_answer, r.reference_answers);
                scored.emplace_back(std::move(r), m);
            }
            write_json(qa_out, to_json(turn_level_aggregate(scored)));
            return 0;
        }
        if (*judge) {
            HttpLlmOptions o;
            o.endpoint = ju_endpoint;
            o.model_id = "judge";
            if (const char* key = std::getenv(ju_key_env.c_str())) o.api_key = key;
            HttpLlmClient llm(o);
            std::vector<JudgeReport::Row> rows;
            for (const auto& s : read_judge_samples(ju_in)) {
                const auto v = judge_with_llm(llm, s);
                IntentSet intents;
                for (std::size_t i = 0; i < s.intents.size(); ++i) intents.insert(i);
                rows.push_back({s.sample_id, judge_metrics(v.intro, v.bullet, intents), v.unparseable});
            }
            write_json(ju_out, to_json(summarize_judge(std::move(rows))));
            return 0;
        }
        if (*dump) {
            const auto loaded = load_corpus(dg_corpus, LoadOptions{0, std::nullopt});
            write_json(dg_out, build_doc_graph(loaded.corpus, dg_anchor, dg_depth, dg_edges).to_json());
            return 0;
        }
        if (*toy) {
            write_corpus_jsonl(toy_out, make_synthetic_documents(toy_opt));
            return 0;
        }
        if (*coqa) {
            std::ifstream in(cq_in);
            if (!in) throw IoError("cannot open " + cq_in);
            const auto records = convert_coqa(nlohmann::json::parse(in));
            std::ofstream out(cq_out, std::ios::binary);
            for (const auto& r : records) out << to_json(r).dump() << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
