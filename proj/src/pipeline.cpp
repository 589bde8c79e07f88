#include "doctalk/pipeline.hpp"

#include "doctalk/dialgraph.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <unordered_set>

namespace doctalk {

namespace {

class CountingLlm final : public LlmClient {
public:
    explicit CountingLlm(LlmClient& inner) : inner_(inner) {}
    std::string generate(const std::string& prompt, const GenerateParams& params) override {
        ++calls_;
        return inner_.generate(prompt, params);
    }
    std::string id() const override { return inner_.id(); }
    std::size_t calls() const { return calls_.load(); }

private:
    LlmClient& inner_;
    std::atomic<std::size_t> calls_{0};
};

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& field) {
    if (const auto it = j.find(key); it != j.end() && !it->is_null()) field = it->get<T>();
}

}  // namespace

void PipelineConfig::validate_run() const {
    auto positive = [](std::size_t v, const char* name) {
        if (v == 0) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(max_depth, "max_depth");
    positive(max_edges_per_doc, "max_edges_per_doc");
    positive(n_docs, "n_docs");
    positive(max_attempts, "max_attempts");
    positive(workers, "workers");
    positive(scorer.batch_size, "scorer.batch_size");
    positive(scorer.max_in_flight, "scorer.max_in_flight");
    positive(llm.max_in_flight, "llm.max_in_flight");
    positive(variant_max_turns, "variant_max_turns");
    positive(variant_replicas, "variant_replicas");
    if (llm.max_tokens <= 0) throw std::invalid_argument("llm.max_tokens must be positive");
    if (output_path.empty()) throw std::invalid_argument("output_path is required");
}

void PipelineConfig::validate() const {
    validate_run();
    if (scorer.kind != "lexical" && scorer.kind != "remote") {
        throw std::invalid_argument("scorer.kind must be lexical or remote");
    }
    if (scorer.kind == "remote" && scorer.endpoint.empty()) {
        throw std::invalid_argument("scorer.endpoint is required for a remote scorer");
    }
    if (llm.kind != "http" && llm.kind != "offline") {
        throw std::invalid_argument("llm.kind must be http or offline");
    }
    if (llm.kind == "http" && llm.endpoint.empty()) {
        throw std::invalid_argument("llm.endpoint is required for an http llm");
    }
}

nlohmann::ordered_json to_json(const PipelineConfig& c) {
    nlohmann::ordered_json j;
    j["corpus_path"] = c.corpus_path;
    j["qrels_path"] = c.qrels_path;
    j["min_qrels"] = c.min_qrels;
    j["max_depth"] = c.max_depth;
    j["max_edges_per_doc"] = c.max_edges_per_doc;
    j["n_docs"] = c.n_docs;
    j["min_words"] = c.min_words;
    j["scorer"] = {{"kind", c.scorer.kind},
                   {"endpoint", c.scorer.endpoint},
                   {"batch_size", c.scorer.batch_size},
                   {"timeout_ms", c.scorer.timeout_ms},
                   {"retries", c.scorer.retries},
                   {"max_in_flight", c.scorer.max_in_flight}};
    j["llm"] = {{"kind", c.llm.kind},
                {"endpoint", c.llm.endpoint},
                {"max_tokens", c.llm.max_tokens},
                {"temperature", c.llm.temperature},
                {"timeout_ms", c.llm.timeout_ms},
                {"retries", c.llm.retries},
                {"max_in_flight", c.llm.max_in_flight},
                {"model_id", c.llm.model_id},
                {"api_key_env", c.llm.api_key_env}};
    j["template_path"] = c.template_path;
    j["history_window"] = c.history_window;
    j["max_attempts"] = c.max_attempts;
    j["workers"] = c.workers;
    j["global_seed"] = c.global_seed;
    j["anchors"] = c.anchors;
    j["output_path"] = c.output_path;
    j["report_path"] = c.report_path;
    j["resume"] = c.resume;
    j["created_at"] = c.created_at;
    j["variant_max_turns"] = c.variant_max_turns;
    j["variant_replicas"] = c.variant_replicas;
    return j;
}

PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig c) {
    read_field(j, "corpus_path", c.corpus_path);
    read_field(j, "qrels_path", c.qrels_path);
    read_field(j, "min_qrels", c.min_qrels);
    read_field(j, "max_depth", c.max_depth);
    read_field(j, "max_edges_per_doc", c.max_edges_per_doc);
    read_field(j, "n_docs", c.n_docs);
    read_field(j, "min_words", c.min_words);
    if (const auto s = j.find("scorer"); s != j.end()) {
        read_field(*s, "kind", c.scorer.kind);
        read_field(*s, "endpoint", c.scorer.endpoint);
        read_field(*s, "batch_size", c.scorer.batch_size);
        read_field(*s, "timeout_ms", c.scorer.timeout_ms);
        read_field(*s, "retries", c.scorer.retries);
        read_field(*s, "max_in_flight", c.scorer.max_in_flight);
    }
    if (const auto l = j.find("llm"); l != j.end()) {
        read_field(*l, "kind", c.llm.kind);
        read_field(*l, "endpoint", c.llm.endpoint);
        read_field(*l, "max_tokens", c.llm.max_tokens);
        read_field(*l, "temperature", c.llm.temperature);
        read_field(*l, "timeout_ms", c.llm.timeout_ms);
        read_field(*l, "retries", c.llm.retries);
        read_field(*l, "max_in_flight", c.llm.max_in_flight);
        read_field(*l, "model_id", c.llm.model_id);
        read_field(*l, "api_key_env", c.llm.api_key_env);
    }
    read_field(j, "template_path", c.template_path);
    read_field(j, "history_window", c.history_window);
    read_field(j, "max_attempts", c.max_attempts);
    read_field(j, "workers", c.workers);
    read_field(j, "global_seed", c.global_seed);
    read_field(j, "anchors", c.anchors);
    read_field(j, "output_path", c.output_path);
    read_field(j, "report_path", c.report_path);
    read_field(j, "resume", c.resume);
    read_field(j, "created_at", c.created_at);
    read_field(j, "variant_max_turns", c.variant_max_turns);
    read_field(j, "variant_replicas", c.variant_replicas);
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw std::invalid_argument("config is not a JSON object: " + path.string());
    }
    return config_from_json(j);
}

std::size_t RunReport::failed_total() const {
    std::size_t n = 0;
    for (const auto& [_, c] : conversations_failed) n += c;
    return n;
}

nlohmann::ordered_json to_json(const RunReport& r) {
    nlohmann::ordered_json j;
    j["anchors_attempted"] = r.anchors_attempted;
    j["conversations_emitted"] = r.conversations_emitted;
    j["conversations_failed"] = r.failed_total();
    j["failed_by_class"] = nlohmann::ordered_json::object();
    for (const auto& [cls, n] : r.conversations_failed) j["failed_by_class"][cls] = n;
    j["skipped_existing"] = r.skipped_existing;
    j["scorer_calls"] = r.scorer_calls;
    j["scorer_pairs"] = r.scorer_pairs;
    j["llm_calls"] = r.llm_calls;
    j["wall_time_s"] = r.wall_time_s;
    auto& f = j["failures"] = nlohmann::ordered_json::array();
    for (const auto& fail : r.failures) {
        f.push_back({{"anchor_id", fail.anchor_id}, {"class", fail.failure_class}, {"message", fail.message}});
    }
    return j;
}

AnchorResult synthesize_anchor(const CorpusHandle& corpus, const std::string& anchor,
                               const PipelineConfig& config, Scorer& scorer, LlmClient& llm,
                               const PromptTemplate& tmpl) {
    auto fail = [&](const char* cls, const std::string& msg) {
        return AnchorResult{std::nullopt, AnchorFailure{anchor, cls, msg}};
    };
    Rng rng(derive_seed(config.global_seed, anchor));

    // Stage 1: document graph
    std::vector<std::string> docs;
    try {
        const auto gdoc = build_doc_graph(corpus, anchor, config.max_depth, config.max_edges_per_doc);
        docs = traverse_doc_graph(gdoc, config.n_docs, rng);
    } catch (const std::exception& e) {
        return fail("doc_graph", e.what());
    }

    // Stage 2: dialogue graph
    DialGraph gdial;
    try {
        gdial = build_dial_graph(docs, corpus, config.min_words);
    } catch (const std::invalid_argument& e) {
        return fail("empty_dialogue", e.what());
    }
    std::vector<std::size_t> order;
    try {
        order = traverse_dial_graph(gdial, scorer, std::nullopt, rng);
    } catch (const Error& e) {
        return fail("scorer", e.what());
    }

    // Stage 3: user questions, strictly in turn order
    std::vector<Segment> segments;
    segments.reserve(order.size());
    for (auto v : order) segments.push_back(gdial.segments[v]);

    UsergenOptions uopt;
    uopt.history_window = config.history_window;
    uopt.max_attempts = config.max_attempts;
    uopt.params = {config.llm.max_tokens, config.llm.temperature};

    std::vector<UserUtterance> questions;
    questions.reserve(segments.size());
    GenerationRequest req;
    req.template_id = tmpl.id;
    for (std::size_t t = 0; t < segments.size(); ++t) {
        req.target_assistant_text = segments[t].text;
        try {
            auto q = generate_user_utterance(llm, req, tmpl, uopt);
            q.turn_index = t + 1;
            req.history.push_back({q.text, segments[t].text});
            questions.push_back(std::move(q));
        } catch (const TurnError& e) {
            return fail(e.kind == TurnError::Kind::Transport ? "llm_transport" : "llm_validation",
                        "turn " + std::to_string(t + 1) + ": " + e.what());
        }
    }

    AssemblyMeta meta{anchor, docs, config.global_seed, scorer.id(), tmpl.id, config.created_at};
    Conversation conv;
    try {
        conv = assemble_conversation(segments, questions, meta);
    } catch (const std::exception& e) {
        return fail("assembly", e.what());
    }
    if (const auto bad = purity_violations(conv, corpus, config.min_words); bad != 0) {
        return fail("purity", std::to_string(bad) + " assistant turns differ from their source");
    }
    return AnchorResult{std::move(conv), std::nullopt};
}

std::vector<std::string> select_anchors(const CorpusHandle& corpus, const PipelineConfig& config) {
    const auto& all = corpus.anchor_ids();
    if (config.anchors == 0 || config.anchors >= all.size()) return all;
    Rng rng(derive_seed(config.global_seed, "anchor-sample"));
    std::unordered_set<std::size_t> chosen;
    for (std::size_t j = all.size() - config.anchors; j < all.size(); ++j) {
        const auto t = uniform_index(rng, j + 1);
        chosen.insert(chosen.count(t) ? j : t);
    }
    std::vector<std::size_t> idx(chosen.begin(), chosen.end());
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(all[i]);
    return out;
}

RunReport run_synthesis(const CorpusHandle& corpus, const PipelineConfig& config, Scorer& scorer,
                        LlmClient& llm, const PromptTemplate& tmpl, std::ostream& out,
                        const std::set<std::string>& existing) {
    const auto started = std::chrono::steady_clock::now();
    CountingScorer counting_scorer(scorer);
    CountingLlm counting_llm(llm);
    RunReport report;

    std::vector<std::string> todo;
    for (auto& a : select_anchors(corpus, config)) {
        if (existing.count(make_conv_id(a, config.global_seed))) {
            ++report.skipped_existing;
        } else {
            todo.push_back(std::move(a));
        }
    }

    const std::size_t chunk = std::max<std::size_t>(16, config.workers * 4);
    for (std::size_t begin = 0; begin < todo.size(); begin += chunk) {
        const std::size_t len = std::min(chunk, todo.size() - begin);
        std::vector<AnchorResult> results(len);
        parallel_for(len, config.workers, [&](std::size_t i) {
            try {
                results[i] = synthesize_anchor(corpus, todo[begin + i], config, counting_scorer,
                                               counting_llm, tmpl);
            } catch (const std::exception& e) {
                results[i] = AnchorResult{std::nullopt, AnchorFailure{todo[begin + i], "internal", e.what()}};
            }
        });
        for (auto& r : results) {
            ++report.anchors_attempted;
            if (r.conversation) {
                out << to_jsonl_line(*r.conversation);
                ++report.conversations_emitted;
            } else {
                ++report.conversations_failed[r.failure->failure_class];
                report.failures.push_back(std::move(*r.failure));
            }
        }
        out.flush();
        if (!out) throw IoError("failed writing conversation output");
    }

    report.scorer_calls = counting_scorer.calls();
    report.scorer_pairs = counting_scorer.pairs();
    report.llm_calls = counting_llm.calls();
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

std::unique_ptr<Scorer> make_scorer(const ScorerConfig& c) {
    if (c.kind == "lexical") return std::make_unique<LexicalScorer>();
    if (c.kind == "remote") {
        RemoteScorerOptions o;
        o.endpoint = c.endpoint;
        o.batch_size = c.batch_size;
        o.timeout = std::chrono::milliseconds(c.timeout_ms);
        o.retries = c.retries;
        o.max_in_flight = c.max_in_flight;
        return std::make_unique<RemoteScorer>(std::move(o));
    }
    throw std::invalid_argument("unknown scorer kind: " + c.kind);
}

std::unique_ptr<LlmClient> make_llm(const LlmConfig& c) {
    if (c.kind == "offline") return std::make_unique<OfflineQuestionLlm>();
    if (c.kind == "http") {
        HttpLlmOptions o;
        o.endpoint = c.endpoint;
        o.timeout = std::chrono::milliseconds(c.timeout_ms);
        o.retries = c.retries;
        o.max_in_flight = c.max_in_flight;
        o.model_id = c.model_id;
        if (!c.api_key_env.empty()) {
            if (const char* key = std::getenv(c.api_key_env.c_str())) o.api_key = key;
        }
        return std::make_unique<HttpLlmClient>(std::move(o));
    }
    throw std::invalid_argument("unknown llm kind: " + c.kind);
}

int cmd_synthesize(const PipelineConfig& config, std::ostream& log) {
    std::unique_ptr<Scorer> scorer;
    std::unique_ptr<LlmClient> llm;
    try {
        config.validate();
        scorer = make_scorer(config.scorer);
        llm = make_llm(config.llm);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 2;
    }
    return cmd_synthesize(config, *scorer, *llm, log);
}

int cmd_synthesize(const PipelineConfig& config, Scorer& scorer, LlmClient& llm, std::ostream& log) {
    try {
        config.validate_run();
        LoadOptions lopt;
        lopt.min_qrels = config.min_qrels;
        if (!config.qrels_path.empty()) lopt.qrels_path = config.qrels_path;
        const auto loaded = load_corpus(config.corpus_path, lopt);
        log << "corpus: " << loaded.corpus.size() << " documents, " << loaded.corpus.anchor_ids().size()
            << " anchors, " << loaded.report.skipped_lines << " skipped lines\n";

        const auto tmpl = config.template_path.empty() ? PromptTemplate::builtin()
                                                       : PromptTemplate::from_file(config.template_path);

        std::set<std::string> existing;
        const bool append = config.resume && std::filesystem::exists(config.output_path);
        if (append) {
            for_each_conversation(config.output_path, [&](Conversation&& c) { existing.insert(c.conv_id); });
        }
        std::ofstream out(config.output_path, append ? std::ios::binary | std::ios::app : std::ios::binary);
        if (!out) throw IoError("cannot open output: " + config.output_path);

        const auto report = run_synthesis(loaded.corpus, config, scorer, llm, tmpl, out, existing);

        const auto report_path =
            config.report_path.empty() ? config.output_path + ".report.json" : config.report_path;
        std::ofstream rep(report_path, std::ios::binary);
        if (!rep) throw IoError("cannot write report: " + report_path);
        rep << to_json(report).dump(2) << "\n";

        log << "anchors attempted " << report.anchors_attempted << ", emitted " << report.conversations_emitted
            << ", failed " << report.failed_total() << ", skipped " << report.skipped_existing << "\n";
        if (report.failed_total() > 0) {
            log << "warning: " << report.failed_total() << " anchors failed:";
            for (const auto& [cls, n] : report.conversations_failed) log << " " << cls << "=" << n;
            log << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace doctalk
