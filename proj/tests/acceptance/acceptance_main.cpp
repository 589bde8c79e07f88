// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "doctalk/assembly.hpp"
#include "doctalk/dialgraph.hpp"
#include "doctalk/docgraph.hpp"
#include "doctalk/evalsuite.hpp"
#include "doctalk/pipeline.hpp"
#include "doctalk/reward.hpp"
#include "doctalk/synthetic.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

using namespace doctalk;
using doctalk::testing::FnLlm;
using doctalk::testing::FnScorer;
using doctalk::testing::hashed_pair_score;
using doctalk::testing::make_conversation;
using doctalk::testing::make_doc;
using doctalk::testing::TempDir;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the reasons a criterion fails; an empty list is a pass.
struct Check {
    std::vector<std::string> problems;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        if (!ok && problems.size() < 5) problems.push_back(what);
        if (!ok && problems.size() == 5) problems.push_back("...");
    }
};

double u53(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Inverse CDF over normalized probabilities with one 53-bit uniform.
std::size_t replay_pick(const std::vector<double>& p, Rng& rng) {
    const double u = u53(rng) * std::accumulate(p.begin(), p.end(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    return p.size() - 1;
}

std::string mock_question(const std::string& prompt) {
    const auto b = prompt.find("<answer>\n");
    const auto e = prompt.find("\n</answer>");
    const auto target = prompt.substr(b + 9, e - b - 9);
    return "Which detail number " + std::to_string(fnv1a64(target) % 100000) + " comes next?";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Paragraph `k` of a document, cut from its blank-line-joined retained text.
std::string refetch(const CorpusHandle& corpus, const SourceRef& src, std::size_t min_words) {
    const auto* doc = corpus.find(src.doc_id);
    if (!doc) return {};
    const auto text = retained_text(doc->text, min_words);
    std::size_t begin = 0;
    for (std::size_t k = 0; k < src.seg_index; ++k) {
        begin = text.find("\n\n", begin);
        if (begin == std::string::npos) return {};
        begin += 2;
    }
    const auto end = text.find("\n\n", begin);
    return text.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
}

// 1. Weighted document walk frequencies.
Check criterion_doc_walk() {
    Check c;
    const auto t0 = Clock::now();
    const auto corpus = CorpusHandle::from_documents(
        {make_doc("A", "a", {"B", "C", "D"}), make_doc("B", "b", {"E", "F"}), make_doc("C", "c", {"E"}),
         make_doc("D", "d", {"F"}), make_doc("E", "e"), make_doc("F", "f")},
        0);
    const auto g = build_doc_graph(corpus, "A");
    const std::map<std::string, double> expected{{"B", 0.5}, {"C", 0.25}, {"D", 0.25}};
    std::map<std::string, std::size_t> hits;
    Rng rng(20240101);
    constexpr std::size_t kSteps = 100000;
    for (std::size_t i = 0; i < kSteps; ++i) {
        const auto path = traverse_doc_graph(g, 2, rng);
        c.expect(path.size() == 2, "walk did not take a step");
        ++hits[path.back()];
    }
    std::ostringstream d;
    d.precision(4);
    for (const auto& [id, p] : expected) {
        const double freq = static_cast<double>(hits[id]) / kSteps;
        d << id << "=" << freq << " ";
        c.expect(std::abs(freq - p) <= 0.01, id + " frequency off");
    }
    const double secs = seconds_since(t0);
    c.expect(secs < 5.0, "took longer than 5 s");
    d << "in " << secs << " s";
    c.detail = d.str();
    return c;
}

// 2. Dialogue walk: permutation, replay, pair accounting over 100 seeds.
Check criterion_dial_walk() {
    Check c;
    std::vector<Document> docs;
    const std::size_t counts[] = {12, 5, 8};
    for (std::size_t d = 0; d < 3; ++d) {
        std::string text;
        for (std::size_t p = 0; p < counts[d]; ++p) {
            text += (p ? "\n\n" : "") + ("doc " + std::to_string(d) + " paragraph " + std::to_string(p) +
                                         " carries enough words here");
        }
        docs.push_back(make_doc("Doc" + std::to_string(d), text));
    }
    const auto corpus = CorpusHandle::from_documents(docs, 0);
    const auto g = build_dial_graph({"Doc0", "Doc1", "Doc2"}, corpus);
    c.expect(g.segments.size() == 25, "graph does not have 25 vertices");
    std::size_t passed = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        FnScorer inner(hashed_pair_score);
        CountingScorer counted(inner);
        Rng rng(seed);
        const auto order = traverse_dial_graph(g, counted, std::nullopt, rng);

        std::vector<std::size_t> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        bool perm = order.size() == 25 && order.front() == g.start;
        for (std::size_t i = 0; perm && i < sorted.size(); ++i) perm = sorted[i] == i;

        Rng replay(seed);
        std::vector<bool> used(25, false);
        std::vector<std::size_t> expect{g.start};
        used[g.start] = true;
        while (expect.size() < 25) {
            std::vector<std::size_t> cand;
            std::vector<double> r;
            for (std::size_t v = 0; v < 25; ++v) {
                if (used[v]) continue;
                cand.push_back(v);
                r.push_back(std::max(hashed_pair_score(g.segments[expect.back()].text, g.segments[v].text), 1e-6));
            }
            const double z = std::accumulate(r.begin(), r.end(), 0.0);
            for (auto& x : r) x /= z;
            const auto v = cand[replay_pick(r, replay)];
            used[v] = true;
            expect.push_back(v);
        }
        const bool pairs_ok = counted.pairs() <= 25 * 24 / 2;
        c.expect(perm, "seed " + std::to_string(seed) + ": not a permutation from start");
        c.expect(order == expect, "seed " + std::to_string(seed) + ": differs from replay");
        c.expect(pairs_ok, "seed " + std::to_string(seed) + ": too many pair evaluations");
        if (perm && order == expect && pairs_ok) ++passed;
    }
    c.detail = std::to_string(passed) + "/100 seeds";
    return c;
}

// 3. Assistant purity over an end-to-end run.
Check criterion_purity() {
    Check c;
    TempDir dir;
    SyntheticCorpusOptions o;
    o.documents = 160;
    o.seed = 31;
    write_corpus_jsonl(dir / "corpus.jsonl", make_synthetic_documents(o));
    PipelineConfig cfg;
    cfg.corpus_path = (dir / "corpus.jsonl").string();
    cfg.output_path = (dir / "out.jsonl").string();
    cfg.global_seed = 3;
    cfg.anchors = 120;
    LexicalScorer scorer;
    FnLlm llm(mock_question);
    std::ostringstream log;
    const int rc = cmd_synthesize(cfg, scorer, llm, log);
    c.expect(rc == 0, "synthesize failed: " + log.str());
    const auto corpus = load_corpus(cfg.corpus_path).corpus;
    const auto convs = read_conversations(cfg.output_path);
    c.expect(convs.size() >= 100, "fewer than 100 conversations");
    std::size_t turns = 0, matched = 0;
    for (const auto& conv : convs) {
        for (const auto& t : conv.turns) {
            ++turns;
            if (t.assistant_text == refetch(corpus, t.source, cfg.min_words)) ++matched;
        }
    }
    c.expect(turns > 0 && matched == turns, "assistant turns differ from their source");
    c.detail = std::to_string(convs.size()) + " conversations, " + std::to_string(matched) + "/" +
               std::to_string(turns) + " turns byte-identical";
    return c;
}

// 4. Default parameters.
Check criterion_defaults() {
    Check c;
    const auto j = to_json(PipelineConfig{});
    c.expect(j["min_qrels"] == 10, "min_qrels");
    c.expect(j["max_edges_per_doc"] == 20, "qrel cap");
    c.expect(j["max_depth"] == 3, "depth");
    c.expect(j["n_docs"] == 3, "n");
    c.expect(j["variant_max_turns"] == 30, "variant max turns");
    c.expect(j["variant_replicas"] == 3, "variant replicas");
    // The same values must be what the stages use when called without arguments.
    std::vector<Conversation> ds{make_conversation("x", std::vector<std::string>(82, "t"))};
    const auto v = truncate_variant(ds);
    c.expect(v.size() == 3 && v[0].turns.size() == 30, "truncate_variant defaults");
    std::vector<Document> docs{make_doc("A", "")};
    std::vector<std::string> links;
    for (int i = 0; i < 25; ++i) {
        links.push_back("L" + std::to_string(i));
        docs.push_back(make_doc(links.back(), ""));
    }
    docs[0].outlinks = links;
    const auto corpus = CorpusHandle::from_documents(docs);
    c.expect(corpus.min_qrels() == 10, "corpus min_qrels default");
    c.expect(build_doc_graph(corpus, "A").vertex("A").out.size() == 20, "doc graph cap default");
    c.detail = "min_qrels=10 cap=20 depth=3 n=3 variant=30x3";
    return c;
}

// 5. Intent coverage metrics over all subset pairs.
Check criterion_judge_metrics() {
    Check c;
    const auto t0 = Clock::now();
    const IntentSet intents{0, 1, 2};
    std::size_t cases = 0;
    for (unsigned a = 0; a < 8; ++a) {
        for (unsigned b = 0; b < 8; ++b) {
            IntentSet ia, ib;
            for (unsigned i = 0; i < 3; ++i) {
                if (a >> i & 1) ia.insert(i);
                if (b >> i & 1) ib.insert(i);
            }
            IntentSet uni, inter;
            std::set_union(ia.begin(), ia.end(), ib.begin(), ib.end(), std::inserter(uni, uni.end()));
            std::set_intersection(ia.begin(), ia.end(), ib.begin(), ib.end(), std::inserter(inter, inter.end()));
            const auto frac = [](const IntentSet& s) { return static_cast<double>(s.size()) / 3.0; };
            const auto m = judge_metrics(ia, ib, intents);
            const auto tag = std::to_string(a) + "/" + std::to_string(b);
            c.expect(m.intro == frac(ia), tag + " intro");
            c.expect(m.bullet == frac(ib), tag + " bullet");
            c.expect(m.loose == frac(uni), tag + " loose");
            c.expect(m.strict == frac(inter), tag + " strict");
            c.expect(m.strict <= m.intro && m.strict <= m.bullet, tag + " strict bound");
            c.expect(m.intro <= m.loose && m.bullet <= m.loose, tag + " loose bound");
            ++cases;
        }
    }
    const double secs = seconds_since(t0);
    c.expect(secs < 1.0, "took longer than 1 s");
    c.detail = std::to_string(cases) + " subset pairs in " + std::to_string(secs) + " s";
    return c;
}

// 6. Word overlap.
Check criterion_overlap() {
    Check c;
    const auto m = token_overlap_prf("white house", {"the white house garden"});
    c.expect(std::abs(m.precision - 1.0) <= 1e-9, "P");
    c.expect(std::abs(m.recall - 2.0 / 3.0) <= 1e-9, "R");
    c.expect(std::abs(m.f1 - 0.8) <= 1e-9, "F1");
    const auto same = token_overlap_prf("a quiet harbour town", {"a quiet harbour town"});
    c.expect(same.precision == 1.0 && same.recall == 1.0 && same.f1 == 1.0, "identity");
    const auto disjoint = token_overlap_prf("red car", {"blue bike"});
    c.expect(disjoint.precision == 0.0 && disjoint.recall == 0.0 && disjoint.f1 == 0.0, "disjoint");
    std::ostringstream d;
    d << "P=" << m.precision << " R=" << m.recall << " F1=" << m.f1;
    c.detail = d.str();
    return c;
}

std::vector<Conversation> random_conversations(Rng& rng, std::size_t convs, std::size_t max_turns) {
    std::vector<Conversation> out;
    for (std::size_t c = 0; c < convs; ++c) {
        std::vector<std::string> texts;
        const auto n = 2 + uniform_index(rng, max_turns - 1);
        for (std::size_t t = 0; t < n; ++t) {
            std::string s = "conv" + std::to_string(c) + " turn" + std::to_string(t);
            for (int w = 0; w < 5; ++w) s += " w" + std::to_string(uniform_index(rng, 40));
            texts.push_back(s);
        }
        out.push_back(make_conversation("c" + std::to_string(c), texts));
    }
    return out;
}

// 7. MRR bounds and monotonicity.
Check criterion_mrr() {
    Check c;
    Rng rng(77);
    const auto convs = random_conversations(rng, 20, 8);
    std::map<std::string, std::string> next;
    for (const auto& conv : convs) {
        for (std::size_t i = 0; i + 1 < conv.turns.size(); ++i) next[conv.turns[i].assistant_text] = conv.turns[i + 1].assistant_text;
    }
    FnScorer oracle([&](std::string_view ctx, std::string_view cand) { return next.at(std::string(ctx)) == cand ? 1.0 : 0.0; });
    FnScorer inverted([&](std::string_view ctx, std::string_view cand) { return next.at(std::string(ctx)) == cand ? 0.0 : 1.0; });
    MrrOptions o;
    o.seed = 5;
    const auto best = evaluate_mrr(oracle, convs, o);
    c.expect(best.mean_rr == 1.0, "oracle MRR is not exactly 1");

    // Equal pool sizes: 8-turn conversations give P = 7 + distractors.
    Rng fixed_rng(78);
    std::vector<Conversation> even;
    for (std::size_t i = 0; i < 20; ++i) {
        std::vector<std::string> texts;
        for (std::size_t t = 0; t < 8; ++t) texts.push_back("e" + std::to_string(i) + "-" + std::to_string(t));
        even.push_back(make_conversation("e" + std::to_string(i), texts));
        for (std::size_t t = 0; t + 1 < 8; ++t) next[texts[t]] = texts[t + 1];
    }
    const auto worst = evaluate_mrr(inverted, even, o);
    const double pool = static_cast<double>(7 + o.distractors_per_query);
    c.expect(worst.pool_size_stats.min == worst.pool_size_stats.max, "pool sizes differ");
    c.expect(worst.mean_rr == 1.0 / pool, "inverted MRR is not exactly 1/P");

    std::size_t trials_ok = 0;
    for (std::size_t trial = 0; trial < 1000; ++trial) {
        Rng trng(1000 + trial);
        const auto ds = random_conversations(trng, 3 + uniform_index(trng, 5), 6);
        const auto salt = std::to_string(trial);
        FnScorer noisy([&](std::string_view a, std::string_view b) {
            return static_cast<double>(fnv1a64(salt + std::string(a) + "|" + std::string(b)) % 7);
        });
        MrrOptions small, big;
        small.seed = big.seed = trial;
        small.distractors_per_query = uniform_index(trng, 4);
        big.distractors_per_query = small.distractors_per_query + 1 + uniform_index(trng, 10);
        const auto a = evaluate_mrr(noisy, ds, small);
        const auto b = evaluate_mrr(noisy, ds, big);
        bool ok = a.per_conversation_rr.size() == b.per_conversation_rr.size();
        for (std::size_t i = 0; ok && i < a.per_conversation_rr.size(); ++i) {
            ok = b.per_conversation_rr[i] <= a.per_conversation_rr[i] && b.per_conversation_rr[i] > 0.0 &&
                 a.per_conversation_rr[i] <= 1.0;
        }
        c.expect(ok, "trial " + std::to_string(trial) + ": reciprocal rank rose with more distractors");
        if (ok) ++trials_ok;
    }
    std::ostringstream d;
    d << "oracle=" << best.mean_rr << " inverted=" << worst.mean_rr << " (1/" << pool << ") monotone "
      << trials_ok << "/1000";
    c.detail = d.str();
    return c;
}

// Stable top-k by repeated selection of the best remaining score.
std::vector<std::string> brute_top_k(const std::string& base, const std::vector<std::string>& cands, std::size_t k) {
    std::vector<double> s;
    for (const auto& x : cands) s.push_back(hashed_pair_score(base, x));
    std::vector<bool> taken(cands.size(), false);
    std::vector<std::string> out;
    for (std::size_t r = 0; r < k && r < cands.size(); ++r) {
        std::size_t best = cands.size();
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (!taken[i] && (best == cands.size() || s[i] > s[best])) best = i;
        }
        taken[best] = true;
        out.push_back(cands[best]);
    }
    return out;
}

// 8. Mining buckets.
Check criterion_mining() {
    Check c;
    Rng rng(88);
    const auto convs = random_conversations(rng, 50, 10);
    std::map<std::string, std::size_t> owner;
    for (std::size_t i = 0; i < convs.size(); ++i) {
        for (const auto& t : convs[i].turns) owner[t.assistant_text] = i;
    }
    FnScorer scorer(hashed_pair_score);
    std::size_t triples = 0;
    for (std::size_t k = 1; k <= 3; ++k) {
        for (const std::size_t pool : {std::size_t{200}, std::size_t{1000000}}) {
            MiningOptions o;
            o.k = k;
            o.seed = 40 + k;
            o.cross_pool_size = pool;
            const auto r = mine_training_triples(convs, scorer, o);
            c.expect(r.triples.size() == 50, "missing triples");
            for (const auto& t : r.triples) {
                ++triples;
                const auto& turns = convs[t.conversation_index].turns;
                std::size_t base = 0;
                while (base + 1 < turns.size() && turns[base].assistant_text != t.base) ++base;
                c.expect(base + 1 < turns.size() && turns[base + 1].assistant_text == t.positive, "positive is not base+1");
                c.expect(t.negatives.size() <= 3 * k, "more than 3k negatives");
                c.expect(t.negatives.size() == t.negative_sources.size(), "tags misaligned");
                for (std::size_t i = 0; i < t.negatives.size(); ++i) {
                    c.expect(t.negatives[i] != t.positive, "positive among negatives");
                    const bool same = owner.at(t.negatives[i]) == t.conversation_index;
                    c.expect(same == (t.negative_sources[i] == NegativeSource::SameConversation), "wrong provenance tag");
                }
                std::vector<std::string> same_pool, cross_pool;
                for (std::size_t i = 0; i < turns.size(); ++i) {
                    if (i != base && i != base + 1) same_pool.push_back(turns[i].assistant_text);
                }
                for (std::size_t o2 = 0; o2 < convs.size(); ++o2) {
                    if (o2 == t.conversation_index) continue;
                    for (const auto& turn : convs[o2].turns) cross_pool.push_back(turn.assistant_text);
                }
                std::vector<std::string> got_a, got_b;
                for (std::size_t i = 0; i < t.negatives.size(); ++i) {
                    if (t.negative_sources[i] == NegativeSource::SameConversation) got_a.push_back(t.negatives[i]);
                    if (t.negative_sources[i] == NegativeSource::CrossConversationMined) got_b.push_back(t.negatives[i]);
                }
                c.expect(got_a == brute_top_k(t.base, same_pool, k), "bucket a is not the top-k");
                if (pool >= cross_pool.size()) {
                    c.expect(got_b == brute_top_k(t.base, cross_pool, k), "bucket b is not the top-k");
                } else {
                    c.expect(got_b.size() == std::min(k, cross_pool.size()), "bucket b size");
                }
            }
        }
    }
    c.detail = std::to_string(triples) + " triples checked for k in {1,2,3}";
    return c;
}

// 9. Doc shifts and the statistics report.
Check criterion_stats() {
    Check c;
    Conversation fig;
    const char* path[] = {"Doc1", "Doc3", "Doc6", "Doc6"};
    for (std::size_t i = 0; i < 4; ++i) fig.turns.push_back(Turn{i + 1, "q?", "a", SourceRef{path[i], i}});
    c.expect(count_doc_shifts(fig) == 2, "Doc1-Doc3-Doc6-Doc6 is not 2 shifts");

    TempDir dir;
    SyntheticCorpusOptions o;
    o.documents = 1300;
    o.topics = 40;
    o.seed = 9;
    write_corpus_jsonl(dir / "corpus.jsonl", make_synthetic_documents(o));
    PipelineConfig cfg;
    cfg.corpus_path = (dir / "corpus.jsonl").string();
    cfg.output_path = (dir / "out.jsonl").string();
    cfg.anchors = 1000;
    cfg.workers = 2;
    cfg.llm.kind = "offline";
    std::ostringstream log;
    const int rc = cmd_synthesize(cfg, log);
    c.expect(rc == 0, "synthesize failed: " + log.str());
    StatsAccumulator acc;
    std::size_t n = 0;
    for_each_conversation(cfg.output_path, [&](Conversation&& conv) {
        acc.add(conv);
        ++n;
    });
    c.expect(n == 1000, "expected 1000 conversations, got " + std::to_string(n));
    const auto j = to_json(acc.finish());
    for (const char* row : {"turns_per_conversation", "assistant_utterance_words", "user_utterance_words",
                            "doc_shifts_per_conversation"}) {
        c.expect(j.contains(row), std::string("missing row ") + row);
        if (!j.contains(row)) continue;
        const auto& r = j[row];
        const double mn = r["min"], mx = r["max"], med = r["median"], mean = r["mean"], sd = r["std"];
        c.expect(r["count"].get<std::size_t>() > 0, std::string(row) + " empty");
        c.expect(sd >= 0.0, std::string(row) + " negative std");
        c.expect(mn <= med && med <= mx, std::string(row) + " median outside [min, max]");
        c.expect(mn <= mean && mean <= mx, std::string(row) + " mean outside [min, max]");
    }
    std::ostringstream d;
    d << n << " conversations, turns mean " << j["turns_per_conversation"]["mean"].get<double>() << ", shifts mean "
      << j["doc_shifts_per_conversation"]["mean"].get<double>();
    c.detail = d.str();
    return c;
}

// 10. Determinism of the whole run.
Check criterion_determinism() {
    Check c;
    const auto t0 = Clock::now();
    TempDir dir;
    SyntheticCorpusOptions o;
    o.documents = 200;
    o.seed = 21;
    write_corpus_jsonl(dir / "corpus.jsonl", make_synthetic_documents(o));
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
        PipelineConfig cfg;
        cfg.corpus_path = (dir / "corpus.jsonl").string();
        cfg.output_path = (dir / ("run" + std::to_string(run) + ".jsonl")).string();
        cfg.global_seed = 12345;
        cfg.anchors = 150;
        cfg.workers = run == 0 ? 1 : 3;
        cfg.created_at = "2024-01-01T00:00:00Z";
        FnScorer scorer(hashed_pair_score, "mock");
        FnLlm llm(mock_question);
        std::ostringstream log;
        const int rc = cmd_synthesize(cfg, scorer, llm, log);
    c.expect(rc == 0, "synthesize failed: " + log.str());
        outputs[run] = slurp(cfg.output_path);
    }
    c.expect(!outputs[0].empty(), "empty output");
    c.expect(outputs[0] == outputs[1], "outputs differ");
    const double secs = seconds_since(t0);
    c.expect(secs < 60.0, "took longer than 60 s");
    c.detail = std::to_string(std::count(outputs[0].begin(), outputs[0].end(), '\n')) +
               " conversations, identical bytes, " + std::to_string(secs) + " s";
    return c;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
        {"doc graph walk frequencies", criterion_doc_walk},
        {"dialogue graph walk", criterion_dial_walk},
        {"assistant purity", criterion_purity},
        {"default parameters", criterion_defaults},
        {"judge metrics", criterion_judge_metrics},
        {"overlap metrics", criterion_overlap},
        {"mrr", criterion_mrr},
        {"mining scheme", criterion_mining},
        {"doc shifts and stats", criterion_stats},
        {"determinism", criterion_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check result;
        try {
            result = criteria[i].second();
        } catch (const std::exception& e) {
            result.problems.push_back(std::string("exception: ") + e.what());
        }
        const bool pass = result.problems.empty();
        if (!pass) ++failed;
        std::cout << (pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first;
        if (!result.detail.empty()) std::cout << ": " << result.detail;
        std::cout << "\n";
        for (const auto& p : result.problems) std::cout << "    " << p << "\n";
        std::cout.flush();
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
