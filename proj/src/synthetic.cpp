#include "doctalk/synthetic.hpp"

#include "doctalk/common.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <fstream>
#include <string>

namespace doctalk {

namespace {

constexpr const char* kSyllables[] = {"ka", "lo", "mi", "ren", "sa", "tor", "vel", "qui", "dan", "pe",
                                      "ru", "shi", "an", "bor", "el", "fin", "gal", "hu", "jo", "mar"};
constexpr const char* kShared[] = {"history", "region", "system", "early", "period", "known", "large",
                                   "became", "later", "during", "first", "several", "including", "built",
                                   "people", "work", "time", "century", "part", "called"};

std::string pseudo_word(Rng& rng) {
    std::string w;
    const auto n = 2 + uniform_index(rng, 2);
    for (std::size_t i = 0; i < n; ++i) w += kSyllables[uniform_index(rng, std::size(kSyllables))];
    return w;
}

std::string make_paragraph(Rng& rng, const std::vector<std::string>& topic_vocab, std::size_t words) {
    std::string p;
    for (std::size_t i = 0; i < words; ++i) {
        if (i) p += ' ';
        const double u = uniform01(rng);
        if (u < 0.55) {
            p += topic_vocab[uniform_index(rng, topic_vocab.size())];
        } else if (u < 0.85) {
            p += kShared[uniform_index(rng, std::size(kShared))];
        } else {
            p += pseudo_word(rng);
        }
    }
    p += '.';
    return p;
}

std::size_t in_range(Rng& rng, std::size_t lo, std::size_t hi) {
    return hi <= lo ? lo : lo + uniform_index(rng, hi - lo + 1);
}

}  // namespace

std::vector<Document> make_synthetic_documents(const SyntheticCorpusOptions& o) {
    Rng rng(o.seed);
    const std::size_t topics = std::max<std::size_t>(1, o.topics);
    std::vector<std::vector<std::string>> vocab(topics);
    for (auto& v : vocab) {
        for (int i = 0; i < 30; ++i) v.push_back(pseudo_word(rng));
    }

    std::vector<Document> docs(o.documents);
    for (std::size_t d = 0; d < o.documents; ++d) {
        char id[32];
        std::snprintf(id, sizeof id, "doc-%05zu", d);
        docs[d].doc_id = id;
    }
    for (std::size_t d = 0; d < o.documents; ++d) {
        auto& doc = docs[d];
        const auto& topic = vocab[d % topics];
        doc.title = "Article " + std::to_string(d) + " on " + topic.front();
        const auto paragraphs = in_range(rng, o.min_paragraphs, o.max_paragraphs);
        for (std::size_t p = 0; p < paragraphs; ++p) {
            if (p) doc.text += uniform01(rng) < 0.2 ? "\n  \n\n" : "\n\n";
            doc.text += make_paragraph(rng, topic, in_range(rng, o.min_paragraph_words, o.max_paragraph_words));
            if (o.short_paragraphs && uniform01(rng) < 0.1) {
                doc.text += "\n\nSee also.";
            }
        }
        if (o.documents > 1) {
            const auto links = in_range(rng, o.min_outlinks, o.max_outlinks);
            for (std::size_t l = 0; l < links; ++l) {
                // Prefer same-topic targets so the link graph has structure.
                std::size_t t = uniform_index(rng, o.documents);
                if (uniform01(rng) < 0.5) {
                    t = (t / topics) * topics + d % topics;
                    if (t >= o.documents) t = d % topics;
                }
                if (t == d) t = (t + 1) % o.documents;
                doc.outlinks.push_back(docs[t].doc_id);
            }
        }
        if (o.noisy_links && uniform01(rng) < 0.3) {
            doc.outlinks.push_back(doc.doc_id);
            if (!doc.outlinks.empty()) doc.outlinks.push_back(doc.outlinks.front());
            doc.outlinks.push_back("missing-" + std::to_string(d));
        }
    }
    return docs;
}

void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<Document>& docs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& d : docs) {
        nlohmann::ordered_json j;
        j["doc_id"] = d.doc_id;
        j["title"] = d.title;
        j["text"] = d.text;
        j["outlinks"] = d.outlinks;
        out << j.dump() << '\n';
    }
}

}  // namespace doctalk
