#pragma once

#include "doctalk/corpus.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace doctalk {

/// Knobs for a randomly generated, self-consistent toy corpus. Documents draw
/// words from a per-topic vocabulary so lexical overlap carries signal.
struct SyntheticCorpusOptions {
    std::size_t documents = 40;
    std::size_t min_paragraphs = 2;
    std::size_t max_paragraphs = 6;
    std::size_t min_paragraph_words = 8;
    std::size_t max_paragraph_words = 40;
    std::size_t min_outlinks = 10;
    std::size_t max_outlinks = 25;
    std::size_t topics = 8;
    /// Inject self links, repeated links and dangling targets into outlinks.
    bool noisy_links = true;
    /// Add occasional paragraphs shorter than the default min_words.
    bool short_paragraphs = true;
    std::uint64_t seed = 7;
};

std::vector<Document> make_synthetic_documents(const SyntheticCorpusOptions& options);

/// One JSON object per line in the corpus input format.
void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<Document>& docs);

}  // namespace doctalk
