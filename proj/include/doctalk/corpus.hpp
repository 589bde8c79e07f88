#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace doctalk {

/// A source article. `outlinks` holds the document's qrels in file order.
struct Document {
    std::string doc_id;
    std::string title;
    std::string text;
    std::vector<std::string> outlinks;
};

/// One paragraph of a document; the atomic assistant utterance.
struct Segment {
    std::string doc_id;
    std::size_t seg_index = 0;
    std::string text;

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct LineError {
    std::size_t line = 0;  // 1-based
    std::string message;
};

/// Diagnostics collected while loading a corpus.
struct LoadReport {
    std::size_t lines_read = 0;
    std::size_t documents = 0;
    std::size_t skipped_lines = 0;
    std::size_t dropped_outlinks = 0;  // targets absent from the corpus
    std::size_t duplicate_ids = 0;
    std::size_t qrels_merged = 0;
    std::vector<LineError> errors;
};

/// Immutable, id-indexed document collection plus its anchor set.
///
/// Construction normalizes outlinks (self references and duplicates removed,
/// first occurrence kept, unresolvable targets dropped), so every stored
/// outlink resolves inside the corpus.
class CorpusHandle {
public:
    CorpusHandle() = default;

    /// Builds a handle from raw documents. Later duplicates of a doc_id are
    /// dropped. Anchors are computed with `min_qrels`.
    static CorpusHandle from_documents(std::vector<Document> docs, std::size_t min_qrels = 10,
                                       LoadReport* report = nullptr);

    const std::vector<Document>& documents() const { return docs_; }
    std::size_t size() const { return docs_.size(); }
    bool contains(const std::string& doc_id) const { return index_.count(doc_id) != 0; }

    /// Throws std::out_of_range if the id is unknown.
    const Document& at(const std::string& doc_id) const;
    const Document* find(const std::string& doc_id) const;

    /// Anchor ids in corpus order.
    const std::vector<std::string>& anchor_ids() const { return anchors_; }
    bool is_anchor(const std::string& doc_id) const { return anchor_set_.count(doc_id) != 0; }
    std::size_t min_qrels() const { return min_qrels_; }

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> anchors_;
    std::unordered_set<std::string> anchor_set_;
    std::size_t min_qrels_ = 10;
};

struct LoadOptions {
    std::size_t min_qrels = 10;
    /// Optional TREC-style qrels file merged into the inline outlinks.
    std::optional<std::filesystem::path> qrels_path;
};

struct LoadResult {
    CorpusHandle corpus;
    LoadReport report;
};

/// Streams a JSONL corpus (`doc_id`, `title`, `text`, `outlinks` per line).
/// Malformed lines are skipped and recorded; an unreadable file throws IoError.
LoadResult load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});

/// Ids whose resolvable outlink count is at least `min_qrels`, in corpus order.
std::vector<std::string> filter_anchors(const CorpusHandle& corpus, std::size_t min_qrels = 10);

/// Default floor on words per paragraph.
inline constexpr std::size_t kDefaultMinWords = 5;

/// Splits on blank lines (one or more whitespace-only lines). Paragraphs are
/// trimmed; those with fewer than `min_words` words are dropped.
std::vector<Segment> segment_document(const Document& doc, std::size_t min_words = kDefaultMinWords);

/// Retained paragraphs of `text` joined with "\n\n" after trimming and
/// dropping short ones. Independent of segment_document; used for round trips.
std::string retained_text(const std::string& text, std::size_t min_words);

std::string join_segments(const std::vector<Segment>& segments);

}  // namespace doctalk
