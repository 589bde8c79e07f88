#include "doctalk/corpus.hpp"

#include "doctalk/common.hpp"

#include <json.hpp>

#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace doctalk {

namespace {

using json = nlohmann::json;

void normalize_outlinks(Document& doc) {
    std::unordered_set<std::string> seen;
    std::vector<std::string> kept;
    kept.reserve(doc.outlinks.size());
    for (auto& target : doc.outlinks) {
        if (target == doc.doc_id || target.empty()) continue;
        if (seen.insert(target).second) kept.push_back(std::move(target));
    }
    doc.outlinks = std::move(kept);
}

std::optional<Document> parse_line(const std::string& line, std::string& why) {
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        why = "not a JSON object";
        return std::nullopt;
    }
    Document doc;
    const auto id = j.find("doc_id");
    if (id == j.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
        why = "missing or invalid \"doc_id\"";
        return std::nullopt;
    }
    doc.doc_id = id->get<std::string>();

    const auto text = j.find("text");
    if (text == j.end() || !text->is_string()) {
        why = "missing or invalid \"text\"";
        return std::nullopt;
    }
    doc.text = text->get<std::string>();
    if (trim(doc.text).empty()) {
        why = "empty \"text\"";
        return std::nullopt;
    }

    if (const auto title = j.find("title"); title != j.end()) {
        if (!title->is_string()) {
            why = "invalid \"title\"";
            return std::nullopt;
        }
        doc.title = title->get<std::string>();
    }
    if (const auto links = j.find("outlinks"); links != j.end()) {
        if (!links->is_array()) {
            why = "invalid \"outlinks\"";
            return std::nullopt;
        }
        for (const auto& link : *links) {
            if (!link.is_string()) {
                why = "non-string entry in \"outlinks\"";
                return std::nullopt;
            }
            doc.outlinks.push_back(link.get<std::string>());
        }
    }
    return doc;
}

void merge_qrels(const std::filesystem::path& path, std::vector<Document>& docs,
                 LoadReport& report) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open qrels file: " + path.string());
    }
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < docs.size(); ++i) index.emplace(docs[i].doc_id, i);

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto fields = split_whitespace(line);
        if (fields.empty()) continue;
        if (fields.size() != 4) {
            report.errors.push_back({lineno, "qrels: expected 4 fields"});
            continue;
        }
        double relevance = 0.0;
        try {
            relevance = std::stod(std::string(fields[3]));
        } catch (const std::exception&) {
            report.errors.push_back({lineno, "qrels: invalid relevance"});
            continue;
        }
        if (relevance <= 0.0) continue;
        const auto it = index.find(std::string(fields[0]));
        if (it == index.end()) continue;
        docs[it->second].outlinks.emplace_back(fields[2]);
        ++report.qrels_merged;
    }
}

}  // namespace

CorpusHandle CorpusHandle::from_documents(std::vector<Document> docs, std::size_t min_qrels,
                                          LoadReport* report) {
    CorpusHandle handle;
    handle.min_qrels_ = min_qrels;
    handle.docs_.reserve(docs.size());
    for (auto& doc : docs) {
        if (handle.index_.count(doc.doc_id) != 0) {
            if (report) ++report->duplicate_ids;
            continue;
        }
        handle.index_.emplace(doc.doc_id, handle.docs_.size());
        handle.docs_.push_back(std::move(doc));
    }
    for (auto& doc : handle.docs_) {
        normalize_outlinks(doc);
        const auto before = doc.outlinks.size();
        std::erase_if(doc.outlinks, [&](const std::string& t) { return !handle.contains(t); });
        if (report) report->dropped_outlinks += before - doc.outlinks.size();
    }
    handle.anchors_ = filter_anchors(handle, min_qrels);
    handle.anchor_set_.insert(handle.anchors_.begin(), handle.anchors_.end());
    if (report) report->documents = handle.docs_.size();
    return handle;
}

const Document& CorpusHandle::at(const std::string& doc_id) const {
    const auto it = index_.find(doc_id);
    if (it == index_.end()) {
        throw std::out_of_range("unknown doc_id: " + doc_id);
    }
    return docs_[it->second];
}

const Document* CorpusHandle::find(const std::string& doc_id) const {
    const auto it = index_.find(doc_id);
    return it == index_.end() ? nullptr : &docs_[it->second];
}

LoadResult load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open corpus file: " + path.string());
    }
    LoadResult result;
    auto& report = result.report;
    std::vector<Document> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        ++report.lines_read;
        std::string why;
        auto doc = parse_line(line, why);
        if (!doc) {
            ++report.skipped_lines;
            report.errors.push_back({lineno, why});
            continue;
        }
        docs.push_back(std::move(*doc));
    }
    if (in.bad()) {
        throw IoError("read error on corpus file: " + path.string());
    }
    if (options.qrels_path) {
        merge_qrels(*options.qrels_path, docs, report);
    }
    result.corpus = CorpusHandle::from_documents(std::move(docs), options.min_qrels, &report);
    return result;
}

std::vector<std::string> filter_anchors(const CorpusHandle& corpus, std::size_t min_qrels) {
    std::vector<std::string> out;
    for (const auto& doc : corpus.documents()) {
        std::size_t resolvable = 0;
        for (const auto& t : doc.outlinks) {
            if (corpus.contains(t)) ++resolvable;
        }
        if (resolvable >= min_qrels) out.push_back(doc.doc_id);
    }
    return out;
}

std::vector<Segment> segment_document(const Document& doc, std::size_t min_words) {
    std::vector<Segment> out;
    std::string_view text = doc.text;
    std::size_t para_begin = std::string_view::npos;
    std::size_t para_end = 0;

    auto flush = [&] {
        if (para_begin == std::string_view::npos) return;
        const auto para = trim(text.substr(para_begin, para_end - para_begin));
        if (!para.empty() && word_count(para) >= min_words) {
            out.push_back(Segment{doc.doc_id, out.size(), std::string(para)});
        }
        para_begin = std::string_view::npos;
    };

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const auto line = text.substr(pos, eol - pos);
        if (trim(line).empty()) {
            flush();
        } else {
            if (para_begin == std::string_view::npos) para_begin = pos;
            para_end = eol;
        }
        pos = eol + 1;
    }
    flush();
    return out;
}

std::string retained_text(const std::string& text, std::size_t min_words) {
    static const std::regex boundary(R"(\n[ \t\r\f\v]*\n)");
    std::ostringstream joined;
    bool first = true;
    for (std::sregex_token_iterator it(text.begin(), text.end(), boundary, -1), end; it != end;
         ++it) {
        const std::string piece = it->str();
        const auto para = trim(piece);
        if (para.empty() || word_count(para) < min_words) continue;
        if (!first) joined << "\n\n";
        joined << para;
        first = false;
    }
    return joined.str();
}

std::string join_segments(const std::vector<Segment>& segments) {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i) out += "\n\n";
        out += segments[i].text;
    }
    return out;
}

}  // namespace doctalk
