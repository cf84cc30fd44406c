#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "interfuse/core/error.hpp"
#include "interfuse/core/log.hpp"
#include "interfuse/core/strings.hpp"
#include "interfuse/ingest/load_report.hpp"

namespace interfuse::ingest {

struct DocumentRecord {
    std::string doc_id;
    std::string text;
    std::vector<std::string> image_refs;

    bool operator==(const DocumentRecord&) const = default;
};

struct QueryRecord {
    std::string query_id;
    std::string text;
    std::vector<std::string> sample_image_refs;

    bool operator==(const QueryRecord&) const = default;
};

enum class CorpusFormat { json_lines, tsv };

inline CorpusFormat parse_corpus_format(std::string_view tag) {
    if (tag == "jsonl" || tag == "json-lines" || tag == "json_lines") return CorpusFormat::json_lines;
    if (tag == "tsv") return CorpusFormat::tsv;
    throw UsageError("unknown corpus format '" + std::string(tag) + "' (expected jsonl or tsv)");
}

/// Picks the format from the file extension; anything but .tsv is JSON-lines.
inline CorpusFormat guess_corpus_format(std::string_view path) {
    return path.ends_with(".tsv") ? CorpusFormat::tsv : CorpusFormat::json_lines;
}

namespace detail {

// Shared record shape: an id, a text body, and a list of image identifiers.
struct RawRecord {
    std::string id;
    std::string text;
    std::vector<std::string> images;
};

inline RawRecord parse_json_record(std::string_view line, const char* id_key, const char* images_key) {
    auto j = nlohmann::json::parse(line);  // throws parse_error
    if (!j.is_object()) throw ValidationError("record is not a JSON object");
    RawRecord r;
    auto id = j.find(id_key);
    if (id == j.end() || !id->is_string()) {
        throw ValidationError(std::string("missing string field '") + id_key + "'");
    }
    r.id = id->get<std::string>();
    if (auto t = j.find("text"); t != j.end() && !t->is_null()) {
        if (!t->is_string()) throw ValidationError("field 'text' must be a string");
        r.text = t->get<std::string>();
    }
    if (auto im = j.find(images_key); im != j.end() && !im->is_null()) {
        if (!im->is_array()) throw ValidationError(std::string("field '") + images_key + "' must be an array");
        for (const auto& e : *im) {
            if (!e.is_string()) throw ValidationError(std::string("entries of '") + images_key + "' must be strings");
            r.images.push_back(e.get<std::string>());
        }
    }
    return r;
}

// TSV: id <TAB> text [<TAB> comma-separated image ids]
inline RawRecord parse_tsv_record(std::string_view line) {
    auto fields = split_on(line, '\t');
    if (fields.size() < 2 || fields.size() > 3) {
        throw ValidationError("expected 2 or 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    RawRecord r;
    r.id = std::string(trim(fields[0]));
    r.text = std::string(fields[1]);
    if (fields.size() == 3) {
        for (auto ref : split_on(fields[2], ',')) {
            ref = trim(ref);
            if (!ref.empty()) r.images.emplace_back(ref);
        }
    }
    return r;
}

template <class Record, class Make>
std::vector<Record> load_records(const std::string& path, CorpusFormat format, const char* id_key,
                                 const char* images_key, const char* kind, LoadReport* report, Make make) {
    LoadReport local;
    LoadReport& rep = report ? *report : local;
    rep.path = path;
    auto in = open_input(path);
    std::vector<Record> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(std::move(line));
        if (trim(line).empty()) continue;
        ++rep.records_seen;
        RawRecord raw;
        try {
            raw = format == CorpusFormat::json_lines ? parse_json_record(line, id_key, images_key)
                                                     : parse_tsv_record(line);
        } catch (const nlohmann::json::exception& e) {
            rep.reject(line_no, std::string("malformed JSON: ") + e.what());
            continue;
        } catch (const ValidationError& e) {
            rep.reject(line_no, e.what());
            continue;
        }
        if (raw.id.empty()) {
            rep.reject(line_no, std::string("empty ") + id_key);
            continue;
        }
        if (raw.text.empty() && raw.images.empty()) {
            rep.reject(line_no, std::string(kind) + " '" + raw.id + "' has neither text nor images");
            continue;
        }
        if (!seen.insert(raw.id).second) {
            rep.reject(line_no, "duplicate " + std::string(id_key) + " '" + raw.id + "'");
            continue;
        }
        out.push_back(make(std::move(raw)));
        ++rep.accepted;
    }
    if (rep.records_seen == 0) {
        std::string msg = path + ": empty " + kind + " file";
        rep.warnings.push_back(msg);
        log::warn(msg);
    }
    if (!report) rep.throw_if_failed();
    return out;
}

}  // namespace detail

/// Reads documents. Without a report, any invalid record raises
/// ValidationError listing line numbers; with one, invalid records are
/// collected there and the valid ones returned.
inline std::vector<DocumentRecord> load_corpus(const std::string& path, CorpusFormat format,
                                               LoadReport* report = nullptr) {
    return detail::load_records<DocumentRecord>(
        path, format, "doc_id", "image_refs", "document", report, [](detail::RawRecord r) {
            return DocumentRecord{std::move(r.id), std::move(r.text), std::move(r.images)};
        });
}

inline std::vector<DocumentRecord> load_corpus(const std::string& path) {
    return load_corpus(path, guess_corpus_format(path));
}

inline std::vector<QueryRecord> load_queries(const std::string& path, CorpusFormat format,
                                             LoadReport* report = nullptr) {
    return detail::load_records<QueryRecord>(
        path, format, "query_id", "sample_image_refs", "query", report, [](detail::RawRecord r) {
            return QueryRecord{std::move(r.id), std::move(r.text), std::move(r.images)};
        });
}

inline std::vector<QueryRecord> load_queries(const std::string& path) {
    return load_queries(path, guess_corpus_format(path));
}

inline std::string to_json_line(const QueryRecord& q) {
    nlohmann::json j = {{"query_id", q.query_id}, {"text", q.text}, {"sample_image_refs", q.sample_image_refs}};
    return j.dump();
}

inline std::string to_json_line(const DocumentRecord& d) {
    nlohmann::json j = {{"doc_id", d.doc_id}, {"text", d.text}, {"image_refs", d.image_refs}};
    return j.dump();
}

template <class Record>
void write_json_lines(const std::vector<Record>& records, const std::string& path) {
    auto out = open_output(path, std::ios::out | std::ios::binary);
    for (const auto& r : records) out << to_json_line(r) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace interfuse::ingest
