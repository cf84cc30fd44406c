#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "interfuse/core/error.hpp"
#include "interfuse/core/strings.hpp"
#include "interfuse/ingest/corpus.hpp"
#include "interfuse/ingest/load_report.hpp"

namespace interfuse::ingest {

/// Binary judgments for one query. Documents absent from both sets are
/// unjudged and are treated as nonrelevant by every metric.
struct QueryJudgments {
    std::set<std::string> relevant;
    std::set<std::string> judged_nonrelevant;

    [[nodiscard]] bool is_relevant(const std::string& doc_id) const { return relevant.contains(doc_id); }
    [[nodiscard]] bool is_judged(const std::string& doc_id) const {
        return relevant.contains(doc_id) || judged_nonrelevant.contains(doc_id);
    }
};

struct QrelSet {
    std::map<std::string, QueryJudgments> queries;

    [[nodiscard]] const QueryJudgments* find(const std::string& query_id) const {
        auto it = queries.find(query_id);
        return it == queries.end() ? nullptr : &it->second;
    }

    [[nodiscard]] std::size_t relevant_count(const std::string& query_id) const {
        const auto* j = find(query_id);
        return j ? j->relevant.size() : 0;
    }

    /// Every query id mentioned in the judgments must name a known query.
    void validate_against(const std::vector<QueryRecord>& known) const {
        std::set<std::string> ids;
        for (const auto& q : known) ids.insert(q.query_id);
        for (const auto& [qid, _] : queries) {
            if (!ids.contains(qid)) throw ValidationError("qrels reference unknown query '" + qid + "'");
        }
    }
};

/// Parses TREC qrels: "query_id iteration doc_id rel" with rel in {0,1}.
/// A later judgment for the same (query, doc) pair overrides an earlier one.
inline QrelSet load_qrels(const std::string& path, LoadReport* report = nullptr) {
    LoadReport local;
    LoadReport& rep = report ? *report : local;
    rep.path = path;
    auto in = open_input(path);
    QrelSet out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        ++rep.records_seen;
        auto f = split_ws(body);
        if (f.size() != 4) {
            rep.reject(line_no, "expected 4 fields 'query_id 0 doc_id rel', got " + std::to_string(f.size()));
            continue;
        }
        auto rel = parse_int<int>(f[3]);
        if (!rel) {
            rep.reject(line_no, "relevance '" + std::string(f[3]) + "' is not an integer");
            continue;
        }
        if (*rel != 0 && *rel != 1) {
            rep.reject(line_no, "graded relevance " + std::to_string(*rel) + " not supported (binary 0/1 only)");
            continue;
        }
        auto& j = out.queries[std::string(f[0])];
        std::string doc(f[2]);
        if (*rel == 1) {
            j.judged_nonrelevant.erase(doc);
            j.relevant.insert(std::move(doc));
        } else {
            j.relevant.erase(doc);
            j.judged_nonrelevant.insert(std::move(doc));
        }
        ++rep.accepted;
    }
    if (!report) rep.throw_if_failed();
    return out;
}

inline void write_qrels(const QrelSet& qrels, const std::string& path) {
    auto out = open_output(path);
    for (const auto& [qid, j] : qrels.queries) {
        for (const auto& d : j.relevant) out << qid << " 0 " << d << " 1\n";
        for (const auto& d : j.judged_nonrelevant) out << qid << " 0 " << d << " 0\n";
    }
}

}  // namespace interfuse::ingest
