#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "interfuse/core/error.hpp"
#include "interfuse/core/strings.hpp"
#include "interfuse/ingest/load_report.hpp"

namespace interfuse::eval {

struct RankedEntry {
    std::string doc_id;
    double score = 0.0;

    bool operator==(const RankedEntry&) const = default;
};

using Ranking = std::vector<RankedEntry>;

/// Ranked output for a set of queries, keyed by query id.
struct RankedRun {
    std::string tag = "interfuse";
    std::map<std::string, Ranking> queries;

    bool operator==(const RankedRun&) const = default;
};

/// Checks the run invariants: scores non-increasing, doc ids unique per query.
inline void validate_run(const RankedRun& run) {
    for (const auto& [qid, ranking] : run.queries) {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            if (!seen.insert(ranking[i].doc_id).second) {
                throw ValidationError("run: document '" + ranking[i].doc_id + "' appears twice for query '" + qid + "'");
            }
            if (i > 0 && ranking[i].score > ranking[i - 1].score) {
                throw ValidationError("run: scores increase at rank " + std::to_string(i + 1) + " of query '" + qid + "'");
            }
        }
    }
}

/// TREC format, one line per entry: "query_id Q0 doc_id rank score tag".
inline void write_run(const RankedRun& run, const std::string& path) {
    auto out = open_output(path, std::ios::out | std::ios::binary);
    const std::string tag = run.tag.empty() ? "interfuse" : run.tag;
    for (const auto& [qid, ranking] : run.queries) {
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            out << qid << " Q0 " << ranking[i].doc_id << ' ' << (i + 1) << ' '
                << format_exact(ranking[i].score) << ' ' << tag << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

/// Reads a TREC run. Entries are ordered by their rank column; the tag of
/// the first line becomes the run tag.
inline RankedRun load_run(const std::string& path) {
    auto in = open_input(path);
    struct Row {
        long rank;
        RankedEntry entry;
    };
    std::map<std::string, std::vector<Row>> rows;
    RankedRun run;
    run.tag.clear();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = trim(line);
        if (body.empty()) continue;
        auto f = split_ws(body);
        if (f.size() != 6) {
            throw ValidationError(location(path, line_no) + ": expected 'query_id Q0 doc_id rank score tag'");
        }
        auto rank = parse_int<long>(f[3]);
        auto score = parse_real(f[4]);
        if (!rank || *rank < 1) throw ValidationError(location(path, line_no) + ": invalid rank '" + std::string(f[3]) + "'");
        if (!score || !std::isfinite(*score)) {
            throw ValidationError(location(path, line_no) + ": invalid score '" + std::string(f[4]) + "'");
        }
        if (run.tag.empty()) run.tag = std::string(f[5]);
        rows[std::string(f[0])].push_back({*rank, {std::string(f[2]), *score}});
    }
    for (auto& [qid, list] : rows) {
        std::stable_sort(list.begin(), list.end(), [](const Row& a, const Row& b) { return a.rank < b.rank; });
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i].rank == list[i - 1].rank) {
                throw ValidationError(path + ": duplicate rank " + std::to_string(list[i].rank) + " for query '" + qid + "'");
            }
        }
        auto& ranking = run.queries[qid];
        for (auto& r : list) ranking.push_back(std::move(r.entry));
    }
    validate_run(run);
    return run;
}

}  // namespace interfuse::eval
