#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "interfuse/core/error.hpp"
#include "interfuse/core/log.hpp"
#include "interfuse/core/numeric.hpp"
#include "interfuse/eval/run.hpp"
#include "interfuse/ingest/qrels.hpp"

namespace interfuse::eval {

// Metrics over a binary relevance vector in rank order (rank 1 first) plus
// the total number of relevant documents in the judgments. Unjudged
// documents count as nonrelevant.

using RelevanceFlags = std::vector<bool>;

/// |relevant in top min(k, n)| / k; the divisor stays k for short rankings.
inline double precision_at_k(const RelevanceFlags& rel, std::size_t k) {
    if (k == 0) throw ValidationError("precision_at_k: k must be at least 1");
    const std::size_t cut = std::min(k, rel.size());
    const auto hits = std::count(rel.begin(), rel.begin() + static_cast<std::ptrdiff_t>(cut), true);
    return static_cast<double>(hits) / static_cast<double>(k);
}

inline double overall_precision(const RelevanceFlags& rel) {
    if (rel.empty()) return 0.0;
    const auto hits = std::count(rel.begin(), rel.end(), true);
    return static_cast<double>(hits) / static_cast<double>(rel.size());
}

/// Mean over all relevant documents of precision at their rank; relevant
/// documents that were not retrieved contribute 0. 0 when nothing is relevant.
inline double average_precision(const RelevanceFlags& rel, std::size_t total_relevant) {
    if (total_relevant == 0) return 0.0;
    double acc = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < rel.size(); ++i) {
        if (!rel[i]) continue;
        ++hits;
        acc += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    return acc / static_cast<double>(total_relevant);
}

/// Binary-gain NDCG with discount log2(rank + 1); 0 when nothing is relevant.
inline double ndcg_at_k(const RelevanceFlags& rel, std::size_t total_relevant, std::size_t k) {
    if (k == 0) throw ValidationError("ndcg_at_k: k must be at least 1");
    if (total_relevant == 0) return 0.0;
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, rel.size()); ++i) {
        if (rel[i]) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
    double ideal = 0.0;
    for (std::size_t i = 0; i < std::min(k, total_relevant); ++i) ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return dcg / ideal;
}

/// Relevance flags of a ranking against a set of relevant doc ids.
inline RelevanceFlags relevance_flags(const Ranking& ranking, const std::set<std::string>& relevant) {
    RelevanceFlags out;
    out.reserve(ranking.size());
    for (const auto& e : ranking) out.push_back(relevant.contains(e.doc_id));
    return out;
}

inline double precision_at_k(const Ranking& r, const std::set<std::string>& relevant, std::size_t k) {
    return precision_at_k(relevance_flags(r, relevant), k);
}
inline double overall_precision(const Ranking& r, const std::set<std::string>& relevant) {
    return overall_precision(relevance_flags(r, relevant));
}
inline double average_precision(const Ranking& r, const std::set<std::string>& relevant) {
    return average_precision(relevance_flags(r, relevant), relevant.size());
}
inline double ndcg_at_k(const Ranking& r, const std::set<std::string>& relevant, std::size_t k) {
    return ndcg_at_k(relevance_flags(r, relevant), relevant.size(), k);
}

enum class Metric { p20, p100, overall_precision, average_precision, ndcg100 };

inline constexpr Metric kAllMetrics[] = {Metric::p20, Metric::p100, Metric::overall_precision,
                                         Metric::average_precision, Metric::ndcg100};

inline std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::p20: return "P@20";
        case Metric::p100: return "P@100";
        case Metric::overall_precision: return "overall_P";
        case Metric::average_precision: return "AP";
        case Metric::ndcg100: return "NDCG@100";
    }
    return "?";
}

inline Metric parse_metric(std::string_view s) {
    for (auto m : kAllMetrics) {
        if (s == to_string(m)) return m;
    }
    if (s == "MAP" || s == "map" || s == "ap") return Metric::average_precision;
    if (s == "p20") return Metric::p20;
    if (s == "p100") return Metric::p100;
    if (s == "ndcg100" || s == "ndcg") return Metric::ndcg100;
    if (s == "overall") return Metric::overall_precision;
    throw UsageError("unknown metric '" + std::string(s) + "'");
}

struct QueryMetrics {
    std::string query_id;
    double p20 = 0.0;
    double p100 = 0.0;
    double overall_precision = 0.0;
    double average_precision = 0.0;
    double ndcg100 = 0.0;
    std::size_t retrieved = 0;
    std::size_t relevant = 0;
    /// Retrieved documents with no judgment; scored as nonrelevant.
    std::size_t unjudged = 0;
    /// Queries with no relevant document are reported but left out of aggregates.
    bool excluded = false;

    [[nodiscard]] double get(Metric m) const {
        switch (m) {
            case Metric::p20: return p20;
            case Metric::p100: return p100;
            case Metric::overall_precision: return overall_precision;
            case Metric::average_precision: return average_precision;
            case Metric::ndcg100: return ndcg100;
        }
        return 0.0;
    }
};

struct AggregateMetric {
    double mean = 0.0;
    double sd = 0.0;
};

struct MetricReport {
    std::string run_tag;
    std::vector<QueryMetrics> per_query;  // ordered by query id
    std::map<Metric, AggregateMetric> aggregate;
    std::size_t evaluated_queries = 0;

    /// Mean of per-query AP over the evaluated queries.
    [[nodiscard]] double map() const { return aggregate.at(Metric::average_precision).mean; }

    /// Values of one metric for the queries that count toward aggregates.
    [[nodiscard]] std::vector<double> values(Metric m) const {
        std::vector<double> out;
        for (const auto& q : per_query) {
            if (!q.excluded) out.push_back(q.get(m));
        }
        return out;
    }

    [[nodiscard]] std::vector<std::string> evaluated_ids() const {
        std::vector<std::string> out;
        for (const auto& q : per_query) {
            if (!q.excluded) out.push_back(q.query_id);
        }
        return out;
    }
};

inline QueryMetrics evaluate_query(const std::string& query_id, const Ranking& ranking,
                                   const std::set<std::string>& relevant) {
    const auto rel = relevance_flags(ranking, relevant);
    QueryMetrics q;
    q.query_id = query_id;
    q.retrieved = ranking.size();
    q.relevant = relevant.size();
    q.p20 = precision_at_k(rel, 20);
    q.p100 = precision_at_k(rel, 100);
    q.overall_precision = overall_precision(rel);
    q.average_precision = average_precision(rel, relevant.size());
    q.ndcg100 = ndcg_at_k(rel, relevant.size(), 100);
    q.excluded = relevant.empty();
    return q;
}

/// Scores every query of the run. Every qrels query with a relevant document
/// must appear in the run; run queries without relevant documents (or without
/// any judgments) are flagged and left out of the aggregates.
inline MetricReport evaluate(const RankedRun& run, const ingest::QrelSet& qrels) {
    for (const auto& [qid, j] : qrels.queries) {
        if (!j.relevant.empty() && !run.queries.contains(qid)) {
            throw ValidationError("qrels query '" + qid + "' is missing from the run");
        }
    }
    MetricReport report;
    report.run_tag = run.tag;
    static const std::set<std::string> none;
    for (const auto& [qid, ranking] : run.queries) {
        const auto* j = qrels.find(qid);
        auto q = evaluate_query(qid, ranking, j ? j->relevant : none);
        for (const auto& e : ranking) {
            if (!j || !j->is_judged(e.doc_id)) ++q.unjudged;
        }
        if (q.excluded) log::warn("query '" + qid + "' has no relevant documents; excluded from aggregates");
        report.per_query.push_back(std::move(q));
    }
    for (auto m : kAllMetrics) {
        auto v = report.values(m);
        report.aggregate[m] = {mean(v), sample_sd(v)};
    }
    report.evaluated_queries = report.evaluated_ids().size();
    return report;
}

inline void write_per_query_csv(const MetricReport& r, const std::string& path) {
    auto out = open_output(path, std::ios::out | std::ios::binary);
    out << "query_id,P@20,P@100,overall_P,AP,NDCG@100,retrieved,relevant,unjudged,flag\n";
    for (const auto& q : r.per_query) {
        out << q.query_id << ',' << format_real(q.p20) << ',' << format_real(q.p100) << ','
            << format_real(q.overall_precision) << ',' << format_real(q.average_precision) << ','
            << format_real(q.ndcg100) << ',' << q.retrieved << ',' << q.relevant << ','
            << q.unjudged << ',' << (q.excluded ? "no_relevant_excluded" : "ok") << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

/// metric,mean,sd,queries; the AP row is followed by a MAP row.
inline void write_summary_csv(const MetricReport& r, const std::string& path) {
    auto out = open_output(path, std::ios::out | std::ios::binary);
    out << "metric,mean,sd,queries\n";
    for (auto m : kAllMetrics) {
        const auto& a = r.aggregate.at(m);
        out << to_string(m) << ',' << format_real(a.mean) << ',' << format_real(a.sd) << ',' << r.evaluated_queries
            << '\n';
        if (m == Metric::average_precision) {
            out << "MAP," << format_real(a.mean) << ',' << format_real(a.sd) << ',' << r.evaluated_queries << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace interfuse::eval
