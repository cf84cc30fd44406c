#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "interfuse/core/error.hpp"
#include "interfuse/core/log.hpp"
#include "interfuse/core/parallel.hpp"
#include "interfuse/eval/metrics.hpp"
#include "interfuse/eval/run.hpp"
#include "interfuse/eval/stats.hpp"
#include "interfuse/fusion/config.hpp"
#include "interfuse/fusion/fuse.hpp"
#include "interfuse/ingest/corpus.hpp"
#include "interfuse/ingest/qrels.hpp"
#include "interfuse/ingest/scores.hpp"
#include "interfuse/ingest/vectors.hpp"
#include "interfuse/text/expand.hpp"
#include "interfuse/text/tfidf.hpp"
#include "interfuse/visual/kmeans.hpp"
#include "interfuse/visual/similarity.hpp"

// Each function here backs one CLI subcommand. Paths are taken verbatim and
// empty optional paths mean "do not write".
namespace interfuse::pipeline {

using ingest::Modality;
using ingest::ScoreKey;
using ingest::ScoreTable;

// ---------------------------------------------------------------- expand ----

struct ExpandOptions {
    std::string corpus;
    std::string queries;
    std::string qrels;
    std::string stopwords;  // empty: bundled English list
    text::ExpansionOptions expansion;
    std::string out;
};

inline text::StopwordSet stopwords_from(const std::string& path) {
    return path.empty() ? text::default_stopwords() : text::load_stopwords(path);
}

/// Expands every query with terms from its judged-relevant documents.
inline std::vector<ingest::QueryRecord> expand_queries(const std::vector<ingest::QueryRecord>& queries,
                                                       const std::vector<ingest::DocumentRecord>& docs,
                                                       const ingest::QrelSet& qrels,
                                                       const text::StopwordSet& stopwords,
                                                       const text::ExpansionOptions& opt) {
    std::map<std::string, const ingest::DocumentRecord*> by_id;
    for (const auto& d : docs) by_id.emplace(d.doc_id, &d);
    std::vector<ingest::QueryRecord> out;
    out.reserve(queries.size());
    for (const auto& q : queries) {
        std::vector<ingest::DocumentRecord> relevant;
        if (const auto* j = qrels.find(q.query_id)) {
            for (const auto& id : j->relevant) {
                if (auto it = by_id.find(id); it != by_id.end()) relevant.push_back(*it->second);
            }
        }
        out.push_back(text::expand_query(q, relevant, stopwords, opt));
    }
    return out;
}

inline std::vector<ingest::QueryRecord> cmd_expand(const ExpandOptions& o) {
    auto docs = ingest::load_corpus(o.corpus);
    auto queries = ingest::load_queries(o.queries);
    auto qrels = ingest::load_qrels(o.qrels);
    qrels.validate_against(queries);
    auto out = expand_queries(queries, docs, qrels, stopwords_from(o.stopwords), o.expansion);
    if (!o.out.empty()) ingest::write_json_lines(out, o.out);
    return out;
}

// --------------------------------------------------------------- textsim ----

struct TextSimOptions {
    std::string corpus;
    std::string queries;
    std::string qrels;  // required when expand is set
    bool expand = false;
    text::ExpansionOptions expansion;
    std::string stopwords;
    std::string out;
    unsigned jobs = 1;
};

/// Text cosine of every (query, document) pair.
inline ScoreTable text_scores(const std::vector<ingest::QueryRecord>& queries, const text::TextIndex& index,
                              unsigned jobs = 1) {
    std::vector<std::vector<double>> per_query(queries.size());
    parallel_for(queries.size(), jobs, [&](std::size_t i) {
        const auto qv = index.vectorize(queries[i].text);
        auto& row = per_query[i];
        row.reserve(index.doc_vectors().size());
        for (const auto& dv : index.doc_vectors()) row.push_back(text::text_score(qv, dv));
    });
    ScoreTable table;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        for (std::size_t d = 0; d < index.doc_ids().size(); ++d) {
            table.add(ScoreKey{queries[i].query_id, index.doc_ids()[d], Modality::text}, per_query[i][d]);
        }
    }
    return table;
}

inline ScoreTable cmd_textsim(const TextSimOptions& o) {
    if (o.expand && o.qrels.empty()) throw UsageError("textsim: query expansion needs --qrels");
    auto docs = ingest::load_corpus(o.corpus);
    auto queries = ingest::load_queries(o.queries);
    const auto stop = stopwords_from(o.stopwords);
    if (o.expand) {
        auto qrels = ingest::load_qrels(o.qrels);
        qrels.validate_against(queries);
        queries = expand_queries(queries, docs, qrels, stop, o.expansion);
    }
    const auto index = text::build_index(docs, stop);
    auto table = text_scores(queries, index, o.jobs);
    if (!o.out.empty()) ingest::write_scores(table, o.out);
    return table;
}

// ---------------------------------------------------------------- imgsim ----

struct ImgSimOptions {
    std::string doc_vectors;
    std::string query_vectors;
    std::string corpus;   // optional: doc -> image_refs mapping
    std::string queries;  // optional: query -> sample_image_refs mapping
    visual::Aggregate aggregate = visual::Aggregate::max;
    std::string out;
    unsigned jobs = 1;
};

using VectorGroups = std::vector<std::pair<std::string, std::vector<std::vector<float>>>>;

namespace detail {

// Resolves each owner (document or query) to the vectors of its images.
inline VectorGroups resolve_images(const std::vector<std::pair<std::string, std::vector<std::string>>>& owners,
                                   const std::vector<ingest::DenseVector>& vectors, const char* kind) {
    std::map<std::string, std::vector<const std::vector<float>*>> by_image;
    for (const auto& v : vectors) by_image[v.id].push_back(&v.values);
    VectorGroups out;
    std::size_t unresolved = 0;
    for (const auto& [owner, refs] : owners) {
        std::vector<std::vector<float>> vs;
        for (const auto& r : refs) {
            auto it = by_image.find(r);
            if (it == by_image.end()) {
                ++unresolved;
                continue;
            }
            for (const auto* p : it->second) vs.push_back(*p);
        }
        out.emplace_back(owner, std::move(vs));
    }
    if (unresolved > 0) {
        log::warn(std::to_string(unresolved) + " " + kind + " image reference(s) have no vector; ignored");
    }
    return out;
}

}  // namespace detail

/// Image score of every (query, document) pair: for each query image, the best
/// cosine over the document's images; then the query images are aggregated.
/// A document or query without any image vector scores 0.
inline ScoreTable image_scores(const VectorGroups& queries, const VectorGroups& docs, visual::Aggregate mode,
                               unsigned jobs = 1) {
    std::vector<std::vector<double>> per_query(queries.size());
    parallel_for(queries.size(), jobs, [&](std::size_t i) {
        const auto& qimgs = queries[i].second;
        auto& row = per_query[i];
        row.reserve(docs.size());
        std::vector<double> per_image;
        for (const auto& [doc_id, dimgs] : docs) {
            if (qimgs.empty() || dimgs.empty()) {
                row.push_back(0.0);
                continue;
            }
            per_image.clear();
            for (const auto& qv : qimgs) {
                double best = 0.0;
                for (const auto& dv : dimgs) best = std::max(best, visual::image_score(qv, dv));
                per_image.push_back(best);
            }
            row.push_back(visual::aggregate_query_images(per_image, mode));
        }
    });
    ScoreTable table;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        for (std::size_t d = 0; d < docs.size(); ++d) {
            table.add(ScoreKey{queries[i].first, docs[d].first, Modality::image}, per_query[i][d]);
        }
    }
    return table;
}

inline ScoreTable cmd_imgsim(const ImgSimOptions& o) {
    const auto doc_vecs = ingest::load_vectors(o.doc_vectors);
    const auto query_vecs = ingest::load_vectors(o.query_vectors);
    const auto dim_d = ingest::common_dim(doc_vecs);
    const auto dim_q = ingest::common_dim(query_vecs);
    if (!doc_vecs.empty() && !query_vecs.empty() && dim_d != dim_q) {
        throw ValidationError("imgsim: document vectors have dim " + std::to_string(dim_d) +
                              " but query vectors have dim " + std::to_string(dim_q));
    }
    VectorGroups docs, queries;
    if (!o.corpus.empty()) {
        std::vector<std::pair<std::string, std::vector<std::string>>> owners;
        for (auto& d : ingest::load_corpus(o.corpus)) owners.emplace_back(d.doc_id, d.image_refs);
        docs = detail::resolve_images(owners, doc_vecs, "document");
    } else {
        docs = ingest::group_by_id(doc_vecs);
    }
    if (!o.queries.empty()) {
        std::vector<std::pair<std::string, std::vector<std::string>>> owners;
        for (auto& q : ingest::load_queries(o.queries)) owners.emplace_back(q.query_id, q.sample_image_refs);
        queries = detail::resolve_images(owners, query_vecs, "query");
    } else {
        queries = ingest::group_by_id(query_vecs);
    }
    auto table = image_scores(queries, docs, o.aggregate, o.jobs);
    if (!o.out.empty()) ingest::write_scores(table, o.out);
    return table;
}

// ------------------------------------------------------ codebook/quantize ----

struct CodebookOptions {
    std::string descriptors;
    visual::KMeansOptions kmeans;
    std::string out;
};

inline nlohmann::json codebook_metadata(const visual::KMeansResult& r, const visual::KMeansOptions& opt,
                                        std::size_t descriptors) {
    nlohmann::json inertia = nlohmann::json::array();
    for (double x : r.inertia) inertia.push_back(x);
    return {{"k", opt.k},
            {"seed", opt.seed},
            {"max_iters", opt.max_iters},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"descriptors", descriptors},
            {"dim", r.codebook.dim()},
            {"inertia", inertia}};
}

/// Learns a codebook; writes it as IFV1 plus "<out>.json" with the seed and
/// per-iteration inertia.
inline visual::KMeansResult cmd_codebook(const CodebookOptions& o) {
    const auto vectors = ingest::load_vectors(o.descriptors);
    const auto sets = visual::descriptor_sets(vectors);
    log::info("codebook: K=" + std::to_string(o.kmeans.k) + " seed=" + std::to_string(o.kmeans.seed) + " over " +
              std::to_string(vectors.size()) + " descriptors");
    auto result = visual::learn_codebook(sets, o.kmeans);
    if (!o.out.empty()) {
        ingest::write_vectors(result.codebook.to_vectors(), o.out);
        auto meta = open_output(o.out + ".json");
        meta << codebook_metadata(result, o.kmeans, vectors.size()).dump(2) << '\n';
    }
    return result;
}

struct QuantizeOptions {
    std::string descriptors;
    std::string codebook;
    std::string out;
};

inline std::vector<ingest::DenseVector> quantize_all(const std::vector<visual::DescriptorSet>& sets,
                                                     const visual::Codebook& cb) {
    std::vector<ingest::DenseVector> out;
    out.reserve(sets.size());
    for (const auto& s : sets) out.push_back(visual::to_dense(visual::quantize(s, cb)));
    return out;
}

/// One L2-normalized visual-word histogram per image id, as IFV1 vectors.
inline std::vector<ingest::DenseVector> cmd_quantize(const QuantizeOptions& o) {
    const auto cb = visual::Codebook::from_vectors(ingest::load_vectors(o.codebook));
    auto out = quantize_all(visual::descriptor_sets(ingest::load_vectors(o.descriptors)), cb);
    if (!o.out.empty()) ingest::write_vectors(out, o.out);
    return out;
}

// ------------------------------------------------------------------ fuse ----

struct FuseOptions {
    std::string scores;
    fusion::FusionConfig config;
    std::string out_run;
    std::string out_diagnostics;
    std::string tag;  // empty: "interfuse-<mode>"
    unsigned jobs = 1;
};

struct FuseResult {
    eval::RankedRun run;
    std::map<std::string, std::vector<fusion::FusedScore>> fused;  // per query, in rank order
    std::size_t missing_entries = 0;
};

/// Fuses every (query, document) pair of the table and ranks each query.
inline FuseResult fuse_table(const ScoreTable& table, const fusion::FusionConfig& cfg, unsigned jobs = 1,
                             std::string tag = {}) {
    cfg.validate();
    const auto qids_set = table.query_ids();
    const std::vector<std::string> qids(qids_set.begin(), qids_set.end());
    std::vector<std::vector<fusion::FusedScore>> per_query(qids.size());
    std::vector<std::size_t> missing(qids.size(), 0);
    parallel_for(qids.size(), jobs, [&](std::size_t i) {
        for (const auto& doc : table.doc_ids(qids[i])) {
            auto t = table.get(qids[i], doc, Modality::text);
            auto v = table.get(qids[i], doc, Modality::image);
            if (!t || !v) {
                if (cfg.missing == fusion::MissingPolicy::error) {
                    throw ValidationError("missing " + std::string(!t ? "text" : "image") + " score for (" + qids[i] +
                                          ", " + doc + ")");
                }
                ++missing[i];
            }
            fusion::FusionInput in{t.value_or(0.0), v.value_or(0.0), t.value_or(0.0)};
            per_query[i].push_back(fusion::fuse(in, cfg, doc));
        }
        std::sort(per_query[i].begin(), per_query[i].end(), [](const auto& a, const auto& b) {
            return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
        });
    });
    FuseResult r;
    r.run.tag = tag.empty() ? "interfuse-" + std::string(fusion::to_string(cfg.mode)) : std::move(tag);
    for (std::size_t i = 0; i < qids.size(); ++i) {
        r.missing_entries += missing[i];
        r.run.queries[qids[i]] = fusion::rank(per_query[i]);
        r.fused[qids[i]] = std::move(per_query[i]);
    }
    if (r.missing_entries > 0) {
        log::warn(std::to_string(r.missing_entries) + " (query, document) pair(s) lack a modality score; treated as 0");
    }
    return r;
}

/// query_id, doc_id, s_text, s_image, p_text, p_image, t_lower, t_upper, rule, cos_theta, score
inline void write_diagnostics(const FuseResult& r, const ScoreTable& table, const fusion::FusionConfig& cfg,
                              const std::string& path) {
    auto out = open_output(path, std::ios::out | std::ios::binary);
    out << "query_id\tdoc_id\ts_text\ts_image\tp_text\tp_image\tt_lower\tt_upper\trule\tcos_theta\tscore\n";
    for (const auto& [qid, list] : r.fused) {
        for (const auto& f : list) {
            const auto t = table.get(qid, f.doc_id, Modality::text).value_or(0.0);
            const auto v = table.get(qid, f.doc_id, Modality::image).value_or(0.0);
            out << qid << '\t' << f.doc_id << '\t' << format_real(t) << '\t' << format_real(v) << '\t'
                << format_real(f.decision.p_text) << '\t' << format_real(f.decision.p_image) << '\t'
                << format_real(cfg.lower_threshold) << '\t' << format_real(f.decision.upper_threshold) << '\t'
                << fusion::to_string(f.decision.fired_rule) << '\t' << f.decision.cos_theta << '\t'
                << format_real(f.score) << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

/// Counts of fired rules, surfaced after fusing so degenerate threshold
/// settings (e.g. R1 never firing) are visible.
inline std::map<fusion::Rule, std::size_t> rule_counts(const FuseResult& r) {
    std::map<fusion::Rule, std::size_t> out;
    for (const auto& [_, list] : r.fused) {
        for (const auto& f : list) ++out[f.decision.fired_rule];
    }
    return out;
}

inline FuseResult cmd_fuse(const FuseOptions& o) {
    const auto table = ingest::load_scores(o.scores);
    auto r = fuse_table(table, o.config, o.jobs, o.tag);
    if (o.config.mode == fusion::FusionMode::quantum) {
        std::string s = "fuse: rules fired";
        for (auto [rule, n] : rule_counts(r)) s += " " + std::string(fusion::to_string(rule)) + "=" + std::to_string(n);
        log::info(s);
    }
    if (!o.out_run.empty()) eval::write_run(r.run, o.out_run);
    if (!o.out_diagnostics.empty()) write_diagnostics(r, table, o.config, o.out_diagnostics);
    return r;
}

// ---------------------------------------------------------- eval/compare ----

/// "<stem>.summary.csv" next to a per-query report path.
inline std::string summary_path_for(const std::string& per_query) {
    auto dot = per_query.rfind('.');
    auto slash = per_query.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return per_query + ".summary.csv";
    return per_query.substr(0, dot) + ".summary.csv";
}

struct EvalOptions {
    std::string run;
    std::string qrels;
    std::string out;      // per-query CSV
    std::string summary;  // empty: derived from out
};

inline eval::MetricReport cmd_eval(const EvalOptions& o) {
    const auto run = eval::load_run(o.run);
    const auto qrels = ingest::load_qrels(o.qrels);
    auto report = eval::evaluate(run, qrels);
    if (!o.out.empty()) {
        eval::write_per_query_csv(report, o.out);
        eval::write_summary_csv(report, o.summary.empty() ? summary_path_for(o.out) : o.summary);
    }
    return report;
}

struct CompareOptions {
    std::string run_a;
    std::string run_b;
    std::string qrels;
    std::vector<eval::Metric> metrics{std::begin(eval::kAllMetrics), std::end(eval::kAllMetrics)};
    std::string out;      // per-query paired CSV
    std::string summary;  // empty: derived from out
};

struct CompareResult {
    eval::MetricReport a;
    eval::MetricReport b;
    std::vector<eval::RunComparison> comparisons;
};

inline CompareResult compare_reports(eval::MetricReport a, eval::MetricReport b,
                                     const std::vector<eval::Metric>& metrics) {
    CompareResult r{std::move(a), std::move(b), {}};
    for (auto m : metrics) r.comparisons.push_back(eval::compare_runs(r.a, r.b, m));
    return r;
}

inline CompareResult cmd_compare(const CompareOptions& o) {
    const auto qrels = ingest::load_qrels(o.qrels);
    auto r = compare_reports(eval::evaluate(eval::load_run(o.run_a), qrels),
                             eval::evaluate(eval::load_run(o.run_b), qrels), o.metrics);
    if (!o.out.empty()) {
        eval::write_comparison_csv(r.a, r.b, o.out);
        eval::write_comparison_summary_csv(r.comparisons, o.summary.empty() ? summary_path_for(o.out) : o.summary);
    }
    return r;
}

}  // namespace interfuse::pipeline
