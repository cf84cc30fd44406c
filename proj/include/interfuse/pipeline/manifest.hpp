#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "interfuse/core/error.hpp"
#include "interfuse/pipeline/commands.hpp"

namespace interfuse::pipeline {

/// Everything one end-to-end run needs. Relative paths resolve against the
/// manifest file's directory.
struct RunManifest {
    // Text side (optional): corpus + queries produce text scores.
    std::string corpus;
    std::string queries;
    bool expand = false;
    std::size_t expansion_terms = 10;
    std::string stopwords;

    // Image side (optional): dense vectors, or descriptors with a codebook.
    std::string doc_vectors;
    std::string query_vectors;
    std::string doc_descriptors;
    std::string query_descriptors;
    std::string codebook_train;  // defaults to doc_descriptors
    std::size_t codebook_k = 1000;
    std::size_t codebook_max_iters = 100;
    visual::Aggregate aggregate = visual::Aggregate::max;

    // Precomputed unimodal scores merged with anything computed above.
    std::string scores;

    std::string qrels;
    std::vector<std::pair<std::string, std::string>> config;  // fusion settings
    std::string output_dir;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

inline RunManifest load_manifest(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const char* key) -> std::string {
        if (!j.contains(key)) return {};
        auto p = std::filesystem::path(j.at(key).get<std::string>());
        return (p.is_absolute() ? p : base / p).lexically_normal().string();
    };
    RunManifest m;
    try {
        m.corpus = resolve("corpus");
        m.queries = resolve("queries");
        m.stopwords = resolve("stopwords");
        m.doc_vectors = resolve("doc_vectors");
        m.query_vectors = resolve("query_vectors");
        m.doc_descriptors = resolve("doc_descriptors");
        m.query_descriptors = resolve("query_descriptors");
        m.codebook_train = resolve("codebook_train");
        m.scores = resolve("scores");
        m.qrels = resolve("qrels");
        m.output_dir = resolve("output_dir");
        m.expand = j.value("expand", false);
        m.expansion_terms = j.value("expansion_terms", std::size_t{10});
        m.codebook_k = j.value("codebook_k", std::size_t{1000});
        m.codebook_max_iters = j.value("codebook_max_iters", std::size_t{100});
        m.aggregate = visual::parse_aggregate(j.value("aggregate", std::string("max")));
        m.seed = j.value("seed", std::uint64_t{0});
        m.jobs = j.value("jobs", 1u);
        if (auto c = j.find("config"); c != j.end()) {
            if (c->is_string()) {
                auto p = std::filesystem::path(c->get<std::string>());
                m.config = fusion::parse_config_text(read_file((p.is_absolute() ? p : base / p).string()));
            } else {
                for (auto& [k, v] : c->items()) m.config.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    if (m.qrels.empty()) throw ValidationError(path + ": manifest needs 'qrels'");
    if (m.output_dir.empty()) throw ValidationError(path + ": manifest needs 'output_dir'");
    return m;
}

struct PipelineResult {
    ScoreTable scores;
    FuseResult classical;
    FuseResult quantum;
    CompareResult comparison;  // a = classical, b = quantum
};

/// score -> fuse (both modes) -> evaluate -> compare, writing every artifact
/// into output_dir. Outputs depend only on the manifest contents.
inline PipelineResult run_pipeline(const RunManifest& m) {
    namespace fs = std::filesystem;
    fs::create_directories(m.output_dir);
    auto out = [&](const char* name) { return (fs::path(m.output_dir) / name).string(); };
    PipelineResult r;

    const auto qrels = ingest::load_qrels(m.qrels);
    if (!m.corpus.empty() || !m.queries.empty()) {
        if (m.corpus.empty() || m.queries.empty()) throw UsageError("manifest: text scoring needs corpus and queries");
        TextSimOptions t;
        t.corpus = m.corpus;
        t.queries = m.queries;
        t.qrels = m.qrels;
        t.expand = m.expand;
        t.expansion.k = m.expansion_terms;
        t.stopwords = m.stopwords;
        t.out = out("text_scores.tsv");
        t.jobs = m.jobs;
        r.scores.merge(cmd_textsim(t));
    }
    if (!m.doc_descriptors.empty()) {
        if (m.query_descriptors.empty()) throw UsageError("manifest: descriptors need query_descriptors too");
        CodebookOptions c;
        c.descriptors = m.codebook_train.empty() ? m.doc_descriptors : m.codebook_train;
        c.kmeans = {m.codebook_k, m.seed, m.codebook_max_iters};
        c.out = out("codebook.ifv");
        cmd_codebook(c);
        cmd_quantize({m.doc_descriptors, c.out, out("doc_histograms.ifv")});
        cmd_quantize({m.query_descriptors, c.out, out("query_histograms.ifv")});
        ImgSimOptions im;
        im.doc_vectors = out("doc_histograms.ifv");
        im.query_vectors = out("query_histograms.ifv");
        im.corpus = m.corpus;
        im.queries = m.queries;
        im.aggregate = m.aggregate;
        im.out = out("image_scores.tsv");
        im.jobs = m.jobs;
        r.scores.merge(cmd_imgsim(im));
    } else if (!m.doc_vectors.empty()) {
        ImgSimOptions im;
        im.doc_vectors = m.doc_vectors;
        im.query_vectors = m.query_vectors;
        im.corpus = m.corpus;
        im.queries = m.queries;
        im.aggregate = m.aggregate;
        im.out = out("image_scores.tsv");
        im.jobs = m.jobs;
        r.scores.merge(cmd_imgsim(im));
    }
    if (!m.scores.empty()) r.scores.merge(ingest::load_scores(m.scores));
    if (r.scores.empty()) throw ValidationError("manifest produced no scores");
    ingest::write_scores(r.scores, out("scores.tsv"));

    auto cfg = fusion::apply_settings(fusion::FusionConfig::bow_preset(), m.config);
    for (auto mode : {fusion::FusionMode::classical, fusion::FusionMode::quantum}) {
        cfg.mode = mode;
        const std::string name(fusion::to_string(mode));
        auto fused = fuse_table(r.scores, cfg, m.jobs);
        eval::write_run(fused.run, out(("run_" + name + ".trec").c_str()));
        write_diagnostics(fused, r.scores, cfg, out(("diagnostics_" + name + ".tsv").c_str()));
        (mode == fusion::FusionMode::classical ? r.classical : r.quantum) = std::move(fused);
    }
    for (auto* fr : {&r.classical, &r.quantum}) {
        const std::string name = fr == &r.classical ? "classical" : "quantum";
        auto report = eval::evaluate(fr->run, qrels);
        eval::write_per_query_csv(report, out(("eval_" + name + ".csv").c_str()));
        eval::write_summary_csv(report, out(("eval_" + name + ".summary.csv").c_str()));
        (fr == &r.classical ? r.comparison.a : r.comparison.b) = std::move(report);
    }
    r.comparison = compare_reports(std::move(r.comparison.a), std::move(r.comparison.b),
                                   {std::begin(eval::kAllMetrics), std::end(eval::kAllMetrics)});
    eval::write_comparison_csv(r.comparison.a, r.comparison.b, out("compare.csv"));
    eval::write_comparison_summary_csv(r.comparison.comparisons, out("compare.summary.csv"));

    nlohmann::json echo = {{"seed", m.seed},
                           {"config", fusion::describe(cfg)},
                           {"expand", m.expand},
                           {"codebook_k", m.codebook_k},
                           {"aggregate", m.aggregate == visual::Aggregate::max ? "max" : "mean"}};
    auto f = open_output(out("run_info.json"));
    f << echo.dump(2) << '\n';
    return r;
}

}  // namespace interfuse::pipeline
