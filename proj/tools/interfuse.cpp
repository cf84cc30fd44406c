// interfuse: score -> fuse -> rank -> evaluate -> compare.
//
// Exit codes: 0 success, 1 usage error, 2 data validation error.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "interfuse/interfuse.hpp"

namespace {

using namespace interfuse;

struct FuseCli {
    pipeline::FuseOptions opts;
    std::string config_path;
    std::string preset;
    std::string mode;
    std::vector<std::string> overrides;
};

fusion::FusionConfig resolve_config(const FuseCli& f) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::string path = f.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("INTERFUSE_CONFIG"); env && *env) path = env;
    }
    if (!path.empty()) {
        log::info("fuse: config " + path);
        kv = fusion::parse_config_text(read_file(path), path);
    }
    if (!f.preset.empty()) kv.emplace_back("preset", f.preset);
    for (const auto& o : f.overrides) kv.push_back(fusion::parse_override(o));
    if (!f.mode.empty()) kv.emplace_back("mode", f.mode);
    auto cfg = fusion::apply_settings(fusion::FusionConfig::bow_preset(), kv);
    cfg.validate();
    return cfg;
}

text::ExpansionOptions::Count parse_count(const std::string& s) {
    if (s == "term") return text::ExpansionOptions::Count::term_frequency;
    if (s == "doc") return text::ExpansionOptions::Count::document_frequency;
    throw UsageError("--count must be 'term' or 'doc'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"interfuse - multimodal late fusion with interference-based scoring"};
    app.require_subcommand(1);
    unsigned jobs = 1;
    app.add_option("--jobs,-j", jobs, "Worker threads for per-query work")->check(CLI::PositiveNumber);

    // textsim
    pipeline::TextSimOptions ts;
    std::string ts_count = "term";
    auto* textsim = app.add_subcommand("textsim", "TF-IDF cosine text scores for every (query, document)");
    textsim->add_option("--corpus", ts.corpus, "Documents (.jsonl or .tsv)")->required();
    textsim->add_option("--queries", ts.queries, "Queries (.jsonl or .tsv)")->required();
    textsim->add_option("--qrels", ts.qrels, "Judgments used for query expansion");
    textsim->add_flag("--expand", ts.expand, "Expand queries from their relevant documents first");
    textsim->add_option("--expand-terms", ts.expansion.k, "Number of expansion terms")->capture_default_str();
    textsim->add_option("--count", ts_count, "Expansion frequency: term or doc")
        ->capture_default_str()
        ->check(CLI::IsMember({"term", "doc"}));
    textsim->add_flag("--exclude-query-terms", ts.expansion.exclude_query_terms, "Skip terms already in the query");
    textsim->add_option("--stopwords", ts.stopwords, "Stopword file (one term per line)");
    textsim->add_option("--out", ts.out, "Output score table (TSV)")->required();

    // imgsim
    pipeline::ImgSimOptions is;
    std::string is_agg = "max";
    auto* imgsim = app.add_subcommand("imgsim", "Cosine image scores from dense vectors or histograms");
    imgsim->add_option("--doc-vectors", is.doc_vectors, "Document/image vectors (IFV1 or TSV)")->required();
    imgsim->add_option("--query-vectors", is.query_vectors, "Query sample-image vectors; repeated ids = multiple images")
        ->required();
    imgsim->add_option("--corpus", is.corpus, "Map documents to image_refs");
    imgsim->add_option("--queries", is.queries, "Map queries to sample_image_refs");
    imgsim->add_option("--aggregate", is_agg, "Multi-image query aggregation: max or mean")
        ->capture_default_str()
        ->check(CLI::IsMember({"max", "mean"}));
    imgsim->add_option("--out", is.out, "Output score table (TSV)")->required();

    // codebook
    pipeline::CodebookOptions cb;
    cb.kmeans.k = 1000;
    auto* codebook = app.add_subcommand("codebook", "Learn a visual-word codebook with k-means");
    codebook->add_option("--descriptors", cb.descriptors, "Descriptor container (IFV1)")->required();
    codebook->add_option("--k", cb.kmeans.k, "Number of visual words")->capture_default_str()->check(CLI::PositiveNumber);
    codebook->add_option("--seed", cb.kmeans.seed, "RNG seed")->capture_default_str();
    codebook->add_option("--max-iters", cb.kmeans.max_iters, "Lloyd iteration cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    codebook->add_option("--out", cb.out, "Codebook output (IFV1); metadata goes to <out>.json")->required();

    // quantize
    pipeline::QuantizeOptions qz;
    auto* quantize = app.add_subcommand("quantize", "Visual-word histograms per image");
    quantize->add_option("--descriptors", qz.descriptors, "Descriptor container (IFV1)")->required();
    quantize->add_option("--codebook", qz.codebook, "Codebook (IFV1)")->required();
    quantize->add_option("--out", qz.out, "Histogram vectors (IFV1)")->required();

    // expand
    pipeline::ExpandOptions ex;
    std::string ex_count = "term";
    auto* expand = app.add_subcommand("expand", "Relevance-feedback query expansion");
    expand->add_option("--corpus", ex.corpus, "Documents")->required();
    expand->add_option("--queries", ex.queries, "Queries")->required();
    expand->add_option("--qrels", ex.qrels, "Judgments")->required();
    expand->add_option("--k", ex.expansion.k, "Number of expansion terms")->capture_default_str();
    expand->add_option("--count", ex_count, "Frequency: term or doc")
        ->capture_default_str()
        ->check(CLI::IsMember({"term", "doc"}));
    expand->add_flag("--exclude-query-terms", ex.expansion.exclude_query_terms, "Skip terms already in the query");
    expand->add_option("--stopwords", ex.stopwords, "Stopword file");
    expand->add_option("--out", ex.out, "Expanded queries (JSON-lines)")->required();

    // fuse
    FuseCli fu;
    auto* fuse = app.add_subcommand("fuse", "Fuse text and image scores and rank");
    fuse->add_option("--scores", fu.opts.scores, "Score table (TSV)")->required();
    fuse->add_option("--config", fu.config_path, "Fusion config file (default: $INTERFUSE_CONFIG)");
    fuse->add_option("--preset", fu.preset, "bow or enhanced")->check(CLI::IsMember({"bow", "enhanced"}));
    fuse->add_option("--mode", fu.mode, "classical or quantum")->check(CLI::IsMember({"classical", "quantum"}));
    fuse->add_option("--set", fu.overrides, "Config override key=value (repeatable)");
    fuse->add_option("--tag", fu.opts.tag, "Run tag");
    fuse->add_option("--out", fu.opts.out_run, "TREC run output")->required();
    fuse->add_option("--diagnostics", fu.opts.out_diagnostics, "Per-document diagnostics TSV");

    // eval
    pipeline::EvalOptions ev;
    auto* evalc = app.add_subcommand("eval", "Evaluate a TREC run against qrels");
    evalc->add_option("--run", ev.run, "TREC run")->required();
    evalc->add_option("--qrels", ev.qrels, "TREC qrels")->required();
    evalc->add_option("--out", ev.out, "Per-query CSV")->required();
    evalc->add_option("--summary", ev.summary, "Aggregate CSV (default: <out stem>.summary.csv)");

    // compare
    pipeline::CompareOptions cmp;
    std::vector<std::string> cmp_metrics;
    auto* compare = app.add_subcommand("compare", "Paired comparison of two runs (t-test and Wilcoxon)");
    compare->add_option("--run-a", cmp.run_a, "Baseline run")->required();
    compare->add_option("--run-b", cmp.run_b, "Candidate run")->required();
    compare->add_option("--qrels", cmp.qrels, "TREC qrels")->required();
    compare->add_option("--metric", cmp_metrics, "Metrics to test (default: all)");
    compare->add_option("--out", cmp.out, "Per-query paired CSV")->required();
    compare->add_option("--summary", cmp.summary, "Test summary CSV (default: <out stem>.summary.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*textsim) {
            ts.expansion.count = parse_count(ts_count);
            ts.jobs = jobs;
            auto t = pipeline::cmd_textsim(ts);
            log::info("textsim: wrote " + std::to_string(t.size()) + " scores to " + ts.out);
        } else if (*imgsim) {
            is.aggregate = visual::parse_aggregate(is_agg);
            is.jobs = jobs;
            auto t = pipeline::cmd_imgsim(is);
            log::info("imgsim: wrote " + std::to_string(t.size()) + " scores to " + is.out);
        } else if (*codebook) {
            auto r = pipeline::cmd_codebook(cb);
            log::info("codebook: " + std::to_string(r.iterations) + " iterations, converged=" +
                      (r.converged ? "yes" : "no") + ", seed=" + std::to_string(cb.kmeans.seed));
        } else if (*quantize) {
            auto h = pipeline::cmd_quantize(qz);
            log::info("quantize: wrote " + std::to_string(h.size()) + " histograms to " + qz.out);
        } else if (*expand) {
            ex.expansion.count = parse_count(ex_count);
            pipeline::cmd_expand(ex);
        } else if (*fuse) {
            fu.opts.config = resolve_config(fu);
            fu.opts.jobs = jobs;
            log::info("fuse: " + fusion::describe(fu.opts.config));
            pipeline::cmd_fuse(fu.opts);
        } else if (*evalc) {
            auto r = pipeline::cmd_eval(ev);
            std::cout << "queries\t" << r.evaluated_queries << "\nMAP\t" << format_real(r.map(), 6) << "\nP@20\t"
                      << format_real(r.aggregate.at(eval::Metric::p20).mean, 6) << "\nNDCG@100\t"
                      << format_real(r.aggregate.at(eval::Metric::ndcg100).mean, 6) << '\n';
        } else if (*compare) {
            if (!cmp_metrics.empty()) {
                cmp.metrics.clear();
                for (const auto& m : cmp_metrics) cmp.metrics.push_back(eval::parse_metric(m));
            }
            auto r = pipeline::cmd_compare(cmp);
            for (const auto& c : r.comparisons) {
                std::cout << eval::to_string(c.metric) << "\ta=" << format_real(c.mean_a, 6)
                          << "\tb=" << format_real(c.mean_b, 6) << "\tp_t=" << format_real(c.t_test.p_value, 4)
                          << "\tp_wilcoxon=" << format_real(c.wilcoxon.p_value, 4) << '\t' << c.direction() << '\n';
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
