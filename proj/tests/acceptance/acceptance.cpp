// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every tolerance and time limit lives in the constants below.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "interfuse/interfuse.hpp"

namespace {

using namespace interfuse;
namespace fs = std::filesystem;

constexpr int kRuleSamples = 10'000;
constexpr double kRuleSeconds = 1.0;
constexpr int kReductionSamples = 10'000;
constexpr double kReductionTol = 1e-12;
constexpr int kAlgebraSamples = 10'000;
constexpr double kAlgebraTol = 1e-12;
constexpr std::size_t kMetricMaxDocs = 8;
constexpr double kMetricTol = 1e-12;
constexpr double kMetricSeconds = 30.0;
constexpr std::size_t kTfidfDocs = 50;
constexpr double kTfidfTol = 1e-9;
constexpr double kIdfTol = 1e-12;
constexpr std::size_t kKmeansPoints = 1000;
constexpr std::size_t kKmeansDim = 128;
constexpr std::size_t kKmeansK = 16;
constexpr double kEndToEndSeconds = 5.0;
constexpr double kExpectedMapTol = 1e-12;

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Check {
public:
    void require(bool ok, const std::string& what) {
        if (!ok && out_.pass) {
            out_.pass = false;
            out_.detail = what;
        }
    }
    [[nodiscard]] bool failed() const { return !out_.pass; }
    Outcome done(std::string detail) {
        if (out_.pass) out_.detail = std::move(detail);
        return out_;
    }

private:
    Outcome out_;
};

std::string fmt(double x, int digits = 3) { return format_real(x, digits); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag)
        : path_(fs::temp_directory_path() / ("interfuse_accept_" + tag + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    [[nodiscard]] const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

// ------------------------------------------------------------------ fusion --

// Each rule's predicate on its own, straight from the table.
std::vector<fusion::Rule> matching_rules(double pt, double pv, double lo, double hi) {
    std::vector<fusion::Rule> m;
    if (pt > hi && pv > lo) m.push_back(fusion::Rule::R1);
    if (pt > hi && pv < lo) m.push_back(fusion::Rule::R2);
    if (pt < lo && pv > hi) m.push_back(fusion::Rule::R3);
    if (pt < hi && pv < lo) m.push_back(fusion::Rule::R4);
    return m;
}

int expected_cos(fusion::Rule r) {
    switch (r) {
        case fusion::Rule::R1: return 1;
        case fusion::Rule::none: return 0;
        default: return -1;
    }
}

Outcome rule_table() {
    Check c;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t fired[5] = {};
    for (int i = 0; i < kRuleSamples && !c.failed(); ++i) {
        double lo = u(rng) * 0.5, hi = u(rng) * 0.5;
        if (lo > hi) std::swap(lo, hi);
        // A share of samples sit exactly on a threshold to exercise strictness.
        double pt = u(rng) * 0.5, pv = u(rng) * 0.5;
        if (i % 10 == 0) pt = (i % 20 == 0) ? hi : lo;
        if (i % 15 == 0) pv = (i % 30 == 0) ? hi : lo;

        fusion::FusionConfig cfg;
        cfg.upper_mode = fusion::UpperMode::fixed;
        cfg.upper_threshold = hi;
        cfg.lower_threshold = lo;
        const auto d = fusion::decide_interference({2 * pt, 2 * pv, std::nullopt}, cfg);
        const auto m = matching_rules(pt, pv, lo, hi);
        c.require(m.size() <= 1, "more than one rule matched");
        const auto want = m.empty() ? fusion::Rule::none : m.front();
        c.require(d.fired_rule == want, "fired rule differs from brute force at sample " + std::to_string(i));
        c.require(d.cos_theta == expected_cos(d.fired_rule), "cos theta inconsistent with fired rule");
        ++fired[static_cast<int>(d.fired_rule)];
    }
    const double secs = seconds_since(t0);
    c.require(secs < kRuleSeconds, "took " + fmt(secs) + " s");
    for (int r = 0; r < 5; ++r) c.require(fired[r] > 0, "a rule never fired in the sample");
    return c.done(std::to_string(kRuleSamples) + " tuples, R1..R4/none = " + std::to_string(fired[0]) + "/" +
                  std::to_string(fired[1]) + "/" + std::to_string(fired[2]) + "/" + std::to_string(fired[3]) + "/" +
                  std::to_string(fired[4]) + ", " + fmt(secs * 1000) + " ms");
}

Outcome reduction_identity() {
    Check c;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < kReductionSamples; ++i) {
        fusion::FusionConfig cfg;
        cfg.w_text = u(rng);
        cfg.w_image = 1.0 - cfg.w_text;
        const fusion::FusionInput in{u(rng), u(rng), std::nullopt};
        const double q = fusion::interference_score(cfg.w_text * in.s_text, cfg.w_image * in.s_image, 0);
        worst = std::max(worst, std::abs(q - fusion::classical_fuse(in, cfg)));
    }
    c.require(worst < kReductionTol, "max |quantum - classical| = " + fmt(worst));
    return c.done(std::to_string(kReductionSamples) + " inputs, max diff " + fmt(worst));
}

Outcome interference_algebra() {
    Check c;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < kAlgebraSamples; ++i) {
        const double pt = u(rng), pv = u(rng);
        const double neg = fusion::interference_score(pt, pv, -1);
        const double zero = fusion::interference_score(pt, pv, 0);
        const double pos = fusion::interference_score(pt, pv, 1);
        const double dn = std::sqrt(pt) - std::sqrt(pv), dp = std::sqrt(pt) + std::sqrt(pv);
        worst = std::max({worst, std::abs(neg - dn * dn), std::abs(pos - dp * dp)});
        c.require(neg <= zero && zero <= pos, "monotonicity in cos theta violated");
    }
    c.require(worst < kAlgebraTol, "max deviation " + fmt(worst));
    return c.done(std::to_string(kAlgebraSamples) + " inputs, max deviation " + fmt(worst));
}

// ----------------------------------------------------------------- metrics --

constexpr long long kLcm = 840;  // lcm(1..8)

Outcome metric_oracle() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t rankings = 0;
    double worst = 0.0;
    std::vector<std::size_t> ks;
    for (std::size_t n = 1; n <= kMetricMaxDocs && !c.failed(); ++n) {
        ks.clear();
        for (std::size_t k = 1; k <= n + 1; ++k) ks.push_back(k);
        ks.push_back(20);
        ks.push_back(100);
        std::vector<std::string> ids(n);
        for (std::size_t i = 0; i < n; ++i) ids[i] = "d" + std::to_string(i);
        for (unsigned mask = 0; mask < (1u << n) && !c.failed(); ++mask) {
            const std::size_t total = static_cast<std::size_t>(std::popcount(mask));
            std::set<std::string> relevant;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (1u << i)) relevant.insert(ids[i]);
            }
            // Ideal DCG by the oracle, per k.
            std::vector<double> idcg(ks.size(), 0.0);
            for (std::size_t j = 0; j < ks.size(); ++j) {
                long double acc = 0.0L;
                for (std::size_t i = 0; i < std::min(ks[j], total); ++i) acc += 1.0L / std::log2l(static_cast<long double>(i + 2));
                idcg[j] = static_cast<double>(acc);
            }
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            do {
                ++rankings;
                eval::RelevanceFlags flags(n);
                for (std::size_t i = 0; i < n; ++i) flags[i] = (mask >> perm[i]) & 1u;

                // Exact AP as a rational over kLcm * total.
                long long num = 0, hits = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (!flags[i]) continue;
                    ++hits;
                    num += hits * (kLcm / static_cast<long long>(i + 1));
                }
                const double ap_oracle =
                    total == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(kLcm * static_cast<long long>(total));
                const double ap = eval::average_precision(flags, total);
                worst = std::max(worst, std::abs(ap - ap_oracle));
                c.require(std::abs(ap - ap_oracle) < kMetricTol, "AP mismatch at n=" + std::to_string(n));

                for (std::size_t j = 0; j < ks.size(); ++j) {
                    const std::size_t k = ks[j];
                    std::size_t top = 0;
                    long double dcg = 0.0L;
                    for (std::size_t i = 0; i < std::min(k, n); ++i) {
                        if (!flags[i]) continue;
                        ++top;
                        dcg += 1.0L / std::log2l(static_cast<long double>(i + 2));
                    }
                    // P@k: both sides are one correctly rounded division, so equality is exact.
                    c.require(eval::precision_at_k(flags, k) == static_cast<double>(top) / static_cast<double>(k),
                              "P@" + std::to_string(k) + " mismatch at n=" + std::to_string(n));
                    const double nd_oracle = total == 0 ? 0.0 : static_cast<double>(dcg) / idcg[j];
                    const double nd = eval::ndcg_at_k(flags, total, k);
                    worst = std::max(worst, std::abs(nd - nd_oracle));
                    c.require(std::abs(nd - nd_oracle) < kMetricTol, "NDCG@" + std::to_string(k) + " mismatch");
                }
                // The id-based entry points agree with the flag-based ones (small n only, for time).
                if (n <= 5) {
                    eval::Ranking r;
                    for (std::size_t i = 0; i < n; ++i) r.push_back({ids[perm[i]], 1.0 - 0.1 * static_cast<double>(i)});
                    c.require(eval::average_precision(r, relevant) == ap, "Ranking-based AP differs");
                    c.require(eval::ndcg_at_k(r, relevant, 100) == eval::ndcg_at_k(flags, total, 100),
                              "Ranking-based NDCG differs");
                    c.require(eval::precision_at_k(r, relevant, 20) == eval::precision_at_k(flags, 20),
                              "Ranking-based P@20 differs");
                }
            } while (std::next_permutation(perm.begin(), perm.end()) && !c.failed());
        }
    }
    const double secs = seconds_since(t0);
    c.require(secs < kMetricSeconds, "took " + fmt(secs) + " s");
    return c.done(std::to_string(rankings) + " (ranking, relevant set) pairs, max deviation " + fmt(worst) + ", " +
                  fmt(secs) + " s");
}

// ------------------------------------------------------------------ tf-idf --

Outcome tfidf_check() {
    Check c;
    std::mt19937 rng(50);
    std::vector<std::string> lexicon;
    for (char a = 'b'; a <= 'z'; a += 3)
        for (char b = 'a'; b <= 'z'; b += 5) lexicon.push_back(std::string{a, 'o', b, 'e', 'n'});
    auto random_text = [&](std::size_t len) {
        std::string t;
        for (std::size_t i = 0; i < len; ++i) {
            // Skewed draw so document frequencies spread out.
            const std::size_t w = std::min(lexicon.size() - 1, static_cast<std::size_t>(rng() % lexicon.size()) *
                                                                   static_cast<std::size_t>(rng() % 3 + 1) / 3);
            t += lexicon[w] + (i % 7 == 3 ? " the " : " ");
        }
        return t;
    };
    std::vector<ingest::DocumentRecord> docs;
    for (std::size_t d = 0; d < kTfidfDocs; ++d) docs.push_back({"d" + std::to_string(d), random_text(3 + rng() % 40), {}});
    const auto& stop = text::default_stopwords();
    const auto index = text::build_index(docs, stop);

    // Dense oracle: full term-by-document matrix from token counts.
    std::vector<std::vector<std::string>> toks;
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
        toks.push_back(text::tokenize(d.text, stop));
        std::set<std::string> u(toks.back().begin(), toks.back().end());
        for (const auto& t : u) ++df[t];
    }
    std::vector<std::string> terms;
    for (const auto& [t, _] : df) terms.push_back(t);
    const double N = static_cast<double>(docs.size());
    auto dense = [&](const std::vector<std::string>& tk) {
        std::vector<double> v(terms.size());
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const double tf = static_cast<double>(std::count(tk.begin(), tk.end(), terms[i]));
            v[i] = tf * (std::log((1.0 + N) / (1.0 + static_cast<double>(df[terms[i]]))) + 1.0);
        }
        return v;
    };
    auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
        double dot = 0, na = 0, nb = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            dot += a[i] * b[i];
            na += a[i] * a[i];
            nb += b[i] * b[i];
        }
        return na == 0 || nb == 0 ? 0.0 : dot / std::sqrt(na * nb);
    };
    std::vector<std::vector<double>> dense_docs;
    for (const auto& t : toks) dense_docs.push_back(dense(t));

    double worst = 0.0;
    std::size_t pairs = 0;
    for (int q = 0; q < 30; ++q) {
        const auto qt = random_text(1 + rng() % 6);
        const auto qv = index.vectorize(qt);
        const auto qd = dense(text::tokenize(qt, stop));
        for (std::size_t d = 0; d < docs.size(); ++d, ++pairs) {
            worst = std::max(worst, std::abs(text::text_score(qv, index.doc_vectors()[d]) - cosine(qd, dense_docs[d])));
        }
    }
    for (std::size_t a = 0; a < docs.size(); ++a) {
        for (std::size_t b = 0; b < docs.size(); ++b, ++pairs) {
            worst = std::max(worst, std::abs(text::text_score(index.doc_vectors()[a], index.doc_vectors()[b]) -
                                             cosine(dense_docs[a], dense_docs[b])));
        }
    }
    c.require(worst < kTfidfTol, "max cosine deviation " + fmt(worst));
    const double idf_err = std::abs(text::smoothed_idf(1, 2) - (std::log(1.5) + 1.0));
    c.require(idf_err < kIdfTol, "idf(1, 2) off by " + fmt(idf_err));
    for (std::size_t n = 1; n <= 1000; n *= 10) c.require(text::smoothed_idf(n, n) == 1.0, "idf(N, N) != 1");
    return c.done(std::to_string(pairs) + " pairs over " + std::to_string(index.vocabulary().size()) +
                  " terms, max deviation " + fmt(worst) + ", idf(1,2) error " + fmt(idf_err));
}

// ------------------------------------------------------------------ kmeans --

Outcome kmeans_check() {
    Check c;
    std::mt19937_64 rng(128);
    std::normal_distribution<float> g(0.0f, 1.0f);
    std::vector<visual::DescriptorSet> sets;
    std::vector<float> row(kKmeansDim);
    for (std::size_t img = 0; img < 20; ++img) {
        visual::DescriptorSet s("img" + std::to_string(img), kKmeansDim);
        for (std::size_t i = 0; i < kKmeansPoints / 20; ++i) {
            for (auto& x : row) x = g(rng);
            s.add(row);
        }
        sets.push_back(std::move(s));
    }
    const visual::KMeansOptions opt{kKmeansK, 7, 100};
    const auto a = visual::learn_codebook(sets, opt);
    const auto b = visual::learn_codebook(sets, opt);
    std::size_t increases = 0;
    for (std::size_t i = 1; i < a.inertia.size(); ++i) increases += a.inertia[i] > a.inertia[i - 1];
    c.require(!a.inertia.empty(), "no inertia recorded");
    c.require(increases == 0, std::to_string(increases) + " inertia increase(s)");
    bool identical = a.codebook.size() == b.codebook.size() && a.inertia == b.inertia;
    for (std::size_t k = 0; identical && k < a.codebook.size(); ++k) {
        auto x = a.codebook.centroid(k), y = b.codebook.centroid(k);
        for (std::size_t i = 0; i < x.size(); ++i) identical &= std::bit_cast<std::uint32_t>(x[i]) == std::bit_cast<std::uint32_t>(y[i]);
    }
    c.require(identical, "codebooks from the same seed differ");
    // The serialized codebook is bit-identical too.
    const auto bytes_a = ingest::encode_ifv1(a.codebook.to_vectors());
    c.require(bytes_a == ingest::encode_ifv1(b.codebook.to_vectors()), "serialized codebooks differ");
    return c.done(std::to_string(kKmeansPoints) + "x" + std::to_string(kKmeansDim) + " K=" + std::to_string(kKmeansK) +
                  ", " + std::to_string(a.iterations) + " iterations, inertia " + fmt(a.inertia.front(), 6) + " -> " +
                  fmt(a.inertia.back(), 6));
}

// -------------------------------------------------------------- end to end --

std::string data(const std::string& rel) { return std::string(INTERFUSE_TEST_DATA) + "/" + rel; }

int run_cli(const std::string& args, const std::string& out_file) {
    const std::string cmd = std::string("'") + INTERFUSE_CLI + "' " + args + " >'" + out_file + "' 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome synthetic_end_to_end() {
    Check c;
    ScratchDir dir("e2e");
    const auto t0 = std::chrono::steady_clock::now();
    log::ScopedSink quiet([](log::Level, std::string_view) {});
    auto m = pipeline::load_manifest(data("synthetic/manifest.json"));
    m.output_dir = dir.path().string();
    const auto r = pipeline::run_pipeline(m);
    const double map_c = r.comparison.a.map(), map_q = r.comparison.b.map();
    c.require(map_q > map_c, "quantum MAP " + fmt(map_q, 6) + " does not exceed classical " + fmt(map_c, 6));

    const auto expected = nlohmann::json::parse(read_file(data("synthetic/expected.json")));
    const double exp_c = expected.at("classical").at("map").get<double>();
    const double exp_q = expected.at("quantum").at("map").get<double>();
    c.require(std::abs(map_c - exp_c) < kExpectedMapTol, "classical MAP " + fmt(map_c, 17) + " vs expected " + fmt(exp_c, 17));
    c.require(std::abs(map_q - exp_q) < kExpectedMapTol, "quantum MAP " + fmt(map_q, 17) + " vs expected " + fmt(exp_q, 17));
    c.require(std::abs((map_q - map_c) - expected.at("map_gap").get<double>()) < kExpectedMapTol, "MAP gap differs");
    for (const auto& [which, report] : {std::pair{"classical", &r.comparison.a}, std::pair{"quantum", &r.comparison.b}}) {
        for (const auto& q : report->per_query) {
            const double want = expected.at(which).at("ap").at(q.query_id).get<double>();
            c.require(std::abs(q.average_precision - want) < kExpectedMapTol, std::string(which) + " AP of " + q.query_id);
        }
    }
    const auto* ap = &r.comparison.comparisons.front();
    for (const auto& cmp : r.comparison.comparisons) {
        if (cmp.metric == eval::Metric::average_precision) ap = &cmp;
    }
    c.require(ap->direction() == "b>a", "library comparison direction " + ap->direction());

    // The compare subcommand on the written runs reports the same direction.
    const auto out = (dir.path() / "cli_stdout.txt").string();
    const int code = run_cli("compare --run-a '" + (dir.path() / "run_classical.trec").string() + "' --run-b '" +
                                 (dir.path() / "run_quantum.trec").string() + "' --qrels '" + m.qrels + "' --out '" +
                                 (dir.path() / "cli_compare.csv").string() + "'",
                             out);
    c.require(code == 0, "compare exited with " + std::to_string(code));
    std::string ap_line;
    std::istringstream lines(read_file(out));
    for (std::string l; std::getline(lines, l);) {
        if (l.starts_with("AP\t")) ap_line = l;
    }
    c.require(ap_line.ends_with("\tb>a"), "compare output: '" + ap_line + "'");
    std::string summary_ap;
    std::istringstream srows(read_file((dir.path() / "cli_compare.summary.csv").string()));
    for (std::string l; std::getline(srows, l);) {
        if (l.starts_with("AP,")) summary_ap = l;
    }
    c.require(summary_ap.ends_with(",b>a"), "compare summary: '" + summary_ap + "'");

    const double secs = seconds_since(t0);
    c.require(secs < kEndToEndSeconds, "took " + fmt(secs) + " s");
    return c.done("MAP classical " + fmt(map_c, 6) + ", quantum " + fmt(map_q, 6) + ", p_t " +
                  fmt(ap->t_test.p_value, 3) + ", " + fmt(secs * 1000) + " ms");
}

Outcome determinism() {
    Check c;
    log::ScopedSink quiet([](log::Level, std::string_view) {});
    ScratchDir a("det_a"), b("det_b");
    auto m = pipeline::load_manifest(data("synthetic/manifest.json"));
    m.output_dir = a.path().string();
    pipeline::run_pipeline(m);
    m.output_dir = b.path().string();
    m.jobs = 4;
    pipeline::run_pipeline(m);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a.path())) {
        const auto name = e.path().filename();
        ++files;
        c.require(fs::exists(b.path() / name), name.string() + " missing in second run");
        if (c.failed()) break;
        c.require(read_file(e.path().string()) == read_file((b.path() / name).string()), name.string() + " differs");
    }
    for (const char* must : {"run_classical.trec", "run_quantum.trec", "diagnostics_quantum.tsv", "eval_quantum.csv",
                             "eval_quantum.summary.csv", "compare.csv", "compare.summary.csv"}) {
        c.require(fs::exists(a.path() / must), std::string(must) + " not written");
    }
    return c.done(std::to_string(files) + " output files byte-identical (jobs 1 vs 4)");
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"rule-table", rule_table},
        {"reduction-identity", reduction_identity},
        {"interference-algebra", interference_algebra},
        {"metric-oracle", metric_oracle},
        {"tfidf", tfidf_check},
        {"kmeans", kmeans_check},
        {"synthetic-end-to-end", synthetic_end_to_end},
        {"determinism", determinism},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criterion(s) failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
