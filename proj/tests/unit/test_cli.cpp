#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <sys/wait.h>

#include "helpers.hpp"
#include "interfuse/eval/run.hpp"
#include "interfuse/ingest/scores.hpp"
#include "interfuse/ingest/vectors.hpp"

using namespace interfuse;
using testing::data;
using testing::TempDir;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(const TempDir& tmp, const std::string& args, const std::string& env = {}) {
    const auto out = tmp.file("stdout.txt"), err = tmp.file("stderr.txt");
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" + INTERFUSE_CLI + "' " + args + " >'" + out +
                            "' 2>'" + err + "'";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), read_file(out), read_file(err)};
}

}  // namespace

TEST_CASE("cli: usage errors exit 1", "[cli]") {
    TempDir tmp;
    CHECK(run(tmp, "").code == 1);
    CHECK(run(tmp, "frobnicate").code == 1);
    CHECK(run(tmp, "fuse --scores x").code == 1);
    CHECK(run(tmp, "fuse --scores x --out y --mode both").code == 1);
    auto r = run(tmp, "textsim --corpus " + data("toy/corpus.jsonl") + " --queries " + data("toy/queries.jsonl") +
                          " --expand --out " + tmp.file("t.tsv"));
    CHECK(r.code == 1);
    CHECK(testing::contains(r.err, "--qrels"));
    CHECK(run(tmp, "fuse --scores x --out y --set novalue").code == 1);
}

TEST_CASE("cli: help exits 0", "[cli]") {
    TempDir tmp;
    auto r = run(tmp, "--help");
    CHECK(r.code == 0);
    for (const char* sub : {"textsim", "imgsim", "codebook", "quantize", "expand", "fuse", "eval", "compare"}) {
        CHECK(testing::contains(r.out, sub));
    }
}

TEST_CASE("cli: data validation errors exit 2", "[cli]") {
    TempDir tmp;
    CHECK(run(tmp, "fuse --scores " + tmp.file("missing.tsv") + " --out " + tmp.file("r.trec")).code == 2);
    auto bad = tmp.write("s.tsv", "q1\td1\ttext\t0.4\nq1\td1\ttext\t0.5\n");
    auto r = run(tmp, "fuse --scores " + bad + " --out " + tmp.file("r.trec"));
    CHECK(r.code == 2);
    CHECK(testing::contains(r.err, "duplicate"));
    auto graded = tmp.write("q.txt", "q1 0 d1 2\n");
    auto run_file = tmp.write("r.trec", "q1 Q0 d1 1 0.5 t\n");
    CHECK(run(tmp, "eval --run " + run_file + " --qrels " + graded + " --out " + tmp.file("e.csv")).code == 2);
    CHECK(run(tmp, "fuse --scores " + data("synthetic/scores.tsv") + " --preset enhanced --out " + tmp.file("x.trec"))
              .code == 2);
    ingest::write_vectors({{"a", {1, 2}}}, tmp.file("d.ifv"));
    ingest::write_vectors({{"a", {1, 2, 3}}}, tmp.file("q.ifv"));
    CHECK(run(tmp, "imgsim --doc-vectors " + tmp.file("d.ifv") + " --query-vectors " + tmp.file("q.ifv") +
                       " --out " + tmp.file("i.tsv"))
              .code == 2);
}

TEST_CASE("cli: full toy pipeline through subcommands", "[cli]") {
    TempDir tmp;
    const auto toy = [](const char* f) { return data(std::string("toy/") + f); };
    REQUIRE(run(tmp, "textsim --corpus " + toy("corpus.jsonl") + " --queries " + toy("queries.jsonl") + " --qrels " +
                         toy("qrels.txt") + " --expand --expand-terms 5 --out " + tmp.file("t.tsv"))
                .code == 0);
    REQUIRE(run(tmp, "codebook --descriptors " + toy("doc_descriptors.ifv") + " --k 6 --seed 3 --out " +
                         tmp.file("cb.ifv"))
                .code == 0);
    REQUIRE(run(tmp, "quantize --descriptors " + toy("doc_descriptors.ifv") + " --codebook " + tmp.file("cb.ifv") +
                         " --out " + tmp.file("dh.ifv"))
                .code == 0);
    REQUIRE(run(tmp, "quantize --descriptors " + toy("query_descriptors.ifv") + " --codebook " + tmp.file("cb.ifv") +
                         " --out " + tmp.file("qh.ifv"))
                .code == 0);
    REQUIRE(run(tmp, "-j 2 imgsim --doc-vectors " + tmp.file("dh.ifv") + " --query-vectors " + tmp.file("qh.ifv") +
                         " --corpus " + toy("corpus.jsonl") + " --queries " + toy("queries.jsonl") +
                         " --aggregate mean --out " + tmp.file("i.tsv"))
                .code == 0);
    auto table = ingest::load_scores(tmp.file("t.tsv"));
    table.merge(ingest::load_scores(tmp.file("i.tsv")));
    CHECK(table.size() == 72);
    ingest::write_scores(table, tmp.file("s.tsv"));

    const auto conf = tmp.write("f.conf", "w_text = 0.5\nt_upper = 0.2\n");
    const std::string fuse = "fuse --scores " + tmp.file("s.tsv") + " --diagnostics " + tmp.file("d.tsv");
    REQUIRE(run(tmp, fuse + " --out " + tmp.file("q.trec"), "INTERFUSE_CONFIG='" + conf + "'").code == 0);
    REQUIRE(run(tmp, fuse + " --config " + conf + " --out " + tmp.file("q2.trec")).code == 0);
    CHECK(read_file(tmp.file("q.trec")) == read_file(tmp.file("q2.trec")));
    REQUIRE(run(tmp, fuse + " --config " + conf + " --mode classical --tag base --out " + tmp.file("c.trec")).code == 0);
    CHECK(eval::load_run(tmp.file("c.trec")).tag == "base");
    REQUIRE(run(tmp, fuse + " --set t_upper=0.2 --out " + tmp.file("q3.trec")).code == 0);
    CHECK(read_file(tmp.file("q.trec")) == read_file(tmp.file("q3.trec")));

    auto e = run(tmp, "eval --run " + tmp.file("q.trec") + " --qrels " + toy("qrels.txt") + " --out " + tmp.file("e.csv"));
    REQUIRE(e.code == 0);
    CHECK(testing::contains(e.out, "MAP"));
    auto c = run(tmp, "compare --run-a " + tmp.file("c.trec") + " --run-b " + tmp.file("q.trec") + " --qrels " +
                          toy("qrels.txt") + " --metric AP --out " + tmp.file("cmp.csv"));
    REQUIRE(c.code == 0);
    CHECK(testing::contains(c.out, "AP\t"));
    CHECK(std::filesystem::exists(tmp.file("cmp.summary.csv")));
}

TEST_CASE("cli: repeated runs are byte-identical", "[cli]") {
    TempDir tmp;
    std::string first;
    for (int i = 0; i < 2; ++i) {
        const auto suffix = std::to_string(i);
        REQUIRE(run(tmp, "fuse --scores " + data("synthetic/scores.tsv") + " --config " + data("synthetic/fusion.conf") +
                             " --out " + tmp.file("r" + suffix) + " --diagnostics " + tmp.file("d" + suffix))
                    .code == 0);
        REQUIRE(run(tmp, "-j 4 textsim --corpus " + data("toy/corpus.jsonl") + " --queries " + data("toy/queries.jsonl") +
                             " --out " + tmp.file("t" + suffix))
                    .code == 0);
        const auto all = read_file(tmp.file("r" + suffix)) + read_file(tmp.file("d" + suffix)) +
                         read_file(tmp.file("t" + suffix));
        if (i == 0) first = all;
        else CHECK(all == first);
    }
}
