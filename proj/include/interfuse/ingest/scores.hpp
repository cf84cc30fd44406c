#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "interfuse/core/error.hpp"
#include "interfuse/core/strings.hpp"
#include "interfuse/ingest/load_report.hpp"

namespace interfuse::ingest {

enum class Modality { text, image };

inline std::string_view to_string(Modality m) { return m == Modality::text ? "text" : "image"; }

inline std::optional<Modality> parse_modality(std::string_view tag) {
    if (tag == "text") return Modality::text;
    if (tag == "image") return Modality::image;
    return std::nullopt;
}

struct ScoreKey {
    std::string query_id;
    std::string doc_id;
    Modality modality = Modality::text;

    auto operator<=>(const ScoreKey&) const = default;
    bool operator==(const ScoreKey&) const = default;
};

/// Unimodal relevance scores keyed by (query, document, modality). Iteration
/// is ordered by key, which fixes the order of everything derived from it.
class ScoreTable {
public:
    /// Inserts a new entry; duplicates, negative and non-finite scores throw.
    void add(ScoreKey key, double score) {
        check_score(key, score);
        auto [it, inserted] = entries_.emplace(std::move(key), score);
        if (!inserted) throw ValidationError("duplicate score key " + describe(it->first));
    }

    /// Inserts or overwrites.
    void set(ScoreKey key, double score) {
        check_score(key, score);
        entries_[std::move(key)] = score;
    }

    [[nodiscard]] std::optional<double> get(const std::string& query_id, const std::string& doc_id,
                                            Modality m) const {
        auto it = entries_.find(ScoreKey{query_id, doc_id, m});
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] std::set<std::string> query_ids() const {
        std::set<std::string> out;
        for (const auto& [k, _] : entries_) out.insert(k.query_id);
        return out;
    }

    /// Documents with at least one score for the query.
    [[nodiscard]] std::set<std::string> doc_ids(const std::string& query_id) const {
        std::set<std::string> out;
        for (auto it = entries_.lower_bound(ScoreKey{query_id, "", Modality::text});
             it != entries_.end() && it->first.query_id == query_id; ++it) {
            out.insert(it->first.doc_id);
        }
        return out;
    }

    /// Adds all entries of `other`; overlapping keys are an error.
    void merge(const ScoreTable& other) {
        for (const auto& [k, v] : other.entries_) add(k, v);
    }

    [[nodiscard]] const std::map<ScoreKey, double>& entries() const { return entries_; }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] bool empty() const { return entries_.empty(); }

    bool operator==(const ScoreTable&) const = default;

    static std::string describe(const ScoreKey& k) {
        return "(" + k.query_id + ", " + k.doc_id + ", " + std::string(to_string(k.modality)) + ")";
    }

private:
    static void check_score(const ScoreKey& k, double score) {
        if (!std::isfinite(score)) throw ValidationError("non-finite score for " + describe(k));
        if (score < 0.0) throw ValidationError("negative score " + format_real(score) + " for " + describe(k));
    }

    std::map<ScoreKey, double> entries_;
};

/// Reads "query_id<TAB>doc_id<TAB>modality<TAB>score" rows. Lines starting
/// with '#' are comments.
inline ScoreTable load_scores(const std::string& path, LoadReport* report = nullptr) {
    LoadReport local;
    LoadReport& rep = report ? *report : local;
    rep.path = path;
    auto in = open_input(path);
    ScoreTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(std::move(line));
        if (trim(line).empty() || line.front() == '#') continue;
        ++rep.records_seen;
        auto f = split_on(line, '\t');
        if (f.size() != 4) {
            rep.reject(line_no, "expected 4 tab-separated fields, got " + std::to_string(f.size()));
            continue;
        }
        auto modality = parse_modality(f[2]);
        if (!modality) {
            rep.reject(line_no, "unknown modality tag '" + std::string(f[2]) + "'");
            continue;
        }
        auto score = parse_real(trim(f[3]));
        if (!score) {
            rep.reject(line_no, "score '" + std::string(f[3]) + "' is not a number");
            continue;
        }
        if (f[0].empty() || f[1].empty()) {
            rep.reject(line_no, "empty query or document id");
            continue;
        }
        try {
            table.add(ScoreKey{std::string(f[0]), std::string(f[1]), *modality}, *score);
        } catch (const ValidationError& e) {
            rep.reject(line_no, e.what());
            continue;
        }
        ++rep.accepted;
    }
    if (!report) rep.throw_if_failed();
    return table;
}

inline void write_scores(const ScoreTable& table, const std::string& path) {
    auto out = open_output(path, std::ios::out | std::ios::binary);
    for (const auto& [k, v] : table.entries()) {
        out << k.query_id << '\t' << k.doc_id << '\t' << to_string(k.modality) << '\t'
            << format_exact(v) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace interfuse::ingest
