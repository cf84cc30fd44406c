#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "interfuse/core/error.hpp"
#include "interfuse/ingest/corpus.hpp"
#include "interfuse/text/tokenize.hpp"

namespace interfuse::text {

/// Smoothed inverse document frequency: ln((1 + N) / (1 + df)) + 1, i.e. one
/// extra pseudo-document containing every term. Equals 1 exactly at df == N.
inline double smoothed_idf(std::size_t df, std::size_t total_docs) {
    if (df == total_docs) return 1.0;
    return std::log((1.0 + static_cast<double>(total_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

struct TermStats {
    std::uint32_t index = 0;
    std::uint32_t document_frequency = 0;
};

/// Term dictionary built from one document collection. Term indices follow
/// lexicographic term order.
class Vocabulary {
public:
    Vocabulary() = default;

    Vocabulary(std::map<std::string, std::uint32_t> df, std::size_t total_docs) : total_docs_(total_docs) {
        std::uint32_t next = 0;
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over (term, df) and N
        auto mix = [&h](std::string_view bytes) {
            for (unsigned char c : bytes) {
                h ^= c;
                h *= 1099511628211ULL;
            }
        };
        for (auto& [term, count] : df) {
            terms_.emplace(term, TermStats{next++, count});
            mix(term);
            mix(std::string(1, '\0') + std::to_string(count) + '\n');
        }
        mix(std::to_string(total_docs));
        fingerprint_ = h;
        idf_.resize(terms_.size());
        for (const auto& [term, st] : terms_) idf_[st.index] = smoothed_idf(st.document_frequency, total_docs_);
    }

    [[nodiscard]] const TermStats* find(const std::string& term) const {
        auto it = terms_.find(term);
        return it == terms_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] double idf(std::uint32_t index) const { return idf_.at(index); }
    [[nodiscard]] std::size_t size() const { return terms_.size(); }
    [[nodiscard]] std::size_t total_docs() const { return total_docs_; }
    [[nodiscard]] std::uint64_t fingerprint() const { return fingerprint_; }
    [[nodiscard]] const std::unordered_map<std::string, TermStats>& terms() const { return terms_; }

private:
    std::unordered_map<std::string, TermStats> terms_;
    std::vector<double> idf_;
    std::size_t total_docs_ = 0;
    std::uint64_t fingerprint_ = 0;
};

/// Sparse non-negative weights sorted by term index, tagged with the
/// vocabulary they index into.
class SparseTermVector {
public:
    using Entry = std::pair<std::uint32_t, double>;

    SparseTermVector() = default;

    /// Entries must have strictly increasing indices and non-negative weights.
    SparseTermVector(std::vector<Entry> entries, std::uint64_t vocabulary)
        : entries_(std::move(entries)), vocabulary_(vocabulary) {
        double acc = 0.0;
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (i > 0 && entries_[i].first <= entries_[i - 1].first) {
                throw Error("SparseTermVector: indices must be strictly increasing");
            }
            if (!(entries_[i].second >= 0.0)) throw Error("SparseTermVector: weights must be non-negative");
            acc += entries_[i].second * entries_[i].second;
        }
        norm_ = std::sqrt(acc);
    }

    [[nodiscard]] SparseTermVector normalized() const {
        if (norm_ == 0.0) return *this;
        std::vector<Entry> e = entries_;
        for (auto& [_, w] : e) w /= norm_;
        return SparseTermVector(std::move(e), vocabulary_);
    }

    [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
    [[nodiscard]] double norm() const { return norm_; }
    [[nodiscard]] bool is_zero() const { return norm_ == 0.0; }
    [[nodiscard]] std::uint64_t vocabulary() const { return vocabulary_; }

    bool operator==(const SparseTermVector&) const = default;

private:
    std::vector<Entry> entries_;
    double norm_ = 0.0;
    std::uint64_t vocabulary_ = 0;
};

/// Cosine of two term vectors; 0 when either is all-zero. Clamped to [0, 1]
/// against rounding since weights are non-negative.
inline double text_score(const SparseTermVector& query, const SparseTermVector& doc) {
    if (query.vocabulary() != doc.vocabulary()) {
        throw ValidationError("text_score: vectors were built over different vocabularies");
    }
    if (query.is_zero() || doc.is_zero()) return 0.0;
    const auto& a = query.entries();
    const auto& b = doc.entries();
    double dot = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            ++i;
        } else if (b[j].first < a[i].first) {
            ++j;
        } else {
            dot += a[i].second * b[j].second;
            ++i;
            ++j;
        }
    }
    return std::clamp(dot / (query.norm() * doc.norm()), 0.0, 1.0);
}

/// TF-IDF index over a document collection: raw term counts times smoothed
/// idf, each document vector L2-normalized.
class TextIndex {
public:
    TextIndex(const std::vector<ingest::DocumentRecord>& docs, StopwordSet stopwords)
        : stopwords_(std::move(stopwords)) {
        if (docs.empty()) throw ValidationError("build_index: empty document collection");
        std::vector<std::vector<std::string>> tokens;
        tokens.reserve(docs.size());
        std::map<std::string, std::uint32_t> df;
        for (const auto& d : docs) {
            tokens.push_back(tokenize(d.text, stopwords_));
            std::vector<std::string> uniq = tokens.back();
            std::sort(uniq.begin(), uniq.end());
            uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
            for (auto& t : uniq) ++df[t];
        }
        vocabulary_ = Vocabulary(std::move(df), docs.size());
        doc_ids_.reserve(docs.size());
        doc_vectors_.reserve(docs.size());
        for (std::size_t i = 0; i < docs.size(); ++i) {
            doc_ids_.push_back(docs[i].doc_id);
            doc_vectors_.push_back(weigh(tokens[i]).normalized());
        }
    }

    /// Normalized tf-idf vector for arbitrary text; out-of-vocabulary terms drop out.
    [[nodiscard]] SparseTermVector vectorize(std::string_view text) const {
        return weigh(tokenize(text, stopwords_)).normalized();
    }

    [[nodiscard]] const Vocabulary& vocabulary() const { return vocabulary_; }
    [[nodiscard]] const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    [[nodiscard]] const std::vector<SparseTermVector>& doc_vectors() const { return doc_vectors_; }
    [[nodiscard]] const StopwordSet& stopwords() const { return stopwords_; }

private:
    [[nodiscard]] SparseTermVector weigh(const std::vector<std::string>& tokens) const {
        std::map<std::uint32_t, std::uint32_t> tf;
        for (const auto& t : tokens) {
            if (const auto* st = vocabulary_.find(t)) ++tf[st->index];
        }
        std::vector<SparseTermVector::Entry> e;
        e.reserve(tf.size());
        for (auto [idx, count] : tf) e.emplace_back(idx, static_cast<double>(count) * vocabulary_.idf(idx));
        return SparseTermVector(std::move(e), vocabulary_.fingerprint());
    }

    StopwordSet stopwords_;
    Vocabulary vocabulary_;
    std::vector<std::string> doc_ids_;
    std::vector<SparseTermVector> doc_vectors_;
};

inline TextIndex build_index(const std::vector<ingest::DocumentRecord>& docs,
                             const StopwordSet& stopwords = default_stopwords()) {
    return TextIndex(docs, stopwords);
}

}  // namespace interfuse::text
