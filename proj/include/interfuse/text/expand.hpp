#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "interfuse/core/log.hpp"
#include "interfuse/ingest/corpus.hpp"
#include "interfuse/text/tokenize.hpp"

namespace interfuse::text {

struct ExpansionOptions {
    enum class Count { term_frequency, document_frequency };

    std::size_t k = 10;
    Count count = Count::term_frequency;
    bool exclude_query_terms = false;
};

struct ExpansionTerm {
    std::string stem;
    std::string surface;  // word appended to the query text
    std::size_t count = 0;
};

/// Ranks stems from the relevant documents by frequency (descending), ties by
/// stem (ascending), and returns the top k.
inline std::vector<ExpansionTerm> select_expansion_terms(const ingest::QueryRecord& query,
                                                         const std::vector<ingest::DocumentRecord>& relevant_docs,
                                                         const StopwordSet& stopwords,
                                                         const ExpansionOptions& opt = {}) {
    const PorterStemmer stem;
    std::set<std::string> query_terms;
    if (opt.exclude_query_terms) {
        for (auto& t : tokenize(query.text, stopwords)) query_terms.insert(std::move(t));
    }
    std::map<std::string, std::size_t> freq;
    std::map<std::string, std::map<std::string, std::size_t>> surfaces;
    for (const auto& d : relevant_docs) {
        std::set<std::string> in_doc;
        for (auto& w : split_words(d.text)) {
            if (stopwords.contains(w)) continue;
            std::string s = stem(w);
            if (query_terms.contains(s)) continue;
            ++surfaces[s][w];
            if (opt.count == ExpansionOptions::Count::term_frequency || in_doc.insert(s).second) ++freq[s];
        }
    }
    std::vector<ExpansionTerm> ranked;
    ranked.reserve(freq.size());
    for (const auto& [s, n] : freq) {
        // Most frequent surface form of this stem, ties lexicographic. Its own
        // stem is s, so re-tokenizing the expanded text yields exactly s.
        const auto& forms = surfaces[s];
        auto best = std::max_element(forms.begin(), forms.end(), [](const auto& a, const auto& b) {
            return a.second < b.second || (a.second == b.second && a.first > b.first);
        });
        ranked.push_back({s, best->first, n});
    }
    std::sort(ranked.begin(), ranked.end(), [](const ExpansionTerm& a, const ExpansionTerm& b) {
        return a.count != b.count ? a.count > b.count : a.stem < b.stem;
    });
    if (ranked.size() > opt.k) ranked.resize(opt.k);
    return ranked;
}

/// Simulated explicit relevance feedback: appends the k most frequent terms of
/// the judged-relevant documents to the query text.
inline ingest::QueryRecord expand_query(const ingest::QueryRecord& query,
                                        const std::vector<ingest::DocumentRecord>& relevant_docs,
                                        const StopwordSet& stopwords, const ExpansionOptions& opt = {}) {
    if (relevant_docs.empty()) {
        log::warn("expand_query: no relevant documents for query '" + query.query_id + "'; left unchanged");
        return query;
    }
    if (opt.k == 0) return query;
    ingest::QueryRecord out = query;
    for (const auto& t : select_expansion_terms(query, relevant_docs, stopwords, opt)) {
        if (!out.text.empty()) out.text += ' ';
        out.text += t.surface;
    }
    return out;
}

}  // namespace interfuse::text
