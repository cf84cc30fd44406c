#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "interfuse/core/strings.hpp"
#include "interfuse/text/porter.hpp"

namespace interfuse::text {

using StopwordSet = std::unordered_set<std::string>;

/// English list bundled with the engine (same words as data/stopwords_en.txt).
inline const StopwordSet& default_stopwords() {
    static const StopwordSet words = [] {
        constexpr std::string_view list =
            "i me my myself we our ours ourselves you you're you've you'll you'd your yours yourself "
            "yourselves he him his himself she she's her hers herself it it's its itself they them their "
            "theirs themselves what which who whom this that that'll these those am is are was were be "
            "been being have has had having do does did doing a an the and but if or because as until "
            "while of at by for with about against between into through during before after above below "
            "to from up down in out on off over under again further then once here there when where why "
            "how all any both each few more most other some such no nor not only own same so than too "
            "very s t can will just don don't should should've now d ll m o re ve y ain aren aren't "
            "couldn couldn't didn didn't doesn doesn't hadn hadn't hasn hasn't haven haven't isn isn't ma "
            "mightn mightn't mustn mustn't needn needn't shan shan't shouldn shouldn't wasn wasn't weren "
            "weren't won won't wouldn wouldn't";
        StopwordSet s;
        for (auto w : split_ws(list)) s.emplace(w);
        return s;
    }();
    return words;
}

/// One term per line; blank lines ignored; terms lowercased.
inline StopwordSet load_stopwords(const std::string& path) {
    auto in = open_input(path);
    StopwordSet out;
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty()) continue;
        std::string w(t);
        for (auto& c : w) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        out.insert(std::move(w));
    }
    return out;
}

namespace detail {

// ASCII letters and digits form words; bytes >= 0x80 are kept so UTF-8
// sequences stay inside their word. Everything else separates.
inline bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace detail

/// Lowercased surface words before stopword removal and stemming.
inline std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (detail::is_word_byte(c)) {
            cur.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

/// lowercase -> split on non-word bytes -> drop stopwords -> Porter stem.
inline std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords) {
    std::vector<std::string> out;
    const PorterStemmer stem;
    for (auto& w : split_words(text)) {
        if (stopwords.contains(w)) continue;
        out.push_back(stem(w));
    }
    return out;
}

}  // namespace interfuse::text
