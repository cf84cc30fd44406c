#pragma once

#include <string>
#include <string_view>

namespace interfuse::text {

/// Porter suffix-stripping stemmer, matching the reference C implementation:
/// "bli" -> "ble" instead of "abli" -> "able", plus "logi" -> "log".
/// Input is expected lowercase; words of length <= 2 are returned unchanged.
class PorterStemmer {
public:
    [[nodiscard]] std::string operator()(std::string_view word) const {
        State s{std::string(word)};
        if (s.b.size() <= 2) return s.b;
        s.k = static_cast<int>(s.b.size()) - 1;
        s.step1ab();
        if (s.k > 0) {
            s.step1c();
            s.step2();
            s.step3();
            s.step4();
            s.step5();
        }
        s.b.resize(static_cast<std::size_t>(s.k + 1));
        return s.b;
    }

private:
    struct State {
        std::string b;
        int k = 0;  // end of the current word
        int j = 0;  // end of the stem when a suffix matched

        [[nodiscard]] bool cons(int i) const {
            switch (b[i]) {
                case 'a': case 'e': case 'i': case 'o': case 'u': return false;
                case 'y': return i == 0 ? true : !cons(i - 1);
                default: return true;
            }
        }

        // Number of VC sequences in b[0..j].
        [[nodiscard]] int m() const {
            int n = 0;
            int i = 0;
            for (;;) {
                if (i > j) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
            for (;;) {
                for (;;) {
                    if (i > j) return n;
                    if (cons(i)) break;
                    ++i;
                }
                ++i;
                ++n;
                for (;;) {
                    if (i > j) return n;
                    if (!cons(i)) break;
                    ++i;
                }
                ++i;
            }
        }

        [[nodiscard]] bool vowel_in_stem() const {
            for (int i = 0; i <= j; ++i) {
                if (!cons(i)) return true;
            }
            return false;
        }

        [[nodiscard]] bool double_consonant(int i) const {
            if (i < 1) return false;
            if (b[i] != b[i - 1]) return false;
            return cons(i);
        }

        // consonant-vowel-consonant ending at i, last consonant not w, x or y.
        [[nodiscard]] bool cvc(int i) const {
            if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
            const char ch = b[i];
            return ch != 'w' && ch != 'x' && ch != 'y';
        }

        bool ends(std::string_view s) {
            const int len = static_cast<int>(s.size());
            if (len > k + 1) return false;
            if (std::string_view(b).substr(static_cast<std::size_t>(k - len + 1), s.size()) != s) return false;
            j = k - len;
            return true;
        }

        void set_to(std::string_view s) {
            b.replace(static_cast<std::size_t>(j + 1), static_cast<std::size_t>(k - j), s);
            k = j + static_cast<int>(s.size());
            b.resize(static_cast<std::size_t>(k + 1));
        }

        void replace_if_measure(std::string_view s) {
            if (m() > 0) set_to(s);
        }

        void step1ab() {
            if (b[k] == 's') {
                if (ends("sses")) {
                    k -= 2;
                } else if (ends("ies")) {
                    set_to("i");
                } else if (b[k - 1] != 's') {
                    --k;
                }
            }
            if (ends("eed")) {
                if (m() > 0) --k;
            } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
                k = j;
                if (ends("at")) {
                    set_to("ate");
                } else if (ends("bl")) {
                    set_to("ble");
                } else if (ends("iz")) {
                    set_to("ize");
                } else if (double_consonant(k)) {
                    --k;
                    const char ch = b[k];
                    if (ch == 'l' || ch == 's' || ch == 'z') ++k;
                } else if (j = k; m() == 1 && cvc(k)) {
                    set_to("e");
                }
            }
        }

        void step1c() {
            if (ends("y") && vowel_in_stem()) b[k] = 'i';
        }

        // Each table tries suffixes in order; the first textual match ends the
        // search whether or not the measure condition allows the rewrite.
        bool try_rules(std::initializer_list<std::pair<std::string_view, std::string_view>> rules) {
            for (auto [suffix, replacement] : rules) {
                if (ends(suffix)) {
                    replace_if_measure(replacement);
                    return true;
                }
            }
            return false;
        }

        void step2() {
            if (k < 1) return;
            switch (b[k - 1]) {
                case 'a': try_rules({{"ational", "ate"}, {"tional", "tion"}}); break;
                case 'c': try_rules({{"enci", "ence"}, {"anci", "ance"}}); break;
                case 'e': try_rules({{"izer", "ize"}}); break;
                case 'l':
                    try_rules({{"bli", "ble"}, {"alli", "al"}, {"entli", "ent"}, {"eli", "e"}, {"ousli", "ous"}});
                    break;
                case 'o': try_rules({{"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}}); break;
                case 's':
                    try_rules({{"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"}});
                    break;
                case 't': try_rules({{"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}}); break;
                case 'g': try_rules({{"logi", "log"}}); break;
                default: break;
            }
        }

        void step3() {
            switch (b[k]) {
                case 'e': try_rules({{"icate", "ic"}, {"ative", ""}, {"alize", "al"}}); break;
                case 'i': try_rules({{"iciti", "ic"}}); break;
                case 'l': try_rules({{"ical", "ic"}, {"ful", ""}}); break;
                case 's': try_rules({{"ness", ""}}); break;
                default: break;
            }
        }

        bool any_ends(std::initializer_list<std::string_view> suffixes) {
            for (auto s : suffixes) {
                if (ends(s)) return true;
            }
            return false;
        }

        void step4() {
            if (k < 1) return;
            bool matched = false;
            switch (b[k - 1]) {
                case 'a': matched = ends("al"); break;
                case 'c': matched = any_ends({"ance", "ence"}); break;
                case 'e': matched = ends("er"); break;
                case 'i': matched = ends("ic"); break;
                case 'l': matched = any_ends({"able", "ible"}); break;
                case 'n': matched = any_ends({"ant", "ement", "ment", "ent"}); break;
                case 'o':
                    if (ends("ion") && j >= 0 && (b[j] == 's' || b[j] == 't')) {
                        matched = true;
                    } else {
                        matched = ends("ou");
                    }
                    break;
                case 's': matched = ends("ism"); break;
                case 't': matched = any_ends({"ate", "iti"}); break;
                case 'u': matched = ends("ous"); break;
                case 'v': matched = ends("ive"); break;
                case 'z': matched = ends("ize"); break;
                default: break;
            }
            if (matched && m() > 1) k = j;
        }

        void step5() {
            j = k;
            if (b[k] == 'e') {
                const int a = m();
                if (a > 1 || (a == 1 && !cvc(k - 1))) --k;
            }
            if (b[k] == 'l' && double_consonant(k) && m() > 1) --k;
        }
    };
};

inline std::string porter_stem(std::string_view word) { return PorterStemmer{}(word); }

}  // namespace interfuse::text
