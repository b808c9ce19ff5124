#include "celetrip/text.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace celetrip {

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Standard English stopword list (the usual 179-entry NLTK-style set).
const std::vector<std::string> kStopwords = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
    "you're", "you've", "you'll", "you'd", "your", "yours", "yourself",
    "yourselves", "he", "him", "his", "himself", "she", "she's", "her",
    "hers", "herself", "it", "it's", "its", "itself", "they", "them",
    "their", "theirs", "themselves", "what", "which", "who", "whom",
    "this", "that", "that'll", "these", "those", "am", "is", "are", "was",
    "were", "be", "been", "being", "have", "has", "had", "having", "do",
    "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
    "because", "as", "until", "while", "of", "at", "by", "for", "with",
    "about", "against", "between", "into", "through", "during", "before",
    "after", "above", "below", "to", "from", "up", "down", "in", "out",
    "on", "off", "over", "under", "again", "further", "then", "once",
    "here", "there", "when", "where", "why", "how", "all", "any", "both",
    "each", "few", "more", "most", "other", "some", "such", "no", "nor",
    "not", "only", "own", "same", "so", "than", "too", "very", "s", "t",
    "can", "will", "just", "don", "don't", "should", "should've", "now",
    "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't",
    "couldn", "couldn't", "didn", "didn't", "doesn", "doesn't", "hadn",
    "hadn't", "hasn", "hasn't", "haven", "haven't", "isn", "isn't", "ma",
    "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan",
    "shan't", "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't",
    "won", "won't", "wouldn", "wouldn't"};

const std::unordered_set<std::string>& stopword_set() {
    static const std::unordered_set<std::string> set(kStopwords.begin(),
                                                     kStopwords.end());
    return set;
}

// Porter stemmer working state: b[0..k] is the current word, j marks the
// stem end while a candidate suffix is being inspected.
struct Porter {
    std::string b;
    int k = 0;
    int j = 0;

    bool cons(int i) const {
        switch (b[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Measure of b[0..j]: the m in [C](VC)^m[V].
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j) return n;
            if (!cons(i)) break;
            i++;
        }
        i++;
        while (true) {
            while (true) {
                if (i > j) return n;
                if (cons(i)) break;
                i++;
            }
            i++;
            n++;
            while (true) {
                if (i > j) return n;
                if (!cons(i)) break;
                i++;
            }
            i++;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j; i++)
            if (!cons(i)) return true;
        return false;
    }

    bool double_c(int jj) const {
        if (jj < 1) return false;
        if (b[jj] != b[jj - 1]) return false;
        return cons(jj);
    }

    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char ch = b[i];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(const char* s) {
        int len = int(std::char_traits<char>::length(s));
        if (len > k + 1) return false;
        if (b.compare(k - len + 1, len, s) != 0) return false;
        j = k - len;
        return true;
    }

    void set_to(const char* s) {
        int len = int(std::char_traits<char>::length(s));
        b.replace(j + 1, b.size() - j - 1, s);
        k = j + len;
        b.resize(k + 1);
    }

    void r(const char* s) {
        if (m() > 0) set_to(s);
    }

    void step1ab() {
        if (b[k] == 's') {
            if (ends("sses")) {
                k -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (b[k - 1] != 's') {
                k--;
            }
            b.resize(k + 1);
        }
        if (ends("eed")) {
            if (m() > 0) {
                k--;
                b.resize(k + 1);
            }
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k = j;
            b.resize(k + 1);
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_c(k)) {
                char ch = b[k];
                if (ch != 'l' && ch != 's' && ch != 'z') {
                    k--;
                    b.resize(k + 1);
                }
            } else if (m() == 1 && cvc(k)) {
                set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b[k] = 'i';
    }

    void step2() {
        if (k < 1) return;
        switch (b[k - 1]) {
            case 'a':
                if (ends("ational")) { r("ate"); break; }
                if (ends("tional")) { r("tion"); break; }
                break;
            case 'c':
                if (ends("enci")) { r("ence"); break; }
                if (ends("anci")) { r("ance"); break; }
                break;
            case 'e':
                if (ends("izer")) { r("ize"); break; }
                break;
            case 'l':
                if (ends("abli")) { r("able"); break; }
                if (ends("alli")) { r("al"); break; }
                if (ends("entli")) { r("ent"); break; }
                if (ends("eli")) { r("e"); break; }
                if (ends("ousli")) { r("ous"); break; }
                break;
            case 'o':
                if (ends("ization")) { r("ize"); break; }
                if (ends("ation")) { r("ate"); break; }
                if (ends("ator")) { r("ate"); break; }
                break;
            case 's':
                if (ends("alism")) { r("al"); break; }
                if (ends("iveness")) { r("ive"); break; }
                if (ends("fulness")) { r("ful"); break; }
                if (ends("ousness")) { r("ous"); break; }
                break;
            case 't':
                if (ends("aliti")) { r("al"); break; }
                if (ends("iviti")) { r("ive"); break; }
                if (ends("biliti")) { r("ble"); break; }
                break;
            default:
                break;
        }
    }

    void step3() {
        switch (b[k]) {
            case 'e':
                if (ends("icate")) { r("ic"); break; }
                if (ends("ative")) { r(""); break; }
                if (ends("alize")) { r("al"); break; }
                break;
            case 'i':
                if (ends("iciti")) { r("ic"); break; }
                break;
            case 'l':
                if (ends("ical")) { r("ic"); break; }
                if (ends("ful")) { r(""); break; }
                break;
            case 's':
                if (ends("ness")) { r(""); break; }
                break;
            default:
                break;
        }
    }

    void step4() {
        if (k < 1) return;
        switch (b[k - 1]) {
            case 'a':
                if (ends("al")) break;
                return;
            case 'c':
                if (ends("ance")) break;
                if (ends("ence")) break;
                return;
            case 'e':
                if (ends("er")) break;
                return;
            case 'i':
                if (ends("ic")) break;
                return;
            case 'l':
                if (ends("able")) break;
                if (ends("ible")) break;
                return;
            case 'n':
                if (ends("ant")) break;
                if (ends("ement")) break;
                if (ends("ment")) break;
                if (ends("ent")) break;
                return;
            case 'o':
                if (ends("ion") && j >= 0 && (b[j] == 's' || b[j] == 't')) break;
                if (ends("ou")) break;
                return;
            case 's':
                if (ends("ism")) break;
                return;
            case 't':
                if (ends("ate")) break;
                if (ends("iti")) break;
                return;
            case 'u':
                if (ends("ous")) break;
                return;
            case 'v':
                if (ends("ive")) break;
                return;
            case 'z':
                if (ends("ize")) break;
                return;
            default:
                return;
        }
        if (m() > 1) {
            k = j;
            b.resize(k + 1);
        }
    }

    void step5() {
        j = k;
        if (b[k] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k - 1))) {
                k--;
                b.resize(k + 1);
            }
        }
        if (b[k] == 'l' && double_c(k) && m() > 1) {
            k--;
            b.resize(k + 1);
        }
    }
};

}  // namespace

std::string porter_stem(const std::string& word) {
    if (word.size() <= 2) return word;
    Porter p;
    p.b = word;
    p.k = int(word.size()) - 1;
    p.step1ab();
    p.step1c();
    p.step2();
    p.step3();
    p.step4();
    p.step5();
    return p.b;
}

const std::vector<std::string>& stopword_list() { return kStopwords; }

bool is_stopword(const std::string& lower_token) {
    return stopword_set().count(lower_token) > 0;
}

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return char(std::tolower(c));
    });
    return out;
}

std::string strip_possessive(const std::string& token) {
    if (token.size() >= 2) {
        char c = token[token.size() - 1];
        if ((c == 's' || c == 'S') && token[token.size() - 2] == '\'')
            return token.substr(0, token.size() - 2);
    }
    if (!token.empty() && token.back() == '\'')
        return token.substr(0, token.size() - 1);
    return token;
}

std::string normalize_phrase(const std::string& s) {
    std::string out;
    for (const auto& tok : tokenize(s)) {
        std::string t = strip_possessive(lowercase(tok));
        if (t.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

std::vector<std::vector<std::string>> tokenize_sentences(const std::string& text) {
    // Normalize the UTF-8 right single quote to an ASCII apostrophe.
    std::string norm;
    norm.reserve(text.size());
    for (size_t i = 0; i < text.size(); i++) {
        if (i + 2 < text.size() && (unsigned char)text[i] == 0xE2 &&
            (unsigned char)text[i + 1] == 0x80 &&
            (unsigned char)text[i + 2] == 0x99) {
            norm.push_back('\'');
            i += 2;
        } else {
            norm.push_back(text[i]);
        }
    }

    std::vector<std::vector<std::string>> sentences;
    std::vector<std::string> current;
    std::string token;
    auto flush_token = [&]() {
        if (!token.empty()) {
            while (!token.empty() && token.back() == '\'') token.pop_back();
            if (!token.empty()) current.push_back(token);
            token.clear();
        }
    };
    auto flush_sentence = [&]() {
        flush_token();
        if (!current.empty()) {
            sentences.push_back(current);
            current.clear();
        }
    };
    for (char c : norm) {
        if (is_word_char(c)) {
            token.push_back(c);
        } else if (c == '\'' && !token.empty()) {
            token.push_back(c);
        } else if (c == '.' || c == '!' || c == '?') {
            flush_sentence();
        } else {
            flush_token();
        }
    }
    flush_sentence();
    return sentences;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    for (const auto& sent : tokenize_sentences(text))
        out.insert(out.end(), sent.begin(), sent.end());
    return out;
}

std::vector<std::string> stem_tokens(const std::vector<std::string>& raw_tokens) {
    std::vector<std::string> out;
    out.reserve(raw_tokens.size());
    for (const auto& raw : raw_tokens) {
        std::string t = lowercase(raw);
        if (is_stopword(t)) continue;
        t = strip_possessive(t);
        if (t.empty() || is_stopword(t)) continue;
        t.erase(std::remove(t.begin(), t.end(), '\''), t.end());
        if (t.empty()) continue;
        bool has_digit = std::any_of(t.begin(), t.end(), [](unsigned char c) {
            return std::isdigit(c) != 0;
        });
        out.push_back(has_digit ? t : porter_stem(t));
    }
    return out;
}

std::vector<std::vector<std::string>> preprocess(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    for (const auto& sent : tokenize_sentences(text)) out.push_back(stem_tokens(sent));
    return out;
}

}  // namespace celetrip
