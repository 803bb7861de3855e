#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace stylesim {

inline bool is_ascii_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

// Token characters: letters, digits, apostrophes. Bytes >= 0x80 (UTF-8
// continuation or lead bytes) are treated as letters so accented words
// survive as single tokens.
inline bool is_token_char(char c) {
    return is_ascii_alpha(c) || is_ascii_digit(c) || c == '\'' ||
           static_cast<unsigned char>(c) >= 0x80;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Lower-cased word tokens; punctuation separates. Leading/trailing
// apostrophes are stripped so quoted words ('hello') don't grow bogus
// characters, while interior ones (don't) are kept.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&]() {
        while (!cur.empty() && cur.front() == '\'') cur.erase(cur.begin());
        while (!cur.empty() && cur.back() == '\'') cur.pop_back();
        if (!cur.empty()) tokens.push_back(to_lower(cur));
        cur.clear();
    };
    for (char c : text) {
        if (is_token_char(c)) {
            cur.push_back(c);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

// Raw whitespace-separated chunks, case preserved. Used for cues that live
// in the surface form (emoticons, ALL-CAPS, standalone lowercase "i").
inline std::vector<std::string> whitespace_chunks(std::string_view text) {
    std::vector<std::string> chunks;
    std::string cur;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                chunks.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) chunks.push_back(cur);
    return chunks;
}

// Sentence segments split on runs of [.!?]. Segments with no token chars
// are dropped, so "Hi." is one sentence and "..." is none.
inline std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    std::string cur;
    auto flush = [&]() {
        bool has_content = std::any_of(cur.begin(), cur.end(), is_token_char);
        if (has_content) sentences.push_back(trim(cur));
        cur.clear();
    };
    for (char c : text) {
        if (c == '.' || c == '!' || c == '?') {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return sentences;
}

// Collapses interior whitespace and lower-cases; the cache key used by the
// utterance-keyed policy cache.
inline std::string normalize_utterance(std::string_view text) {
    std::string out;
    bool in_space = true;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            in_space = false;
            out.push_back(static_cast<char>(
                std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

} // namespace stylesim
