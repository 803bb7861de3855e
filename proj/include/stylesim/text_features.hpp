#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stylesim/lexicon.hpp"
#include "stylesim/style_vector.hpp"
#include "stylesim/tokenize.hpp"

namespace stylesim {

enum class Speaker { User, Bot };

struct Utterance {
    std::string text;
    Speaker speaker = Speaker::User;
    int turn_index = 0;
};

// ---------------------------------------------------------------------------
// Readability
// ---------------------------------------------------------------------------

inline bool is_vowel_letter(char c) {
    switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
        return true;
    default:
        return false;
    }
}

// Vowel-group heuristic: count maximal vowel runs, drop a silent trailing
// 'e' unless the word ends in consonant+"le", floor at 1. Non-alphabetic
// tokens count as one syllable.
inline int count_syllables(std::string_view word) {
    std::string w = to_lower(word);
    std::string letters;
    for (char c : w) {
        if (is_ascii_alpha(c)) letters.push_back(c);
    }
    if (letters.empty()) return 1;

    int runs = 0;
    bool in_run = false;
    for (char c : letters) {
        if (is_vowel_letter(c)) {
            if (!in_run) ++runs;
            in_run = true;
        } else {
            in_run = false;
        }
    }

    if (letters.size() >= 2 && letters.back() == 'e') {
        bool consonant_le = letters.size() >= 3 &&
                            letters[letters.size() - 2] == 'l' &&
                            !is_vowel_letter(letters[letters.size() - 3]);
        if (!consonant_le) --runs;
    }
    return runs < 1 ? 1 : runs;
}

struct TextCounts {
    std::size_t words = 0;
    std::size_t sentences = 0;
    std::size_t syllables = 0;
};

inline TextCounts text_counts(std::string_view text) {
    TextCounts c;
    auto tokens = tokenize(text);
    c.words = tokens.size();
    for (const auto& t : tokens) {
        c.syllables += static_cast<std::size_t>(count_syllables(t));
    }
    c.sentences = split_sentences(text).size();
    if (c.sentences == 0 && c.words > 0) c.sentences = 1;
    return c;
}

// Flesch Reading Ease over this module's own tokenizer and syllable counter.
inline double flesch_reading_ease(std::string_view text) {
    TextCounts c = text_counts(text);
    if (c.words == 0) throw std::invalid_argument("empty utterance");
    double words = static_cast<double>(c.words);
    double sentences = static_cast<double>(c.sentences);
    double syllables = static_cast<double>(c.syllables);
    return 206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words);
}

// ---------------------------------------------------------------------------
// Sentiment
// ---------------------------------------------------------------------------

namespace detail {
inline constexpr double kNegationScalar = -0.74;
inline constexpr double kBoosterIncrement = 0.293;
inline constexpr double kCompoundAlpha = 15.0;
inline constexpr int kSentimentWindow = 3;
} // namespace detail

// Lexicon sum with negation flip and booster increments, squashed by
// x / sqrt(x^2 + 15) into [-1, 1]. Text without lexicon hits scores 0.
inline double sentiment_compound(std::string_view text, const LexiconSet& lex) {
    auto tokens = tokenize(text);
    double total = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto it = lex.sentiment.find(tokens[i]);
        if (it == lex.sentiment.end()) continue;
        double valence = it->second;

        bool negated = false;
        int boosters = 0;
        for (int back = 1; back <= detail::kSentimentWindow; ++back) {
            if (static_cast<std::size_t>(back) > i) break;
            const std::string& prev = tokens[i - static_cast<std::size_t>(back)];
            if (lex.negators.count(prev)) negated = true;
            if (lex.boosters.count(prev)) ++boosters;
        }
        if (boosters > 0) {
            double sign = valence >= 0.0 ? 1.0 : -1.0;
            valence += sign * detail::kBoosterIncrement * boosters;
        }
        if (negated) valence *= detail::kNegationScalar;
        total += valence;
    }
    if (total == 0.0) return 0.0;
    return total / std::sqrt(total * total + detail::kCompoundAlpha);
}

// ---------------------------------------------------------------------------
// Informality
// ---------------------------------------------------------------------------

namespace detail {
// Cue weights for the informality score. Fixed; changing them is a breaking
// change to golden tests.
inline constexpr double kWInformalRate = 2.5;
inline constexpr double kWContractionRate = 1.5;
inline constexpr double kWLowercaseI = 0.8;
inline constexpr double kWRepeatPunct = 0.6;
inline constexpr double kWAllLower = 0.8;
inline constexpr double kWFormalRate = 3.0;
inline constexpr double kWWordLenExcess = 0.6;
inline constexpr double kWordLenBaseline = 4.0;
inline constexpr int kCueCountCap = 3;

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline int count_repeated_terminal_punct(std::string_view text) {
    int count = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '!' || c == '?') {
            std::size_t j = i;
            while (j < text.size() && (text[j] == '!' || text[j] == '?')) ++j;
            if (j - i >= 2) ++count;
            i = j;
        } else {
            ++i;
        }
    }
    return count;
}
} // namespace detail

// Cue-based register score in [0,1]; 0.5 when no cues fire. Informal
// markers, contractions, lowercase standalone "i", repeated !!/??, and
// all-lowercase text push up; formal markers and long words push down.
inline double informality_score(std::string_view text, const LexiconSet& lex) {
    auto tokens = tokenize(text);

    double informal_rate = 0.0;
    double contraction_rate = 0.0;
    double formal_rate = 0.0;
    double len_term = 0.0;
    if (!tokens.empty()) {
        std::size_t informal = 0, contractions = 0, formal = 0, chars = 0;
        for (const auto& t : tokens) {
            if (lex.informal_markers.count(t)) ++informal;
            if (t.find('\'') != std::string::npos) ++contractions;
            if (lex.formal_markers.count(t)) ++formal;
            chars += t.size();
        }
        double n = static_cast<double>(tokens.size());
        informal_rate = static_cast<double>(informal) / n;
        contraction_rate = static_cast<double>(contractions) / n;
        formal_rate = static_cast<double>(formal) / n;
        len_term = static_cast<double>(chars) / n - detail::kWordLenBaseline;
    }

    int lowercase_i = 0;
    int emoticons = 0;
    for (const auto& chunk : whitespace_chunks(text)) {
        if (chunk == "i") ++lowercase_i;
        std::string stripped = chunk;
        while (!stripped.empty() &&
               (stripped.back() == '.' || stripped.back() == ',')) {
            stripped.pop_back();
        }
        if (!stripped.empty() && lex.informal_markers.count(stripped)) {
            bool wordlike = std::all_of(stripped.begin(), stripped.end(),
                                        [](char c) { return is_token_char(c); });
            if (!wordlike) ++emoticons; // ":)" etc.; words counted above
        }
    }
    lowercase_i = std::min(lowercase_i, detail::kCueCountCap);
    emoticons = std::min(emoticons, detail::kCueCountCap);

    int repeat_punct = std::min(detail::count_repeated_terminal_punct(text),
                                detail::kCueCountCap);

    bool has_letter = false, has_upper = false;
    for (char c : std::string(text)) {
        if (is_ascii_alpha(c)) {
            has_letter = true;
            if (c >= 'A' && c <= 'Z') has_upper = true;
        }
    }
    double all_lower = (has_letter && !has_upper) ? 1.0 : 0.0;

    double z = detail::kWInformalRate * informal_rate +
               detail::kWContractionRate * contraction_rate +
               detail::kWLowercaseI * (lowercase_i + emoticons) +
               detail::kWRepeatPunct * repeat_punct +
               detail::kWAllLower * all_lower -
               detail::kWFormalRate * formal_rate -
               detail::kWWordLenExcess * len_term;
    return detail::logistic(z);
}

// ---------------------------------------------------------------------------
// Word-class rates
// ---------------------------------------------------------------------------

inline double function_word_ratio(std::string_view text, const LexiconSet& lex) {
    auto tokens = tokenize(text);
    if (tokens.empty()) throw std::invalid_argument("empty utterance");
    std::size_t hits = 0;
    for (const auto& t : tokens) {
        if (lex.function_words.count(t)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

inline double category_rate(std::string_view text, const WordSet& category) {
    auto tokens = tokenize(text);
    std::size_t hits = 0;
    for (const auto& t : tokens) {
        if (category.count(t)) ++hits;
    }
    double denom = tokens.empty() ? 1.0 : static_cast<double>(tokens.size());
    return static_cast<double>(hits) / denom;
}

// Keeps only function-word tokens, whitespace-joined, original order.
inline std::string function_word_filter(std::string_view text,
                                        const LexiconSet& lex) {
    std::string out;
    for (const auto& t : tokenize(text)) {
        if (!lex.function_words.count(t)) continue;
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full vector
// ---------------------------------------------------------------------------

inline StyleVector style_vector(std::string_view text, const LexiconSet& lex) {
    if (trim(text).empty()) throw std::invalid_argument("empty utterance");
    TextCounts counts = text_counts(text);
    if (counts.words == 0) throw std::invalid_argument("empty utterance");

    StyleVector v{};
    v[kInformality] = informality_score(text, lex);
    v[kSentiment] = sentiment_compound(text, lex);
    v[kAvgSentenceLen] = static_cast<double>(counts.words) /
                         static_cast<double>(counts.sentences);
    v[kReadability] = flesch_reading_ease(text);
    v[kSocialRate] = category_rate(text, lex.social);
    v[kCognitiveRate] = category_rate(text, lex.cognitive);
    v[kAffectiveRate] = category_rate(text, lex.affective);
    v[kFunctionWordRatio] = function_word_ratio(text, lex);
    return v;
}

} // namespace stylesim
