#pragma once

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stylesim/tokenize.hpp"

namespace stylesim {

using WordSet = std::unordered_set<std::string>;

// The nine closed-class categories used by the classic LSM score.
inline constexpr std::size_t kNumLsmCategories = 9;
inline constexpr std::array<std::string_view, kNumLsmCategories>
    kLsmCategoryNames = {
        "personal_pronouns", "impersonal_pronouns", "articles",
        "prepositions",      "conjunctions",        "auxiliary_verbs",
        "negations",         "quantifiers",         "common_adverbs",
};

// All word lists an analysis run needs, loaded once from the data
// directory and shared read-only afterwards.
struct LexiconSet {
    std::unordered_map<std::string, double> sentiment; // word -> valence [-4,4]
    WordSet boosters;
    WordSet negators;
    WordSet function_words;
    WordSet social;
    WordSet cognitive;
    WordSet affective;
    WordSet informal_markers; // slang, contractions, emoticons
    WordSet formal_markers;
    std::array<WordSet, kNumLsmCategories> lsm_categories;
    std::string version = "unversioned";
};

namespace detail {

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open lexicon file: " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

inline WordSet load_word_set(const std::filesystem::path& path) {
    WordSet set;
    for (const auto& line : read_lines(path)) {
        set.insert(to_lower(trim(line)));
    }
    if (set.empty()) {
        throw std::runtime_error("empty lexicon file: " + path.string());
    }
    return set;
}

} // namespace detail

// Sentiment file shape: "word<TAB>valence", valence in [-4,4].
inline std::unordered_map<std::string, double>
load_sentiment_lexicon(const std::filesystem::path& path) {
    std::unordered_map<std::string, double> lex;
    for (const auto& line : detail::read_lines(path)) {
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        std::string word = to_lower(trim(line.substr(0, tab)));
        double valence = 0.0;
        try {
            valence = std::stod(line.substr(tab + 1));
        } catch (const std::exception&) {
            continue;
        }
        if (word.empty() || valence < -4.0 || valence > 4.0) continue;
        lex[word] = valence;
    }
    if (lex.empty()) {
        throw std::runtime_error("empty sentiment lexicon: " + path.string());
    }
    return lex;
}

// Data directory resolution: explicit argument beats STYLESIM_DATA_DIR beats
// the compiled-in source tree default.
inline std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("STYLESIM_DATA_DIR")) {
        return std::filesystem::path(env);
    }
#ifdef STYLESIM_SOURCE_DATA_DIR
    return std::filesystem::path(STYLESIM_SOURCE_DATA_DIR);
#else
    return std::filesystem::path("data");
#endif
}

inline LexiconSet load_lexicons(const std::filesystem::path& data_dir) {
    const auto lex_dir = data_dir / "lexicons";
    LexiconSet lex;
    lex.sentiment = load_sentiment_lexicon(lex_dir / "sentiment.tsv");
    lex.boosters = detail::load_word_set(lex_dir / "boosters.txt");
    lex.negators = detail::load_word_set(lex_dir / "negators.txt");
    lex.function_words = detail::load_word_set(lex_dir / "function_words.txt");
    lex.social = detail::load_word_set(lex_dir / "social.txt");
    lex.cognitive = detail::load_word_set(lex_dir / "cognitive.txt");
    lex.affective = detail::load_word_set(lex_dir / "affective.txt");
    lex.informal_markers =
        detail::load_word_set(lex_dir / "informal_markers.txt");
    lex.formal_markers = detail::load_word_set(lex_dir / "formal_markers.txt");
    for (std::size_t i = 0; i < kNumLsmCategories; ++i) {
        lex.lsm_categories[i] = detail::load_word_set(
            lex_dir / "lsm" / (std::string(kLsmCategoryNames[i]) + ".txt"));
    }
    std::ifstream ver(lex_dir / "VERSION");
    if (ver) {
        std::string v;
        std::getline(ver, v);
        if (!v.empty()) lex.version = trim(v);
    }
    return lex;
}

inline LexiconSet load_default_lexicons() {
    return load_lexicons(default_data_dir());
}

} // namespace stylesim
