#include <catch2/catch_amalgamated.hpp>

#include "stylesim/text_features.hpp"

#include "support/test_util.hpp"

using namespace stylesim;
using Catch::Approx;
using testsupport::test_lexicons;

TEST_CASE("tokenizer lowercases and splits on punctuation") {
    auto tokens = tokenize("Hello, World! don't STOP");
    REQUIRE(tokens == std::vector<std::string>{"hello", "world", "don't",
                                               "stop"});
    REQUIRE(tokenize("...").empty());
    REQUIRE(tokenize("a'b 'quoted'") ==
            std::vector<std::string>{"a'b", "quoted"});
}

TEST_CASE("sentence splitter keeps only segments with content") {
    REQUIRE(split_sentences("Hi. Hi there.").size() == 2);
    REQUIRE(split_sentences("Hi.").size() == 1);
    REQUIRE(split_sentences("What?! Really...").size() == 2);
    REQUIRE(split_sentences("!!!").empty());
}

TEST_CASE("syllable counting follows the vowel-group heuristic") {
    // golden values pinned by hand application of the rule
    REQUIRE(count_syllables("cat") == 1);
    REQUIRE(count_syllables("table") == 2);  // consonant+"le" keeps the run
    REQUIRE(count_syllables("idea") == 2);   // runs "i", "ea"
    REQUIRE(count_syllables("whale") == 1);  // vowel+"le" drops trailing e
    REQUIRE(count_syllables("made") == 1);
    REQUIRE(count_syllables("the") == 1);    // floor at 1
    REQUIRE(count_syllables("see") == 1);
    REQUIRE(count_syllables("happy") == 2);  // y as vowel
    REQUIRE(count_syllables("radio") == 2);
    REQUIRE(count_syllables("1234") == 1);   // non-alphabetic
}

TEST_CASE("flesch reading ease matches hand evaluation") {
    // 3 words, 1 sentence, 3 syllables
    REQUIRE(flesch_reading_ease("The cat sat.") == Approx(119.19).margin(1e-9));
    // 1 word, 1 sentence, 1 syllable
    REQUIRE(flesch_reading_ease("Hi.") == Approx(121.22).margin(1e-9));
    REQUIRE_THROWS_AS(flesch_reading_ease(""), std::invalid_argument);
}

TEST_CASE("sentiment compound score") {
    const auto& lex = test_lexicons();

    SECTION("no lexicon hits scores zero") {
        REQUIRE(sentiment_compound("", lex) == 0.0);
        REQUIRE(sentiment_compound("the chart near the desk", lex) == 0.0);
    }

    SECTION("sign and normalization from the shipped valence for love=3.2") {
        // 3.2 / sqrt(3.2^2 + 15)
        const double loved = sentiment_compound("I love this", lex);
        REQUIRE(loved == Approx(0.6369499429264264).margin(1e-12));
    }

    SECTION("negation flips and dampens: hand oracle 3.2 * -0.74") {
        const double negated = sentiment_compound("I do not love this", lex);
        REQUIRE(negated == Approx(-0.5216387489026343).margin(1e-12));
        REQUIRE(negated < sentiment_compound("I love this", lex));
        REQUIRE(negated <= 0.0);
    }

    SECTION("boosters push the score outward") {
        REQUIRE(sentiment_compound("I really love this", lex) >
                sentiment_compound("I love this", lex));
        REQUIRE(sentiment_compound("I really hate this", lex) <
                sentiment_compound("I hate this", lex));
    }

    SECTION("range stays inside [-1, 1]") {
        REQUIRE(sentiment_compound(
                    "love love love wonderful amazing awesome great", lex) <=
                1.0);
        REQUIRE(sentiment_compound(
                    "hate hate hate terrible awful horrible worst", lex) >=
                -1.0);
    }
}

TEST_CASE("informality score bins the qualitative examples correctly") {
    const auto& lex = test_lexicons();

    const double formal = informality_score(
        "I wish to understand the scope of our discussion.", lex);
    REQUIRE(formal < 0.33);

    const double informal = informality_score("lol ok nvm. u good?", lex);
    REQUIRE(informal > 0.66);

    REQUIRE(informality_score("", lex) == Approx(0.5));

    SECTION("cues move the score the right way") {
        const double base = informality_score("the meeting starts at noon", lex);
        REQUIRE(informality_score("the meeting starts at noon!!", lex) > base);
        REQUIRE(informality_score("i think i can do it", lex) >
                informality_score("I think I can do it", lex));
        REQUIRE(informality_score("that was fun :)", lex) >
                informality_score("that was fun", lex));
    }

    SECTION("range is [0,1]") {
        for (const char* text :
             {"lol omg tbh lmao !!", "Pursuant to the aforementioned "
                                    "documentation, kindly ascertain the "
                                    "requirements."}) {
            const double v = informality_score(text, lex);
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
        }
    }
}

TEST_CASE("function word ratio against the shipped closed-class list") {
    const auto& lex = test_lexicons();
    REQUIRE(function_word_ratio("the cat sat on the mat", lex) == Approx(0.5));
    REQUIRE(function_word_ratio("cat mat", lex) == 0.0);
    REQUIRE(function_word_ratio("the the the", lex) == 1.0);
    REQUIRE_THROWS_AS(function_word_ratio("", lex), std::invalid_argument);
}

TEST_CASE("category rate") {
    const auto& lex = test_lexicons();
    REQUIRE(category_rate("", lex.social) == 0.0);
    REQUIRE(category_rate("my friend is here", lex.social) == Approx(0.25));
    REQUIRE(category_rate("friend talk", lex.social) == 1.0);
}

TEST_CASE("style vector assembles all eight features") {
    const auto& lex = test_lexicons();

    SECTION("average sentence length by hand: 3 words / 2 sentences") {
        auto v = style_vector("Hi. Hi there.", lex);
        REQUIRE(v[kAvgSentenceLen] == Approx(1.5));
    }

    SECTION("determinism: two calls are bit-identical") {
        const char* text = "lol ok, my friend thinks this is wonderful!!";
        auto a = style_vector(text, lex);
        auto b = style_vector(text, lex);
        REQUIRE(a == b);
    }

    SECTION("empty text is an error") {
        REQUIRE_THROWS_AS(style_vector("", lex), std::invalid_argument);
        REQUIRE_THROWS_AS(style_vector("   ", lex), std::invalid_argument);
    }

    SECTION("ranges hold on varied inputs") {
        for (const char* text :
             {"lol omg !!", "I wish to understand the scope.",
              "My friend thinks the weather is wonderful today.",
              "ok", "Why? Because reasons. Many reasons!"}) {
            auto v = style_vector(text, lex);
            REQUIRE(all_finite(v));
            REQUIRE(v[kInformality] >= 0.0);
            REQUIRE(v[kInformality] <= 1.0);
            REQUIRE(v[kSentiment] >= -1.0);
            REQUIRE(v[kSentiment] <= 1.0);
            REQUIRE(v[kAvgSentenceLen] >= 1.0);
            REQUIRE(v[kSocialRate] >= 0.0);
            REQUIRE(v[kSocialRate] <= 1.0);
            REQUIRE(v[kCognitiveRate] >= 0.0);
            REQUIRE(v[kCognitiveRate] <= 1.0);
            REQUIRE(v[kAffectiveRate] >= 0.0);
            REQUIRE(v[kAffectiveRate] <= 1.0);
            REQUIRE(v[kFunctionWordRatio] >= 0.0);
            REQUIRE(v[kFunctionWordRatio] <= 1.0);
        }
    }
}

TEST_CASE("function word filter") {
    const auto& lex = test_lexicons();
    REQUIRE(function_word_filter("the cat sat on the mat", lex) == "the on the");
    REQUIRE(function_word_filter("cat mat", lex).empty());

    SECTION("idempotence and full-ratio property on varied texts") {
        for (const char* text :
             {"the cat sat on the mat", "I wish to understand the scope.",
              "lol ok nvm. u good?", "We met the whole family at the party."}) {
            const std::string once = function_word_filter(text, lex);
            REQUIRE(function_word_filter(once, lex) == once);
            if (!once.empty()) {
                REQUIRE(function_word_ratio(once, lex) == 1.0);
            }
        }
    }
}
