#pragma once

#include "stylesim/lexicon.hpp"

namespace stylesim::testsupport {

// Lexicons are immutable once loaded; share one copy across all tests.
inline const LexiconSet& test_lexicons() {
    static const LexiconSet lex = load_default_lexicons();
    return lex;
}

} // namespace stylesim::testsupport
