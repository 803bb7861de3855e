#pragma once

#include <string>
#include <vector>

#include "stylesim/text_features.hpp"

namespace stylesim {

// One conversation, ordered by turn. Roles usually alternate but nothing
// downstream requires it.
struct SessionLog {
    std::string session_id;
    std::string participant_id;
    std::vector<Utterance> turns;
    std::string source;

    std::size_t user_turn_count() const {
        std::size_t n = 0;
        for (const auto& t : turns) {
            if (t.speaker == Speaker::User && !trim(t.text).empty()) ++n;
        }
        return n;
    }
};

} // namespace stylesim
