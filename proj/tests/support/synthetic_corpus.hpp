#pragma once

// Deterministic synthetic dialogue corpus for tests. Sessions have
// random-walk user register/sentiment/verbosity latents with sticky phrase
// templates (so style is locally autocorrelated, like real chat), bot
// replies spanning a wide stylistic range (so the fitted scaler is
// non-degenerate), and two kinds of engineered events:
//   - echo runs: a few consecutive user turns alternating between two
//     near-identical assistant-styled texts whose vectors sit close to the
//     bot-corpus mean; the pair distance stays inside the default dead-band
//     radius, so those turns exercise the hold branch, and
//   - exact repeated utterances (exercise the style cache).
//
// Bot replies draw from an RNG stream separate from the user side, so the
// fitted scaler is unchanged by user-side generator tweaks.

#include <algorithm>
#include <string>
#include <vector>

#include "stylesim/random.hpp"
#include "stylesim/session.hpp"

namespace stylesim::testsupport {

struct SynthOptions {
    std::size_t n_sessions = 500;
    std::uint64_t seed = 20240601;
    double echo_run_rate = 0.12; // sessions containing an echo run
    double repeat_rate = 0.03;   // sessions with exact repeats
    std::size_t min_user_turns = 5;
    std::size_t max_user_turns = 12;
};

namespace detail {

inline const std::vector<std::string>& formal_pool() {
    static const std::vector<std::string> pool = {
        "I would appreciate further clarification regarding this particular "
        "arrangement.",
        "It is certainly reasonable to consider the broader requirements "
        "involved.",
        "My understanding of the documentation remains somewhat preliminary.",
        "I intend to evaluate the proposal carefully before we proceed "
        "further.",
        "The discussion we had yesterday raised several substantial "
        "questions.",
        "I require additional assistance with the arrangement described "
        "earlier.",
        "Subsequent correspondence should indicate whether the requirements "
        "are sufficient.",
        "I wish to understand the scope of the obligations involved.",
    };
    return pool;
}

inline const std::vector<std::string>& neutral_pool() {
    static const std::vector<std::string> pool = {
        "That makes sense to me.",
        "I went to the store this morning and picked up a few things.",
        "The weather has been pretty steady this week.",
        "I have been reading a new book in the evenings.",
        "Work kept me busy for most of the day.",
        "We are planning a short trip at the end of the month.",
        "The new schedule starts next week.",
        "I finished the report earlier than expected.",
    };
    return pool;
}

inline const std::vector<std::string>& informal_pool() {
    static const std::vector<std::string> pool = {
        "lol yeah that works for me",
        "omg i totally forgot about that haha",
        "nah im good, just chillin rn",
        "ok so that was kinda wild tbh",
        "haha ur right, my bad",
        "idk maybe, gotta think about it lol",
        "yo that sounds fun ngl",
        "lmao ok fair enough, u win",
    };
    return pool;
}

inline const std::vector<std::string>& social_pool() {
    static const std::vector<std::string> pool = {
        "My friend and my sister came over for dinner.",
        "We met the whole family at the party last weekend.",
        "My roommate keeps talking about the wedding.",
        "I called my mom and we chatted for an hour.",
    };
    return pool;
}

inline const std::vector<std::string>& cognitive_pool() {
    static const std::vector<std::string> pool = {
        "I think the plan makes sense once you consider the reasons.",
        "I believe we should analyze the idea carefully.",
        "I keep wondering whether my assumption was wrong.",
        "The decision took longer because I wanted to understand the logic.",
    };
    return pool;
}

inline const std::vector<std::string>& affective_pool() {
    static const std::vector<std::string> pool = {
        "I was so happy and excited about it.",
        "Honestly it made me pretty sad and worried.",
        "I felt nervous but also weirdly proud.",
        "The whole thing left me tired and a little anxious.",
    };
    return pool;
}

inline const std::vector<std::string>& positive_pool() {
    static const std::vector<std::string> pool = {
        "I love it.",
        "That was wonderful.",
        "It turned out great.",
    };
    return pool;
}

inline const std::vector<std::string>& negative_pool() {
    static const std::vector<std::string> pool = {
        "I hate it.",
        "That was terrible.",
        "It went pretty badly.",
    };
    return pool;
}

inline const std::vector<std::string>& bot_brief_pool() {
    static const std::vector<std::string> pool = {
        "Sure.",
        "Sounds good.",
        "Happy to help.",
        "Got it.",
        "Of course.",
    };
    return pool;
}

inline const std::vector<std::string>& bot_neutral_pool() {
    static const std::vector<std::string> pool = {
        "That sounds like a reasonable plan for the week ahead.",
        "Tell me a little more and we can figure it out together.",
        "A short break in the afternoon usually helps with focus.",
        "You could try writing the main task down the night before.",
    };
    return pool;
}

inline const std::vector<std::string>& bot_elaborate_pool() {
    static const std::vector<std::string> pool = {
        "If you would like, we can work through the details together and map "
        "out a schedule that balances the commitments you mentioned with "
        "genuinely restorative breaks across the entire week.",
        "Considering everything you described, it would be sensible to "
        "evaluate the available arrangements carefully before committing to "
        "a particular approach that might be difficult to reverse later.",
        "One reasonable strategy involves separating the urgent obligations "
        "from the merely important ones and then protecting a quiet hour in "
        "the morning for whichever matters most.",
    };
    return pool;
}

inline const std::vector<std::string>& bot_warm_pool() {
    static const std::vector<std::string> pool = {
        "I'm really glad you shared that, it sounds like things are looking "
        "up for you.",
        "That's lovely to hear, and honestly I think you handled it well.",
        "I'm happy for you! Your friends and family clearly matter a lot.",
        "It's okay to feel worried, you're doing better than you think.",
    };
    return pool;
}

// The echo-run pair: users mirroring the assistant's phrasing. The texts are
// identical except one equal-length noun swap ("menu" has one syllable more
// than "desk"), so their vectors differ only in readability, by
// 84.6 / word_count raw. The base text is tuned to sit near the bot-corpus
// mean so the pair is close in z-space at a non-trivial angle.
inline const char* kEchoBase =
    "Sounds fine. I figure we could keep the desk mostly cleared, allow a "
    "quieter hour every evening, and prepare the weekend with friends in a "
    "steady mood.";
inline const char* kEchoSwapFrom = "desk";
inline const char* kEchoSwapTo = "menu";

inline std::string echo_variant() {
    std::string text = kEchoBase;
    auto pos = text.find(kEchoSwapFrom);
    if (pos != std::string::npos) {
        text.replace(pos, std::string(kEchoSwapFrom).size(), kEchoSwapTo);
    }
    return text;
}

inline const std::string& pick(const std::vector<std::string>& pool, Rng& rng) {
    return pool[static_cast<std::size_t>(rng.bounded(pool.size()))];
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

enum class Register { Formal, Neutral, Informal };
enum class Topic { None, Social, Cognitive, Affective };

inline const std::vector<std::string>& register_pool(Register r) {
    switch (r) {
    case Register::Formal: return formal_pool();
    case Register::Informal: return informal_pool();
    default: return neutral_pool();
    }
}

inline const std::vector<std::string>* topic_pool(Topic t) {
    switch (t) {
    case Topic::Social: return &social_pool();
    case Topic::Cognitive: return &cognitive_pool();
    case Topic::Affective: return &affective_pool();
    default: return nullptr;
    }
}

} // namespace detail

inline std::vector<SessionLog> synthesize_corpus(const SynthOptions& opt) {
    std::vector<SessionLog> sessions;
    sessions.reserve(opt.n_sessions);

    for (std::size_t s = 0; s < opt.n_sessions; ++s) {
        Rng rng(derive_stream_seed(opt.seed, "synth_user", s));
        Rng bot_rng(derive_stream_seed(opt.seed, "synth_bot", s));
        SessionLog log;
        log.session_id = "synth_" + std::to_string(s);
        log.participant_id = "participant_" + std::to_string(s);
        log.source = "synthetic";

        // Random-walk latents: the user's register drifts without mean
        // reversion, which is what makes the most recent turn the best
        // predictor of the next one.
        double f = rng.uniform(0.1, 0.9);   // informality latent
        double m = rng.uniform(-0.6, 0.8);  // sentiment latent
        double v = rng.uniform(0.0, 1.0);   // verbosity latent

        const std::size_t n_user =
            opt.min_user_turns +
            rng.bounded(opt.max_user_turns - opt.min_user_turns + 1);

        const bool echo_session =
            rng.uniform() < opt.echo_run_rate && n_user >= 6;
        const std::size_t echo_len = echo_session ? 4 : 0;
        const std::size_t echo_at =
            echo_session ? 1 + rng.bounded(n_user - echo_len - 1) : n_user + 1;
        const bool repeat_session = rng.uniform() < opt.repeat_rate;
        const std::size_t repeat_at =
            repeat_session ? 1 + rng.bounded(n_user - 2) : n_user + 1;

        // Sticky template state.
        auto register_of = [](double latent) {
            if (latent > 0.62) return detail::Register::Informal;
            if (latent < 0.38) return detail::Register::Formal;
            return detail::Register::Neutral;
        };
        std::size_t template_idx = rng.bounded(8);
        detail::Topic topic = detail::Topic::None;
        detail::Register reg = register_of(f);

        std::string repeat_text;
        int turn = 1;
        for (std::size_t t = 0; t < n_user; ++t) {
            std::string user_text;
            if (echo_session && t >= echo_at && t < echo_at + echo_len) {
                // Alternating near-identical assistant-styled texts.
                user_text = ((t - echo_at) % 2 == 0) ? detail::kEchoBase
                                                     : detail::echo_variant();
            } else if (repeat_session && t == repeat_at) {
                repeat_text = "ok sounds good";
                user_text = repeat_text;
            } else if (repeat_session && t == repeat_at + 2 &&
                       !repeat_text.empty()) {
                user_text = repeat_text;
            } else {
                const detail::Register new_reg = register_of(f);
                const bool switch_template =
                    new_reg != reg || rng.uniform() < 0.35;
                reg = new_reg;
                const auto& pool = detail::register_pool(reg);
                if (switch_template) {
                    template_idx = rng.bounded(pool.size());
                }
                user_text = pool[template_idx % pool.size()];

                if (rng.uniform() < 0.3) {
                    const double draw = rng.uniform();
                    topic = draw < 0.35   ? detail::Topic::Social
                            : draw < 0.65 ? detail::Topic::Cognitive
                            : draw < 0.85 ? detail::Topic::Affective
                                          : detail::Topic::None;
                }
                if (const auto* tp = detail::topic_pool(topic)) {
                    user_text += " " + detail::pick(*tp, rng);
                }
                if (m > 0.3 && rng.uniform() < m) {
                    user_text += " " + detail::pick(detail::positive_pool(), rng);
                } else if (m < -0.2 && rng.uniform() < -m) {
                    user_text += " " + detail::pick(detail::negative_pool(), rng);
                }
                if (v > 0.7 && rng.uniform() < 0.5) {
                    user_text += " " + detail::pick(detail::neutral_pool(), rng);
                }
            }
            log.turns.push_back({user_text, Speaker::User, turn});

            // Bot reply from a per-turn random family on an independent
            // stream; the spread across families is what gives the scaler
            // healthy variance.
            const double family = bot_rng.uniform();
            std::string bot_text;
            if (family < 0.25) {
                bot_text = detail::pick(detail::bot_brief_pool(), bot_rng);
            } else if (family < 0.55) {
                bot_text = detail::pick(detail::bot_neutral_pool(), bot_rng);
            } else if (family < 0.8) {
                bot_text = detail::pick(detail::bot_warm_pool(), bot_rng);
            } else {
                bot_text = detail::pick(detail::bot_elaborate_pool(), bot_rng);
            }
            if (family >= 0.55 && family < 0.8 && bot_rng.uniform() < 0.4) {
                bot_text += " " + detail::pick(detail::bot_neutral_pool(), bot_rng);
            }
            log.turns.push_back({bot_text, Speaker::Bot, turn});
            ++turn;

            // Slow random-walk drift.
            f = detail::clamp01(f + rng.normal() * 0.06);
            m = std::clamp(m + rng.normal() * 0.08, -1.0, 1.0);
            v = detail::clamp01(v + rng.normal() * 0.07);
        }
        sessions.push_back(std::move(log));
    }
    return sessions;
}

// 10-turn session where one utterance appears three times (turns 2, 5, 9 in
// 1-based counting): two cache hits over ten turns.
inline SessionLog cache_fixture_session() {
    SessionLog log;
    log.session_id = "cache_fixture";
    log.participant_id = "cache_participant";
    log.source = "fixture";
    const std::vector<std::string> user_turns = {
        "I have been thinking about the schedule for next week.",
        "ok sounds good",
        "My sister wants to visit and I am happy about it.",
        "The report took longer than I expected yesterday.",
        "ok sounds good",
        "I believe the plan needs one more careful review.",
        "lol yeah that works for me",
        "We met the whole family at the party last weekend.",
        "ok sounds good",
        "That was wonderful and I feel much calmer now.",
    };
    int turn = 1;
    for (const auto& text : user_turns) {
        log.turns.push_back({text, Speaker::User, turn});
        log.turns.push_back({"Thanks for telling me, let's keep going.",
                             Speaker::Bot, turn});
        ++turn;
    }
    return log;
}

} // namespace stylesim::testsupport
