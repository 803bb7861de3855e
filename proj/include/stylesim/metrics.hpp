#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "stylesim/lexicon.hpp"
#include "stylesim/persona.hpp"
#include "stylesim/prompting.hpp"
#include "stylesim/session.hpp"
#include "stylesim/style_vector.hpp"

namespace stylesim {

// Cosine similarity with the zero-vector conventions that keep it total:
// both zero -> 1 (identical styles), exactly one zero -> 0 (no signal).
inline double cosine(const StyleVector& a, const StyleVector& b) {
    bool az = is_zero(a), bz = is_zero(b);
    if (az && bz) return 1.0;
    if (az || bz) return 0.0;
    double c = dot(a, b) / (norm(a) * norm(b));
    return std::clamp(c, -1.0, 1.0);
}

enum class RegisterBin { Formal, Neutral, Informal };

inline const char* register_bin_name(RegisterBin b) {
    switch (b) {
    case RegisterBin::Formal: return "formal";
    case RegisterBin::Neutral: return "neutral";
    case RegisterBin::Informal: return "informal";
    }
    return "neutral";
}

// Fixed thresholds (0.33, 0.66); both boundaries bin as Neutral.
inline RegisterBin register_bin(double informality_raw) {
    if (!(informality_raw >= 0.0 && informality_raw <= 1.0)) {
        throw std::invalid_argument("informality out of [0,1]");
    }
    if (informality_raw < 0.33) return RegisterBin::Formal;
    if (informality_raw <= 0.66) return RegisterBin::Neutral;
    return RegisterBin::Informal;
}

struct TurnMetrics {
    double synchrony = 0.0;
    double stability = 0.0;
    double coherence = 0.0;
    int churn = 0;
    RegisterBin bin = RegisterBin::Neutral;
    bool flipped = false;
    bool cache_hit = false;
};

inline TurnMetrics turn_metrics(const StyleVector& u_t, const StyleVector& b_t,
                                const StyleVector& b_prev,
                                const StyleVector& archetype_z,
                                const InstructionSet& prev_instr,
                                const InstructionSet& cur_instr,
                                RegisterBin prev_bin, double informality_raw,
                                bool first_turn) {
    TurnMetrics m;
    m.synchrony = cosine(u_t, b_t);
    m.stability = cosine(b_t, b_prev);
    m.coherence = cosine(b_t, archetype_z);
    m.churn = instruction_churn(prev_instr, cur_instr);
    m.bin = register_bin(informality_raw);
    m.flipped = first_turn ? false : (m.bin != prev_bin);
    return m;
}

// Fraction of consecutive turns whose register bin changes. Fewer than two
// bins cannot flip.
inline double flip_rate(const std::vector<RegisterBin>& bins) {
    if (bins.size() < 2) return 0.0;
    std::size_t flips = 0;
    for (std::size_t i = 1; i < bins.size(); ++i) {
        if (bins[i] != bins[i - 1]) ++flips;
    }
    return static_cast<double>(flips) / static_cast<double>(bins.size() - 1);
}

// 1 - mean churn / 16, clamped; 1.0 means the delta prompt never changed.
inline double legibility_score(const std::vector<int>& churns) {
    if (churns.empty()) return 1.0;
    double sum = 0.0;
    for (int c : churns) sum += c;
    double mean = sum / static_cast<double>(churns.size());
    return std::clamp(1.0 - mean / static_cast<double>(kMaxChurnPerTurn), 0.0,
                      1.0);
}

// Classic LSM over the nine closed-class categories:
// per category, 1 - |p_a - p_b| / (p_a + p_b + 0.0001), averaged.
inline double classic_lsm(std::string_view text_a, std::string_view text_b,
                          const LexiconSet& lex) {
    auto tokens_a = tokenize(text_a);
    auto tokens_b = tokenize(text_b);
    if (tokens_a.empty() || tokens_b.empty()) {
        throw std::invalid_argument("empty utterance");
    }
    auto rate = [](const std::vector<std::string>& tokens, const WordSet& set) {
        std::size_t hits = 0;
        for (const auto& t : tokens) {
            if (set.count(t)) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(tokens.size());
    };
    double total = 0.0;
    for (const auto& category : lex.lsm_categories) {
        double pa = rate(tokens_a, category);
        double pb = rate(tokens_b, category);
        total += 1.0 - std::abs(pa - pb) / (pa + pb + 0.0001);
    }
    return total / static_cast<double>(kNumLsmCategories);
}

// Predictive synchrony: how well the mean of the last k standardized user
// vectors points at the user's next-turn style. Session means first, then a
// grand mean across sessions with at least one eligible pair.
inline double predictive_synchrony(const std::vector<SessionLog>& sessions,
                                   std::size_t k, const LexiconSet& lex,
                                   const FeatureScaler& scaler) {
    if (k < 1) throw std::invalid_argument("window size must be >= 1");
    double session_sum = 0.0;
    std::size_t session_count = 0;
    for (const auto& session : sessions) {
        std::vector<StyleVector> user_vecs;
        for (const auto& turn : session.turns) {
            if (turn.speaker != Speaker::User) continue;
            if (trim(turn.text).empty()) continue;
            user_vecs.push_back(standardize(style_vector(turn.text, lex), scaler));
        }
        if (user_vecs.size() < k + 1) continue;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = k; i < user_vecs.size(); ++i) {
            StyleVector window{};
            for (std::size_t j = i - k; j < i; ++j) window = window + user_vecs[j];
            window = window * (1.0 / static_cast<double>(k));
            sum += cosine(window, user_vecs[i]);
            ++count;
        }
        if (count == 0) continue;
        session_sum += sum / static_cast<double>(count);
        ++session_count;
    }
    if (session_count == 0) throw std::runtime_error("insufficient history");
    return session_sum / static_cast<double>(session_count);
}

} // namespace stylesim
