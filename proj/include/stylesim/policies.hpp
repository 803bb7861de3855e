#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

#include "stylesim/style_vector.hpp"
#include "stylesim/tokenize.hpp"

namespace stylesim {

enum class PolicyKind {
    Static,
    Uncapped,
    Cap,
    Ema,
    DeadBand,
    Hybrid,
    HybridRadius,
    HybridCache,
};

struct PolicyConfig {
    PolicyKind kind = PolicyKind::Hybrid;
    double kappa = 0.25;  // cap length, z-units
    double alpha = 0.5;   // EMA blend factor
    double epsilon = 0.1; // dead-band radius
    double rho = 1.5;     // persona leash radius
};

inline std::string_view policy_kind_name(PolicyKind k) {
    switch (k) {
    case PolicyKind::Static: return "static";
    case PolicyKind::Uncapped: return "uncapped";
    case PolicyKind::Cap: return "cap";
    case PolicyKind::Ema: return "ema";
    case PolicyKind::DeadBand: return "deadband";
    case PolicyKind::Hybrid: return "hybrid";
    case PolicyKind::HybridRadius: return "hybrid_radius";
    case PolicyKind::HybridCache: return "hybrid_cache";
    }
    return "unknown";
}

inline std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
    if (name == "static") return PolicyKind::Static;
    if (name == "uncapped") return PolicyKind::Uncapped;
    if (name == "cap") return PolicyKind::Cap;
    if (name == "ema") return PolicyKind::Ema;
    if (name == "deadband") return PolicyKind::DeadBand;
    if (name == "hybrid") return PolicyKind::Hybrid;
    if (name == "hybrid_radius") return PolicyKind::HybridRadius;
    if (name == "hybrid_cache") return PolicyKind::HybridCache;
    return std::nullopt;
}

// Session-confined policy state. b_prev starts at the persona centroid; the
// cache is keyed by normalized utterance text and only consulted by
// HybridCache.
struct PolicyState {
    StyleVector b_prev{};
    std::unordered_map<std::string, StyleVector> cache;
    int turn = 0;
    bool seeded = false;
};

inline PolicyState make_policy_state(const StyleVector& centroid) {
    PolicyState s;
    s.b_prev = centroid;
    s.seeded = true;
    return s;
}

// --- primitive steps --------------------------------------------------------

// Scales delta down to length kappa when it is longer; below the cap it
// passes through unchanged.
inline StyleVector cap_delta(const StyleVector& delta, double kappa) {
    double len = norm(delta);
    if (len <= kappa) return delta;
    if (len == 0.0) return delta;
    return delta * (kappa / len);
}

inline StyleVector ema_blend(const StyleVector& b_prev, const StyleVector& u,
                             double alpha) {
    return (1.0 - alpha) * b_prev + alpha * u;
}

// Update only on strict ||u - b_prev|| > epsilon; hold at exactly epsilon.
inline StyleVector deadband_gate(const StyleVector& b_prev,
                                 const StyleVector& u, double epsilon) {
    return distance(u, b_prev) > epsilon ? u : b_prev;
}

// Pulls b back onto the rho-sphere around center when it has drifted out.
inline StyleVector radius_clamp(const StyleVector& b, const StyleVector& center,
                                double rho) {
    StyleVector offset = b - center;
    double len = norm(offset);
    if (len <= rho) return b;
    return center + offset * (rho / len);
}

// --- dispatch ----------------------------------------------------------------

struct PolicyStepResult {
    StyleVector b_next{};
    bool cache_hit = false;
};

namespace detail {
inline StyleVector hybrid_step(const PolicyConfig& cfg, const StyleVector& b_prev,
                               const StyleVector& u) {
    StyleVector target = ema_blend(b_prev, u, cfg.alpha);
    return b_prev + cap_delta(target - b_prev, cfg.kappa);
}
} // namespace detail

// One turn of the adaptation loop: (u_t, b_{t-1}) -> b_t. Mutates state
// (b_prev, turn, cache). Cached vectors are replayed verbatim, so the radius
// clamp is applied before insertion, never after lookup.
inline PolicyStepResult policy_step(const PolicyConfig& cfg, PolicyState& state,
                                    const StyleVector& u,
                                    std::string_view user_text,
                                    const StyleVector& centroid) {
    if (!state.seeded) {
        throw std::logic_error("state not seeded with centroid");
    }
    PolicyStepResult r;
    switch (cfg.kind) {
    case PolicyKind::Static:
        r.b_next = centroid;
        break;
    case PolicyKind::Uncapped:
        r.b_next = u;
        break;
    case PolicyKind::Cap:
        r.b_next = state.b_prev + cap_delta(u - state.b_prev, cfg.kappa);
        break;
    case PolicyKind::Ema:
        r.b_next = ema_blend(state.b_prev, u, cfg.alpha);
        break;
    case PolicyKind::DeadBand:
        r.b_next = deadband_gate(state.b_prev, u, cfg.epsilon);
        break;
    case PolicyKind::Hybrid:
        r.b_next = detail::hybrid_step(cfg, state.b_prev, u);
        break;
    case PolicyKind::HybridRadius:
        r.b_next = radius_clamp(detail::hybrid_step(cfg, state.b_prev, u),
                                centroid, cfg.rho);
        break;
    case PolicyKind::HybridCache: {
        std::string key = normalize_utterance(user_text);
        auto it = state.cache.find(key);
        if (it != state.cache.end()) {
            r.b_next = it->second;
            r.cache_hit = true;
        } else {
            r.b_next = detail::hybrid_step(cfg, state.b_prev, u);
            state.cache.emplace(std::move(key), r.b_next);
        }
        break;
    }
    }
    state.b_prev = r.b_next;
    state.turn += 1;
    return r;
}

} // namespace stylesim
