#pragma once

#include <chrono>
#include <cstdlib>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "stylesim/replay.hpp"

namespace stylesim {

struct GeneratorRequest {
    std::string system_prompt;
    std::vector<std::pair<std::string, std::string>> history; // (role, text)
    int max_reply_tokens = 256;
};

struct GeneratorResponse {
    std::string text;
    int latency_ms = 0;
    std::string provider_tag;
    bool refused = false;
};

// Synchronous single-call contract. Implementations throw on transport
// failure; retry policy lives in the caller.
class Generator {
public:
    virtual ~Generator() = default;
    virtual GeneratorResponse generate(const GeneratorRequest& request) = 0;
    virtual std::string_view name() const = 0;
};

// --- deterministic local stubs ----------------------------------------------

enum class StubMode { Echo, Fixed, Styled };

inline std::optional<StubMode> parse_stub_mode(std::string_view name) {
    if (name == "echo") return StubMode::Echo;
    if (name == "fixed") return StubMode::Fixed;
    if (name == "styled") return StubMode::Styled;
    return std::nullopt;
}

inline constexpr const char* kFixedStubReply =
    "I am happy to keep chatting about whatever you like.";

// Echo repeats the last user message; Fixed always answers with one
// sentence; Styled rewrites a template according to whichever instruction
// fragments appear in the prompt, so prompt->style causality is testable
// end to end without a model.
class StubGenerator final : public Generator {
public:
    explicit StubGenerator(StubMode mode,
                           FragmentTable fragments = default_fragment_table())
        : mode_(mode), fragments_(std::move(fragments)) {}

    GeneratorResponse generate(const GeneratorRequest& request) override {
        GeneratorResponse resp;
        resp.provider_tag = std::string(name());
        switch (mode_) {
        case StubMode::Echo:
            for (auto it = request.history.rbegin(); it != request.history.rend();
                 ++it) {
                if (it->first == "user") {
                    resp.text = it->second;
                    break;
                }
            }
            if (resp.text.empty()) resp.text = kFixedStubReply;
            break;
        case StubMode::Fixed:
            resp.text = kFixedStubReply;
            break;
        case StubMode::Styled:
            resp.text = styled_reply(request.system_prompt);
            break;
        }
        return resp;
    }

    std::string_view name() const override {
        switch (mode_) {
        case StubMode::Echo: return "stub:echo";
        case StubMode::Fixed: return "stub:fixed";
        case StubMode::Styled: return "stub:styled";
        }
        return "stub";
    }

private:
    bool has_fragment(const std::string& prompt, std::size_t dim,
                      Direction dir) const {
        const std::string& text =
            fragments_.texts[dim][dir == Direction::High ? 0 : 1];
        return prompt.find(text) != std::string::npos;
    }

    std::string styled_reply(const std::string& prompt) const {
        const bool informal = has_fragment(prompt, kInformality, Direction::High);
        const bool formal = has_fragment(prompt, kInformality, Direction::Low);
        const bool positive = has_fragment(prompt, kSentiment, Direction::High);
        const bool longer =
            has_fragment(prompt, kAvgSentenceLen, Direction::High);
        const bool shorter =
            has_fragment(prompt, kAvgSentenceLen, Direction::Low);

        std::string reply;
        if (informal) {
            reply = "lol yeah totally, im down for that, sounds fun tbh";
        } else if (formal) {
            reply = "Certainly. I would be glad to provide further assistance "
                    "regarding this matter and to address your inquiry "
                    "appropriately.";
        } else {
            reply = "That sounds good. I'm glad to keep talking about it.";
        }
        if (positive) reply += informal ? " love it!!" : " I love that idea.";
        if (longer) {
            reply += informal
                         ? " and honestly we could just keep going on and on "
                           "about all the other stuff too"
                         : " We could also explore the related questions in "
                           "as much depth as you would like.";
        }
        if (shorter && !informal && !formal) reply = "Sounds good.";
        return reply;
    }

    StubMode mode_;
    FragmentTable fragments_;
};

inline std::unique_ptr<Generator> stub_generator(StubMode mode) {
    return std::make_unique<StubGenerator>(mode);
}

// --- remote generator ---------------------------------------------------------

// Chat-completions-style endpoint configured via GENERATOR_URL,
// GENERATOR_KEY, GENERATOR_MODEL. Request body:
//   {"model": ..., "max_tokens": N,
//    "messages": [{"role": "system"|"user"|"assistant", "content": ...}]}
// Reply text is read from choices[0].message.content.
struct RemoteGeneratorConfig {
    std::string url;
    std::string api_key;
    std::string model;

    static std::optional<RemoteGeneratorConfig> from_env() {
        const char* url = std::getenv("GENERATOR_URL");
        if (!url || !*url) return std::nullopt;
        RemoteGeneratorConfig cfg;
        cfg.url = url;
        if (const char* key = std::getenv("GENERATOR_KEY")) cfg.api_key = key;
        if (const char* model = std::getenv("GENERATOR_MODEL")) cfg.model = model;
        return cfg;
    }
};

std::unique_ptr<Generator> make_remote_generator(RemoteGeneratorConfig cfg);

// --- closed loop --------------------------------------------------------------

struct ClosedLoopOptions {
    std::string base_prompt = kDefaultBasePrompt;
    CoherenceAnchor anchor = CoherenceAnchor::Archetype;
    FragmentTable fragments = default_fragment_table();
    int max_reply_tokens = 256;
    int max_retries = 3;
    std::chrono::milliseconds backoff_base{250};
    bool sleep_on_retry = true; // disabled in tests
};

struct ClosedLoopResult {
    std::vector<TurnMetrics> turns;
    SessionSummary summary;
    std::vector<std::string> replies;
    bool complete = true;
    std::string failure_reason;
};

namespace detail {

inline GeneratorResponse generate_with_retries(Generator& gen,
                                               const GeneratorRequest& req,
                                               const ClosedLoopOptions& opt) {
    std::string last_error = "unknown";
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
        if (attempt > 0 && opt.sleep_on_retry) {
            std::this_thread::sleep_for(opt.backoff_base * (1 << (attempt - 1)));
        }
        try {
            GeneratorResponse resp = gen.generate(req);
            if (!resp.refused && !trim(resp.text).empty()) return resp;
            last_error = resp.refused ? "generator refused" : "empty reply";
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    throw std::runtime_error("generator failed after retries: " + last_error);
}

} // namespace detail

// Closed-loop replay of one session: each user turn drives the policy, the
// policy's target becomes a prompt, and the metrics are computed against the
// style the generator actually realized. The realized vector (not the
// target) is fed back as b_{t-1}, mirroring live operation.
inline ClosedLoopResult closed_loop_session(Generator& generator,
                                            const PolicyConfig& policy,
                                            const SessionLog& session,
                                            const PersonaModel& persona,
                                            const LexiconSet& lex,
                                            const ClosedLoopOptions& options = {}) {
    if (session.user_turn_count() < 3) {
        throw std::invalid_argument("session below minimum user turns: " +
                                    session.session_id);
    }
    const StyleVector anchor_z =
        options.anchor == CoherenceAnchor::Centroid
            ? persona.centroid
            : standardize_archetype(persona.raw_archetype, persona.scaler);

    PolicyState state = make_policy_state(persona.centroid);
    InstructionSet prev_instr =
        vector_to_instructions(persona.centroid, options.fragments);
    RegisterBin prev_bin = RegisterBin::Neutral;

    ClosedLoopResult result;
    std::vector<int> churns;
    std::vector<RegisterBin> bins;
    std::vector<std::pair<std::string, std::string>> history;
    std::size_t cache_hits = 0;

    for (const auto& turn : session.turns) {
        if (turn.speaker != Speaker::User) continue;
        if (trim(turn.text).empty()) continue;
        const StyleVector u = standardize(style_vector(turn.text, lex),
                                          persona.scaler);
        const StyleVector b_prev = state.b_prev;
        const PolicyStepResult step =
            policy_step(policy, state, u, turn.text, persona.centroid);
        if (step.cache_hit) ++cache_hits;

        const InstructionSet cur_instr =
            vector_to_instructions(step.b_next, options.fragments);
        const ComposedPrompt prompt =
            compose_prompt(options.base_prompt, cur_instr);

        history.emplace_back("user", turn.text);
        GeneratorRequest req{prompt.full_text, history,
                             options.max_reply_tokens};
        GeneratorResponse resp;
        try {
            resp = detail::generate_with_retries(generator, req, options);
        } catch (const std::exception& e) {
            result.complete = false;
            result.failure_reason = e.what();
            return result;
        }
        history.emplace_back("assistant", resp.text);
        result.replies.push_back(resp.text);

        const StyleVector realized_raw = style_vector(resp.text, lex);
        const StyleVector realized = standardize(realized_raw, persona.scaler);
        state.b_prev = realized; // feed realized style back into the loop

        const double informality_raw =
            std::clamp(realized_raw[kInformality], 0.0, 1.0);
        const bool first_turn = result.turns.empty();
        TurnMetrics m =
            turn_metrics(u, realized, b_prev, anchor_z, prev_instr, cur_instr,
                         prev_bin, informality_raw, first_turn);
        m.cache_hit = step.cache_hit;
        churns.push_back(m.churn);
        bins.push_back(m.bin);
        result.turns.push_back(m);
        prev_instr = cur_instr;
        prev_bin = m.bin;
    }

    SessionSummary& s = result.summary;
    s.session_id = session.session_id;
    s.participant_id = session.participant_id;
    s.policy = std::string(policy_kind_name(policy.kind));
    s.corpus = session.source;
    s.synchrony = detail::mean_metric(result.turns, &TurnMetrics::synchrony);
    s.stability = detail::mean_metric(result.turns, &TurnMetrics::stability);
    s.coherence = detail::mean_metric(result.turns, &TurnMetrics::coherence);
    s.legibility = legibility_score(churns);
    s.flip_rate = flip_rate(bins);
    s.cache_hit_rate = result.turns.empty()
                           ? 0.0
                           : static_cast<double>(cache_hits) /
                                 static_cast<double>(result.turns.size());
    s.n_turns = result.turns.size();
    return result;
}

} // namespace stylesim
