#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "stylesim/metrics.hpp"
#include "stylesim/persona.hpp"
#include "stylesim/policies.hpp"
#include "stylesim/prompting.hpp"
#include "stylesim/session.hpp"

namespace stylesim {

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

struct RejectedLine {
    std::size_t line_number = 0;
    std::string reason;
    std::string content;
};

struct ParseReport {
    std::vector<RejectedLine> rejects;
};

// One JSON object per line: {session_id, participant_id, event_type, text,
// turn}. Malformed lines are collected, never fatal; duplicates of
// (session, turn, role) keep the first occurrence.
inline std::vector<SessionLog> parse_session_jsonl(std::istream& in,
                                                   ParseReport* report = nullptr,
                                                   const std::string& source = "") {
    struct Row {
        int turn;
        Speaker speaker;
        std::string text;
        std::string participant;
    };
    std::map<std::string, std::vector<Row>> by_session;
    std::map<std::string, std::set<std::pair<int, int>>> seen;

    auto reject = [&](std::size_t line_no, std::string reason, std::string line) {
        if (report) {
            report->rejects.push_back(
                {line_no, std::move(reason), std::move(line)});
        }
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            reject(line_no, "invalid json", line);
            continue;
        }
        if (!j.contains("session_id") || !j.contains("event_type") ||
            !j.contains("text") || !j.contains("turn")) {
            reject(line_no, "missing required field", line);
            continue;
        }
        std::string event = j["event_type"].is_string()
                                ? j["event_type"].get<std::string>()
                                : "";
        Speaker speaker;
        if (event == "user_message") {
            speaker = Speaker::User;
        } else if (event == "bot_response") {
            speaker = Speaker::Bot;
        } else {
            reject(line_no, "unknown event_type: " + event, line);
            continue;
        }
        if (!j["turn"].is_number_integer() && !j["turn"].is_number_unsigned()) {
            reject(line_no, "turn must be an integer", line);
            continue;
        }
        int turn = j["turn"].get<int>();
        if (turn < 0) {
            reject(line_no, "negative turn", line);
            continue;
        }
        std::string session_id = j["session_id"].is_string()
                                     ? j["session_id"].get<std::string>()
                                     : "";
        if (session_id.empty()) {
            reject(line_no, "empty session_id", line);
            continue;
        }
        auto key = std::make_pair(turn, speaker == Speaker::User ? 0 : 1);
        if (!seen[session_id].insert(key).second) {
            reject(line_no, "duplicate (session, turn, role)", line);
            continue;
        }
        Row row;
        row.turn = turn;
        row.speaker = speaker;
        row.text = j["text"].is_string() ? j["text"].get<std::string>() : "";
        row.participant = j.value("participant_id", session_id);
        by_session[session_id].push_back(std::move(row));
    }

    std::vector<SessionLog> sessions;
    for (auto& [session_id, rows] : by_session) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) {
                             if (a.turn != b.turn) return a.turn < b.turn;
                             // user_message sorts before bot_response per turn
                             return a.speaker == Speaker::User &&
                                    b.speaker == Speaker::Bot;
                         });
        SessionLog log;
        log.session_id = session_id;
        log.participant_id = rows.front().participant;
        log.source = source;
        for (auto& row : rows) {
            log.turns.push_back({std::move(row.text), row.speaker, row.turn});
        }
        sessions.push_back(std::move(log));
    }
    if (sessions.empty()) throw std::runtime_error("empty corpus");
    return sessions;
}

inline std::vector<SessionLog>
parse_session_jsonl_file(const std::filesystem::path& path,
                         ParseReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus: " + path.string());
    return parse_session_jsonl(in, report, path.filename().string());
}

// ---------------------------------------------------------------------------
// External corpus adapters
// ---------------------------------------------------------------------------

enum class CorpusFormat { SessionJsonl, DailyDialog, PersonaChat, Empathetic };

inline std::optional<CorpusFormat> parse_corpus_format(std::string_view name) {
    if (name == "jsonl" || name == "session_jsonl") return CorpusFormat::SessionJsonl;
    if (name == "daily_dialog") return CorpusFormat::DailyDialog;
    if (name == "persona_chat") return CorpusFormat::PersonaChat;
    if (name == "empathetic") return CorpusFormat::Empathetic;
    return std::nullopt;
}

namespace detail {

inline SessionLog dialogue_to_session(const std::vector<std::string>& utterances,
                                      std::string session_id,
                                      const std::string& source) {
    SessionLog log;
    log.session_id = session_id;
    log.participant_id = std::move(session_id);
    log.source = source;
    int turn = 1;
    for (std::size_t i = 0; i < utterances.size(); ++i) {
        Speaker sp = (i % 2 == 0) ? Speaker::User : Speaker::Bot;
        log.turns.push_back({utterances[i], sp, turn});
        if (sp == Speaker::Bot) ++turn;
    }
    return log;
}

// dialogues_text.txt: one dialogue per line, utterances joined by "__eou__".
inline std::vector<SessionLog> adapt_daily_dialog(std::istream& in,
                                                  const std::string& source) {
    std::vector<SessionLog> sessions;
    std::string line;
    std::size_t idx = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> utterances;
        std::size_t pos = 0;
        while (pos < line.size()) {
            auto next = line.find("__eou__", pos);
            std::string utt = trim(line.substr(
                pos, next == std::string::npos ? std::string::npos : next - pos));
            if (!utt.empty()) utterances.push_back(utt);
            if (next == std::string::npos) break;
            pos = next + 7;
        }
        if (!utterances.empty()) {
            sessions.push_back(dialogue_to_session(
                utterances, "dd_" + std::to_string(idx), source));
        }
        ++idx;
    }
    return sessions;
}

// ConvAI2-style export: "<idx> <text>" lines, persona lines skipped, user
// and bot utterances tab-separated, dialogue restarts when idx resets to 1.
inline std::vector<SessionLog> adapt_persona_chat(std::istream& in,
                                                  const std::string& source) {
    std::vector<SessionLog> sessions;
    std::vector<std::string> current;
    std::size_t dialogue_idx = 0;
    int last_idx = 0;

    auto flush = [&]() {
        if (!current.empty()) {
            sessions.push_back(dialogue_to_session(
                current, "pc_" + std::to_string(dialogue_idx), source));
            ++dialogue_idx;
            current.clear();
        }
    };

    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        int idx = 0;
        if (!(ls >> idx)) continue;
        std::string rest;
        std::getline(ls, rest);
        rest = trim(rest);
        if (idx <= last_idx) flush();
        last_idx = idx;
        if (rest.rfind("your persona:", 0) == 0 ||
            rest.rfind("partner's persona:", 0) == 0) {
            continue;
        }
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            auto tab = rest.find('\t', pos);
            parts.push_back(rest.substr(
                pos, tab == std::string::npos ? std::string::npos : tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        // first field user, second bot; trailing candidate lists ignored
        if (!parts.empty() && !trim(parts[0]).empty()) {
            current.push_back(trim(parts[0]));
        }
        if (parts.size() > 1 && !trim(parts[1]).empty()) {
            current.push_back(trim(parts[1]));
        }
    }
    flush();
    return sessions;
}

// CSV export with header conv_id,utterance_idx,...,utterance,...; commas in
// text are escaped as "_comma_".
inline std::vector<SessionLog> adapt_empathetic(std::istream& in,
                                                const std::string& source) {
    std::string header;
    if (!std::getline(in, header)) return {};
    std::vector<std::string> cols;
    {
        std::stringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) cols.push_back(trim(col));
    }
    auto col_index = [&](std::string_view name) -> int {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (cols[i] == name) return static_cast<int>(i);
        }
        return -1;
    };
    const int conv_col = col_index("conv_id");
    const int idx_col = col_index("utterance_idx");
    const int utt_col = col_index("utterance");
    if (conv_col < 0 || idx_col < 0 || utt_col < 0) {
        throw std::runtime_error("empathetic export missing expected columns");
    }

    std::map<std::string, std::vector<std::pair<int, std::string>>> by_conv;
    std::vector<std::string> conv_order;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        const std::size_t needed = static_cast<std::size_t>(
            std::max({conv_col, idx_col, utt_col})) + 1;
        if (fields.size() < needed) continue;
        std::string conv = trim(fields[static_cast<std::size_t>(conv_col)]);
        int idx = 0;
        try {
            idx = std::stoi(fields[static_cast<std::size_t>(idx_col)]);
        } catch (const std::exception&) {
            continue;
        }
        std::string text = fields[static_cast<std::size_t>(utt_col)];
        std::size_t pos;
        while ((pos = text.find("_comma_")) != std::string::npos) {
            text.replace(pos, 7, ",");
        }
        if (!by_conv.count(conv)) conv_order.push_back(conv);
        by_conv[conv].emplace_back(idx, trim(text));
    }

    std::vector<SessionLog> sessions;
    for (const auto& conv : conv_order) {
        auto rows = by_conv[conv];
        std::stable_sort(rows.begin(), rows.end(),
                         [](const auto& a, const auto& b) {
                             return a.first < b.first;
                         });
        std::vector<std::string> utterances;
        for (auto& [_, text] : rows) {
            if (!text.empty()) utterances.push_back(text);
        }
        if (!utterances.empty()) {
            sessions.push_back(dialogue_to_session(utterances, conv, source));
        }
    }
    return sessions;
}

} // namespace detail

inline std::vector<SessionLog>
adapt_external_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus: " + path.string());
    const std::string source = path.filename().string();
    switch (format) {
    case CorpusFormat::SessionJsonl:
        return parse_session_jsonl(in, nullptr, source);
    case CorpusFormat::DailyDialog:
        return detail::adapt_daily_dialog(in, source);
    case CorpusFormat::PersonaChat:
        return detail::adapt_persona_chat(in, source);
    case CorpusFormat::Empathetic:
        return detail::adapt_empathetic(in, source);
    }
    throw std::invalid_argument("unknown corpus format");
}

// Engagement filter: at least three non-empty user turns.
inline std::vector<SessionLog>
filter_sessions(const std::vector<SessionLog>& sessions,
                std::size_t min_user_turns = 3) {
    std::vector<SessionLog> kept;
    for (const auto& s : sessions) {
        if (s.user_turn_count() >= min_user_turns) kept.push_back(s);
    }
    return kept;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

// Which vector anchors the coherence cosine: the standardized fixed
// archetype (default, corpus-independent) or the corpus's own centroid.
enum class CoherenceAnchor { Archetype, Centroid };

struct ReplayOptions {
    CoherenceAnchor anchor = CoherenceAnchor::Archetype;
    FragmentTable fragments = default_fragment_table();
};

struct SessionSummary {
    std::string session_id;
    std::string participant_id;
    std::string policy;
    std::string corpus;
    double synchrony = 0.0;
    double stability = 0.0;
    double coherence = 0.0;
    double legibility = 1.0;
    double flip_rate = 0.0;
    double cache_hit_rate = 0.0;
    std::size_t n_turns = 0;
};

struct SessionResult {
    std::vector<TurnMetrics> turns;
    SessionSummary summary;
};

namespace detail {

inline double mean_metric(const std::vector<TurnMetrics>& turns,
                          double TurnMetrics::* field) {
    if (turns.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& t : turns) sum += t.*field;
    return sum / static_cast<double>(turns.size());
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace detail

// Replays one session under one policy. The simulated bot starts at the
// persona centroid and consumes only user turns; logged bot turns are
// ignored here (they matter when fitting the persona, not when simulating).
inline SessionResult run_session(const PolicyConfig& policy,
                                 const SessionLog& session,
                                 const PersonaModel& persona,
                                 const LexiconSet& lex,
                                 const ReplayOptions& options = {}) {
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

    SessionResult result;
    std::vector<int> churns;
    std::vector<RegisterBin> bins;
    std::size_t cache_hits = 0;

    for (const auto& turn : session.turns) {
        if (turn.speaker != Speaker::User) continue;
        if (trim(turn.text).empty()) continue; // skipped, logged upstream
        const StyleVector u_raw = style_vector(turn.text, lex);
        const StyleVector u = standardize(u_raw, persona.scaler);
        const StyleVector b_prev = state.b_prev;
        const PolicyStepResult step =
            policy_step(policy, state, u, turn.text, persona.centroid);
        if (step.cache_hit) ++cache_hits;

        const InstructionSet cur_instr =
            vector_to_instructions(step.b_next, options.fragments);
        const double informality_raw = detail::clamp01(
            unstandardize(step.b_next, persona.scaler)[kInformality]);
        const bool first_turn = result.turns.empty();
        TurnMetrics m =
            turn_metrics(u, step.b_next, b_prev, anchor_z, prev_instr,
                         cur_instr, prev_bin, informality_raw, first_turn);
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

struct PolicySummary {
    std::string policy;
    std::size_t n_sessions = 0;
    double mean_synchrony = 0.0, std_synchrony = 0.0;
    double mean_stability = 0.0, std_stability = 0.0;
    double mean_coherence = 0.0, std_coherence = 0.0;
    double mean_legibility = 0.0, std_legibility = 0.0;
    double mean_flip_rate = 0.0, std_flip_rate = 0.0;
    double mean_cache_hit_rate = 0.0, std_cache_hit_rate = 0.0;
    std::vector<SessionSummary> sessions; // per-session rows retained
};

namespace detail {

inline void mean_std(const std::vector<double>& v, double& mean, double& sd) {
    if (v.empty()) {
        mean = sd = 0.0;
        return;
    }
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double sq = 0.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    sd = std::sqrt(sq / static_cast<double>(v.size()));
}

inline PolicySummary summarize_policy(const std::string& policy,
                                      std::vector<SessionSummary> rows) {
    PolicySummary ps;
    ps.policy = policy;
    ps.n_sessions = rows.size();
    auto collect = [&](double SessionSummary::* field) {
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& r : rows) v.push_back(r.*field);
        return v;
    };
    mean_std(collect(&SessionSummary::synchrony), ps.mean_synchrony,
             ps.std_synchrony);
    mean_std(collect(&SessionSummary::stability), ps.mean_stability,
             ps.std_stability);
    mean_std(collect(&SessionSummary::coherence), ps.mean_coherence,
             ps.std_coherence);
    mean_std(collect(&SessionSummary::legibility), ps.mean_legibility,
             ps.std_legibility);
    mean_std(collect(&SessionSummary::flip_rate), ps.mean_flip_rate,
             ps.std_flip_rate);
    mean_std(collect(&SessionSummary::cache_hit_rate), ps.mean_cache_hit_rate,
             ps.std_cache_hit_rate);
    ps.sessions = std::move(rows);
    return ps;
}

} // namespace detail

// Cross product of policies x sessions. Sessions run independently (and in
// parallel when jobs > 1); aggregation order is fixed by input order, so the
// output is deterministic either way.
inline std::vector<PolicySummary>
run_ablation(const std::vector<PolicyConfig>& policies,
             const std::vector<SessionLog>& corpus, const PersonaModel& persona,
             const LexiconSet& lex, const ReplayOptions& options = {},
             unsigned jobs = 1) {
    if (policies.empty()) throw std::invalid_argument("no policies");
    if (corpus.empty()) throw std::invalid_argument("empty corpus");

    std::vector<PolicySummary> summaries;
    summaries.reserve(policies.size());
    for (const auto& policy : policies) {
        std::vector<SessionSummary> rows(corpus.size());
        auto worker = [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                rows[i] =
                    run_session(policy, corpus[i], persona, lex, options).summary;
            }
        };
        const unsigned n_jobs =
            std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(
                                                      corpus.size())));
        if (n_jobs == 1) {
            worker(0, corpus.size());
        } else {
            std::vector<std::thread> threads;
            const std::size_t chunk =
                (corpus.size() + n_jobs - 1) / n_jobs;
            for (unsigned t = 0; t < n_jobs; ++t) {
                const std::size_t begin = t * chunk;
                const std::size_t end = std::min(corpus.size(), begin + chunk);
                if (begin >= end) break;
                threads.emplace_back(worker, begin, end);
            }
            for (auto& th : threads) th.join();
        }
        summaries.push_back(detail::summarize_policy(
            std::string(policy_kind_name(policy.kind)), std::move(rows)));
    }
    return summaries;
}

// Raw style vectors of every non-empty bot utterance; the persona fitting
// corpus.
inline std::vector<StyleVector>
bot_style_vectors(const std::vector<SessionLog>& sessions,
                  const LexiconSet& lex) {
    std::vector<StyleVector> vecs;
    for (const auto& s : sessions) {
        for (const auto& t : s.turns) {
            if (t.speaker != Speaker::Bot) continue;
            if (trim(t.text).empty()) continue;
            vecs.push_back(style_vector(t.text, lex));
        }
    }
    return vecs;
}

// Fits scaler + centroid on the corpus's bot utterances and standardizes the
// supplied raw archetype into that z-space.
inline PersonaModel fit_persona(const std::vector<SessionLog>& sessions,
                                const LexiconSet& lex,
                                const StyleVector& raw_archetype,
                                const std::string& corpus_id) {
    auto vecs = bot_style_vectors(sessions, lex);
    if (vecs.empty()) throw std::runtime_error("no bot utterances to fit on");
    PersonaModel p;
    p.scaler = fit_scaler(vecs, corpus_id);
    p.centroid = compute_centroid(vecs, p.scaler);
    p.raw_archetype = raw_archetype;
    return p;
}

} // namespace stylesim
