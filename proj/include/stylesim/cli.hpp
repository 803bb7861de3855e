#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stylesim/config.hpp"
#include "stylesim/generation.hpp"
#include "stylesim/http_generator.hpp"
#include "stylesim/lexicon.hpp"
#include "stylesim/report.hpp"
#include "stylesim/replay.hpp"
#include "stylesim/stats.hpp"

namespace stylesim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline std::vector<SessionLog> load_corpus(const CorpusSpec& spec) {
    auto sessions = adapt_external_corpus(spec.path, spec.format);
    for (auto& s : sessions) s.source = spec.name;
    return sessions;
}

// Input paths are config errors when absent, checked before any work starts.
inline void validate_inputs(const RunConfig& cfg) {
    for (const auto& spec : cfg.corpora) {
        if (!std::filesystem::exists(spec.path)) {
            throw std::invalid_argument("corpus path does not exist: " +
                                        spec.path.string());
        }
    }
    if (cfg.persona_source == PersonaSource::LoadFile &&
        !std::filesystem::exists(cfg.persona_path)) {
        throw std::invalid_argument("persona path does not exist: " +
                                    cfg.persona_path.string());
    }
    if (!cfg.archetype_path.empty() &&
        !std::filesystem::exists(cfg.archetype_path)) {
        throw std::invalid_argument("archetype path does not exist: " +
                                    cfg.archetype_path.string());
    }
    if (!cfg.fragment_table_path.empty() &&
        !std::filesystem::exists(cfg.fragment_table_path)) {
        throw std::invalid_argument("fragment table does not exist: " +
                                    cfg.fragment_table_path.string());
    }
    if (!cfg.data_dir.empty() && !std::filesystem::exists(cfg.data_dir)) {
        throw std::invalid_argument("data_dir does not exist: " +
                                    cfg.data_dir.string());
    }
}

inline StyleVector resolve_archetype(const RunConfig& cfg) {
    if (!cfg.archetype_path.empty()) return load_raw_archetype(cfg.archetype_path);
    return default_raw_archetype();
}

inline FragmentTable resolve_fragments(const RunConfig& cfg) {
    if (!cfg.fragment_table_path.empty()) {
        return load_fragment_table(cfg.fragment_table_path);
    }
    auto default_path = (cfg.data_dir.empty() ? default_data_dir()
                                              : cfg.data_dir) /
                        "fragments.tsv";
    if (std::filesystem::exists(default_path)) {
        return load_fragment_table(default_path);
    }
    return default_fragment_table();
}

inline std::map<std::string, double>
participant_means(const std::vector<SessionSummary>& rows,
                  double SessionSummary::* field) {
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& r : rows) {
        auto& [sum, n] = acc[r.participant_id];
        sum += r.*field;
        ++n;
    }
    std::map<std::string, double> means;
    for (const auto& [participant, pair] : acc) {
        means[participant] = pair.first / static_cast<double>(pair.second);
    }
    return means;
}

struct MetricField {
    const char* name;
    double SessionSummary::* field;
};

inline constexpr MetricField kComparableMetrics[] = {
    {"synchrony", &SessionSummary::synchrony},
    {"stability", &SessionSummary::stability},
    {"coherence", &SessionSummary::coherence},
};

// Per-participant deltas of each policy against the baseline, with
// percentile-bootstrap CI and TOST equivalence.
inline std::vector<StatsRow>
compare_policies(const std::vector<PolicySummary>& summaries,
                 const std::string& baseline, double sesoi, bool paired,
                 int n_resamples, std::uint64_t seed,
                 const std::string& stream_prefix) {
    const PolicySummary* base = nullptr;
    for (const auto& ps : summaries) {
        if (ps.policy == baseline) base = &ps;
    }
    if (!base && !summaries.empty()) base = &summaries.front();
    std::vector<StatsRow> rows;
    if (!base) return rows;

    for (const auto& ps : summaries) {
        if (&ps == base) continue;
        const std::string comparison = ps.policy + "_vs_" + base->policy;
        for (const auto& metric : kComparableMetrics) {
            auto base_means = participant_means(base->sessions, metric.field);
            auto pol_means = participant_means(ps.sessions, metric.field);
            auto deltas = per_participant_deltas(base_means, pol_means);
            if (deltas.size() < 3) continue;

            std::vector<double> base_sample, pol_sample;
            base_sample.reserve(base_means.size());
            for (const auto& [_, v] : base_means) base_sample.push_back(v);
            pol_sample.reserve(pol_means.size());
            for (const auto& [_, v] : pol_means) pol_sample.push_back(v);

            const auto stream = derive_stream_seed(
                seed, stream_prefix + ":" + comparison + ":" + metric.name);
            const BootstrapResult boot =
                percentile_bootstrap(deltas, n_resamples, stream);
            const TostResult tost =
                tost_equivalence(base_sample, pol_sample, sesoi, paired);

            StatsRow row;
            row.comparison = comparison;
            row.metric = metric.name;
            row.mean_delta = boot.mean;
            row.ci_low = boot.ci_low;
            row.ci_high = boot.ci_high;
            row.tost_p = tost.p;
            row.equivalent = tost.equivalent;
            rows.push_back(row);
        }
    }
    return rows;
}

inline void write_rank_table(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::vector<PolicySummary>>>&
        per_corpus,
    const RunStamp& stamp) {
    auto out = std::ofstream(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    out << stamp.header_line() << "\n";
    out << "metric,corpus,policy,rank\n";
    struct MetricCol {
        const char* name;
        double PolicySummary::* field;
    };
    constexpr MetricCol kCols[] = {
        {"stability", &PolicySummary::mean_stability},
        {"synchrony", &PolicySummary::mean_synchrony},
    };
    for (const auto& col : kCols) {
        for (const auto& [corpus, summaries] : per_corpus) {
            if (summaries.size() < 2) continue;
            std::map<std::string, double> by_policy;
            for (const auto& ps : summaries) by_policy[ps.policy] = ps.*col.field;
            auto ranks = rank_policies(by_policy);
            for (const auto& ps : summaries) {
                out << col.name << ',' << corpus << ',' << ps.policy << ','
                    << ranks.at(ps.policy) << "\n";
            }
        }
    }
}

inline void write_session_jsonl(const std::filesystem::path& path,
                                const std::vector<SessionLog>& sessions) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    for (const auto& s : sessions) {
        for (const auto& t : s.turns) {
            nlohmann::json j;
            j["session_id"] = s.session_id;
            j["participant_id"] = s.participant_id;
            j["event_type"] =
                t.speaker == Speaker::User ? "user_message" : "bot_response";
            j["text"] = t.text;
            j["turn"] = t.turn_index;
            out << j.dump() << "\n";
        }
    }
}

inline std::vector<SessionSummary>
parse_summary_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open summary: " + path.string());
    std::string line;
    std::vector<std::string> header;
    std::vector<SessionSummary> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (header.empty()) {
            header = fields;
            continue;
        }
        if (fields.size() != header.size()) continue;
        SessionSummary s;
        for (std::size_t i = 0; i < header.size(); ++i) {
            const std::string& col = header[i];
            const std::string& val = fields[i];
            if (col == "corpus") s.corpus = val;
            else if (col == "policy") s.policy = val;
            else if (col == "session_id") s.session_id = val;
            else if (col == "participant_id") s.participant_id = val;
            else if (col == "synchrony") s.synchrony = std::stod(val);
            else if (col == "stability") s.stability = std::stod(val);
            else if (col == "coherence") s.coherence = std::stod(val);
            else if (col == "legibility") s.legibility = std::stod(val);
            else if (col == "flip_rate") s.flip_rate = std::stod(val);
            else if (col == "cache_hit_rate") s.cache_hit_rate = std::stod(val);
            else if (col == "n_turns")
                s.n_turns = static_cast<std::size_t>(std::stoul(val));
        }
        rows.push_back(std::move(s));
    }
    if (rows.empty()) throw std::invalid_argument("summary has no rows");
    return rows;
}

inline std::unique_ptr<Generator> make_generator(const ClosedLoopConfig& cfg,
                                                 const FragmentTable& fragments) {
    if (cfg.generator == "http") {
        auto remote = RemoteGeneratorConfig::from_env();
        if (!remote) {
            throw std::invalid_argument(
                "closed_loop.generator=http requires GENERATOR_URL");
        }
        return make_remote_generator(*remote);
    }
    auto mode = parse_stub_mode(cfg.generator);
    if (!mode) {
        throw std::invalid_argument("unknown generator: " + cfg.generator);
    }
    return std::make_unique<StubGenerator>(*mode, fragments);
}

struct FlagOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> policies;
    std::optional<std::string> windows;
    bool closed_loop = false;
    std::optional<unsigned> jobs;
};

inline void apply_overrides(RunConfig& cfg, const FlagOverrides& flags) {
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.out) cfg.out_dir = *flags.out;
    if (flags.jobs) cfg.jobs = *flags.jobs;
    if (flags.closed_loop) cfg.closed_loop.enabled = true;
    if (flags.policies) {
        cfg.policies.clear();
        std::stringstream ss(*flags.policies);
        std::string name;
        while (std::getline(ss, name, ',')) {
            auto kind = parse_policy_kind(trim(name));
            if (!kind) {
                throw std::invalid_argument("unknown policy kind: " + name);
            }
            PolicyConfig p;
            p.kind = *kind;
            cfg.policies.push_back(p);
        }
        if (cfg.policies.empty()) {
            throw std::invalid_argument("--policies parsed to an empty list");
        }
    }
    if (flags.windows) {
        cfg.windows.clear();
        std::stringstream ss(*flags.windows);
        std::string w;
        while (std::getline(ss, w, ',')) {
            const long k = std::stol(trim(w));
            if (k < 1) throw std::invalid_argument("window sizes must be >= 1");
            cfg.windows.push_back(static_cast<std::size_t>(k));
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

inline int cmd_fit_persona(const RunConfig& cfg, std::ostream& log) {
    validate_inputs(cfg);
    const LexiconSet lex = load_lexicons(
        cfg.data_dir.empty() ? default_data_dir() : cfg.data_dir);
    const StyleVector archetype = resolve_archetype(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto& spec : cfg.corpora) {
        auto sessions = filter_sessions(load_corpus(spec));
        if (sessions.empty()) {
            throw std::runtime_error("corpus '" + spec.name +
                                     "' has no sessions after filtering");
        }
        PersonaModel persona = fit_persona(sessions, lex, archetype, spec.name);
        const auto out_path =
            cfg.corpora.size() == 1
                ? cfg.out_dir / "persona.json"
                : cfg.out_dir / ("persona_" + spec.name + ".json");
        save_persona(persona, out_path);
        log << "fitted persona on '" << spec.name
            << "': n_samples=" << persona.scaler.n_samples << " -> "
            << out_path.string() << "\n";
    }
    return kExitOk;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
    validate_inputs(cfg);
    const LexiconSet lex = load_lexicons(
        cfg.data_dir.empty() ? default_data_dir() : cfg.data_dir);
    const StyleVector archetype = resolve_archetype(cfg);
    const FragmentTable fragments = resolve_fragments(cfg);
    const RunStamp stamp{cfg.config_hash, cfg.seed};

    ReplayOptions options;
    options.anchor = cfg.anchor;
    options.fragments = fragments;

    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::pair<std::string, std::vector<PolicySummary>>> per_corpus;

    for (const auto& spec : cfg.corpora) {
        auto sessions = filter_sessions(load_corpus(spec));
        if (sessions.empty()) {
            throw std::runtime_error("corpus '" + spec.name +
                                     "' has no sessions after filtering");
        }
        PersonaModel persona;
        if (cfg.persona_source == PersonaSource::LoadFile) {
            persona = load_persona(cfg.persona_path);
        } else {
            persona = fit_persona(sessions, lex, archetype, spec.name);
        }

        const auto corpus_dir = cfg.corpora.size() == 1
                                    ? cfg.out_dir
                                    : cfg.out_dir / spec.name;
        std::filesystem::create_directories(corpus_dir);

        auto summaries =
            run_ablation(cfg.policies, sessions, persona, lex, options, cfg.jobs);
        write_summary_csv(corpus_dir / "summary.csv", summaries, stamp);
        write_frontier_csv(corpus_dir / "frontier.csv", summaries, stamp);
        write_frontier_svg(corpus_dir / "frontier.svg", summaries, stamp);
        auto stats_rows = compare_policies(
            summaries, cfg.baseline_policy, cfg.sesoi, cfg.paired,
            cfg.bootstrap_resamples, cfg.seed, spec.name);
        write_stats_csv(corpus_dir / "stats.csv", stats_rows, stamp);
        log << "corpus '" << spec.name << "': " << sessions.size()
            << " sessions x " << cfg.policies.size() << " policies -> "
            << corpus_dir.string() << "\n";

        if (!cfg.windows.empty()) {
            std::vector<std::pair<std::size_t, double>> rows;
            for (std::size_t k : cfg.windows) {
                rows.emplace_back(
                    k, predictive_synchrony(sessions, k, lex, persona.scaler));
            }
            write_window_ablation_csv(corpus_dir / "window_ablation.csv", rows,
                                      stamp);
        }

        if (cfg.closed_loop.enabled) {
            auto generator = make_generator(cfg.closed_loop, fragments);
            ClosedLoopOptions loop;
            loop.base_prompt = cfg.base_prompt;
            loop.anchor = cfg.anchor;
            loop.fragments = fragments;
            loop.max_reply_tokens = cfg.closed_loop.max_reply_tokens;

            const std::size_t n_sessions =
                std::min(cfg.closed_loop.sessions, sessions.size());
            const auto loop_dir = corpus_dir / "closed_loop";
            std::filesystem::create_directories(loop_dir);
            std::ofstream incomplete(loop_dir / "incomplete.log",
                                     std::ios::binary);
            incomplete << stamp.header_line() << "\n";

            std::vector<PolicySummary> loop_summaries;
            for (const auto& policy : cfg.policies) {
                std::vector<SessionSummary> rows;
                for (std::size_t i = 0; i < n_sessions; ++i) {
                    auto result = closed_loop_session(*generator, policy,
                                                      sessions[i], persona,
                                                      lex, loop);
                    if (!result.complete) {
                        incomplete << sessions[i].session_id << ','
                                   << policy_kind_name(policy.kind) << ','
                                   << result.failure_reason << "\n";
                        continue;
                    }
                    rows.push_back(result.summary);
                }
                loop_summaries.push_back(stylesim::detail::summarize_policy(
                    std::string(policy_kind_name(policy.kind)),
                    std::move(rows)));
            }
            write_summary_csv(loop_dir / "summary.csv", loop_summaries, stamp);
            write_frontier_csv(loop_dir / "frontier.csv", loop_summaries, stamp);
            auto loop_stats = compare_policies(
                loop_summaries, cfg.baseline_policy, cfg.sesoi, cfg.paired,
                cfg.bootstrap_resamples, cfg.seed,
                spec.name + ":closed_loop");
            write_stats_csv(loop_dir / "stats.csv", loop_stats, stamp);
        }

        per_corpus.emplace_back(spec.name, std::move(summaries));
    }

    write_rank_table(cfg.out_dir / "rank_stability.csv", per_corpus, stamp);
    return kExitOk;
}

inline int cmd_stats(const std::filesystem::path& summary_path,
                     const std::filesystem::path& out_dir,
                     const std::string& baseline, double sesoi, bool paired,
                     int n_resamples, std::uint64_t seed) {
    auto rows = parse_summary_csv(summary_path);
    std::map<std::string, std::vector<SessionSummary>> by_policy;
    std::vector<std::string> policy_order;
    for (auto& r : rows) {
        if (!by_policy.count(r.policy)) policy_order.push_back(r.policy);
        by_policy[r.policy].push_back(std::move(r));
    }
    std::vector<PolicySummary> summaries;
    for (const auto& policy : policy_order) {
        summaries.push_back(stylesim::detail::summarize_policy(
            policy, std::move(by_policy[policy])));
    }
    auto stats_rows = compare_policies(summaries, baseline, sesoi, paired,
                                       n_resamples, seed, "stats");
    std::filesystem::create_directories(out_dir);
    const RunStamp stamp{hex64(fnv1a64(summary_path.string())), seed};
    write_stats_csv(out_dir / "stats.csv", stats_rows, stamp);
    return kExitOk;
}

inline int cmd_convert(const std::filesystem::path& input,
                       const std::string& format_name,
                       const std::filesystem::path& output, std::ostream& log) {
    auto format = parse_corpus_format(format_name);
    if (!format) {
        throw std::invalid_argument("unknown corpus format: " + format_name);
    }
    auto sessions = adapt_external_corpus(input, *format);
    auto filtered = filter_sessions(sessions);
    write_session_jsonl(output, filtered);
    log << "converted " << sessions.size() << " sessions (" << filtered.size()
        << " after filtering) -> " << output.string() << "\n";
    return kExitOk;
}

} // namespace detail

// Entry point shared by the binary and the tests. Returns a process exit
// code: 0 ok, 1 runtime failure, 2 usage/config error.
inline int run(const std::vector<std::string>& args,
               std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"style adaptation replay and evaluation harness"};
    app.require_subcommand(1);

    std::string config_path;
    detail::FlagOverrides flags;
    std::uint64_t seed_flag = 0;
    std::string out_flag, policies_flag, windows_flag;
    unsigned jobs_flag = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "run config JSON");
        if (needs_config) opt->required();
        cmd->add_option("--seed", seed_flag, "override RNG seed");
        cmd->add_option("--out", out_flag, "override output directory");
        cmd->add_option("--jobs", jobs_flag, "parallel sessions");
    };

    auto* fit = app.add_subcommand("fit-persona",
                                   "fit scaler + centroid from a corpus");
    add_common(fit, true);

    auto* sim = app.add_subcommand("simulate",
                                   "replay corpora through the policy set");
    add_common(sim, true);
    sim->add_option("--policies", policies_flag,
                    "comma-separated policy kinds (defaults from config)");
    sim->add_option("--windows", windows_flag,
                    "comma-separated window sizes for the ablation");
    sim->add_flag("--closed-loop", flags.closed_loop,
                  "also run the generator-in-the-loop mode");

    auto* stats_cmd =
        app.add_subcommand("stats", "recompute comparisons from a summary.csv");
    std::string summary_path;
    std::string baseline = "uncapped";
    double sesoi = 0.10;
    bool paired = false;
    int resamples = kDefaultResamples;
    std::uint64_t stats_seed = 0;
    std::string stats_out = "out";
    stats_cmd->add_option("--summary", summary_path, "summary.csv path")
        ->required();
    stats_cmd->add_option("--out", stats_out, "output directory");
    stats_cmd->add_option("--baseline", baseline, "baseline policy name");
    stats_cmd->add_option("--sesoi", sesoi, "equivalence bound");
    stats_cmd->add_flag("--paired", paired, "paired TOST");
    stats_cmd->add_option("--resamples", resamples, "bootstrap resamples");
    stats_cmd->add_option("--seed", stats_seed, "RNG seed");

    auto* convert =
        app.add_subcommand("convert", "adapt an external corpus to JSONL");
    std::string convert_input, convert_format = "daily_dialog",
                convert_output = "corpus.jsonl";
    convert->add_option("--input", convert_input, "raw corpus export")
        ->required();
    convert->add_option("--format", convert_format,
                        "daily_dialog | persona_chat | empathetic | jsonl");
    convert->add_option("--out", convert_output, "output JSONL path");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    if (CLI::App* active = fit->parsed() ? fit : sim->parsed() ? sim : nullptr) {
        if (active->count("--seed")) flags.seed = seed_flag;
        if (active->count("--out")) flags.out = out_flag;
        if (active->count("--jobs")) flags.jobs = jobs_flag;
    }
    if (sim->parsed()) {
        if (sim->count("--policies")) flags.policies = policies_flag;
        if (sim->count("--windows")) flags.windows = windows_flag;
    }

    try {
        if (fit->parsed() || sim->parsed()) {
            RunConfig cfg = load_run_config(config_path);
            detail::apply_overrides(cfg, flags);
            return fit->parsed() ? detail::cmd_fit_persona(cfg, out)
                                 : detail::cmd_simulate(cfg, out);
        }
        if (stats_cmd->parsed()) {
            return detail::cmd_stats(summary_path, stats_out, baseline, sesoi,
                                     paired, resamples, stats_seed);
        }
        if (convert->parsed()) {
            return detail::cmd_convert(convert_input, convert_format,
                                       convert_output, out);
        }
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

} // namespace stylesim::cli
