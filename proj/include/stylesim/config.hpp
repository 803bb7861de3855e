#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stylesim/generation.hpp"
#include "stylesim/policies.hpp"
#include "stylesim/replay.hpp"
#include "stylesim/stats.hpp"
#include "stylesim/version.hpp"

namespace stylesim {

struct CorpusSpec {
    std::filesystem::path path;
    CorpusFormat format = CorpusFormat::SessionJsonl;
    std::string name;
};

enum class PersonaSource { FitFromCorpus, LoadFile };

struct ClosedLoopConfig {
    bool enabled = false;
    std::string generator = "echo"; // echo | fixed | styled | http
    std::size_t sessions = 25;
    int max_reply_tokens = 256;
};

// A full run description. Parsed from a single JSON document; unknown keys
// anywhere are configuration errors, not warnings.
struct RunConfig {
    std::vector<CorpusSpec> corpora;
    std::vector<PolicyConfig> policies;
    PersonaSource persona_source = PersonaSource::FitFromCorpus;
    std::filesystem::path persona_path;
    std::filesystem::path archetype_path;
    std::filesystem::path fragment_table_path;
    std::filesystem::path data_dir;
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 0;
    std::vector<std::size_t> windows;
    std::string base_prompt = kDefaultBasePrompt;
    CoherenceAnchor anchor = CoherenceAnchor::Archetype;
    ClosedLoopConfig closed_loop;
    unsigned jobs = 1;
    std::string baseline_policy = "uncapped";
    double sesoi = 0.10;
    int bootstrap_resamples = kDefaultResamples;
    bool paired = false;

    std::string config_hash; // fnv1a of the canonical source document
};

namespace detail {

inline void require_known_keys(const nlohmann::json& obj,
                               const std::set<std::string>& known,
                               const std::string& context) {
    for (const auto& [key, _] : obj.items()) {
        if (!known.count(key)) {
            throw std::invalid_argument("unknown config key '" + key + "' in " +
                                        context);
        }
    }
}

inline PolicyConfig parse_policy(const nlohmann::json& j) {
    if (j.is_string()) {
        auto kind = parse_policy_kind(j.get<std::string>());
        if (!kind) {
            throw std::invalid_argument("unknown policy kind: " +
                                        j.get<std::string>());
        }
        PolicyConfig cfg;
        cfg.kind = *kind;
        return cfg;
    }
    if (!j.is_object()) {
        throw std::invalid_argument("policy entries must be strings or objects");
    }
    require_known_keys(j, {"kind", "kappa", "alpha", "epsilon", "rho"},
                       "policy");
    auto kind = parse_policy_kind(j.at("kind").get<std::string>());
    if (!kind) {
        throw std::invalid_argument("unknown policy kind: " +
                                    j.at("kind").get<std::string>());
    }
    PolicyConfig cfg;
    cfg.kind = *kind;
    cfg.kappa = j.value("kappa", cfg.kappa);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    cfg.rho = j.value("rho", cfg.rho);
    if (cfg.kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");
    if (cfg.alpha < 0.0 || cfg.alpha > 1.0) {
        throw std::invalid_argument("alpha must be in [0,1]");
    }
    if (cfg.epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
    if (cfg.rho <= 0.0) throw std::invalid_argument("rho must be > 0");
    return cfg;
}

} // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j,
                                  const std::string& raw_text) {
    if (!j.is_object()) throw std::invalid_argument("config must be an object");
    detail::require_known_keys(
        j,
        {"corpora", "policies", "persona", "archetype_path",
         "fragment_table_path", "data_dir", "out_dir", "seed", "windows",
         "base_prompt", "coherence_anchor", "closed_loop", "jobs",
         "baseline_policy", "sesoi", "bootstrap_resamples", "paired"},
        "config");

    RunConfig cfg;
    cfg.config_hash = hex64(fnv1a64(raw_text));

    if (!j.contains("corpora") || !j["corpora"].is_array() ||
        j["corpora"].empty()) {
        throw std::invalid_argument("config needs a non-empty 'corpora' array");
    }
    for (const auto& c : j["corpora"]) {
        detail::require_known_keys(c, {"path", "format", "name"}, "corpus");
        CorpusSpec spec;
        spec.path = c.at("path").get<std::string>();
        std::string format = c.value("format", std::string("jsonl"));
        auto parsed = parse_corpus_format(format);
        if (!parsed) {
            throw std::invalid_argument("unknown corpus format: " + format);
        }
        spec.format = *parsed;
        spec.name = c.value("name", spec.path.stem().string());
        cfg.corpora.push_back(std::move(spec));
    }

    if (j.contains("policies")) {
        for (const auto& p : j["policies"]) {
            cfg.policies.push_back(detail::parse_policy(p));
        }
    }
    if (cfg.policies.empty()) {
        for (auto kind :
             {PolicyKind::Static, PolicyKind::Uncapped, PolicyKind::Cap,
              PolicyKind::Ema, PolicyKind::DeadBand, PolicyKind::Hybrid,
              PolicyKind::HybridRadius, PolicyKind::HybridCache}) {
            PolicyConfig p;
            p.kind = kind;
            cfg.policies.push_back(p);
        }
    }

    if (j.contains("persona")) {
        const auto& p = j["persona"];
        detail::require_known_keys(p, {"source", "path"}, "persona");
        std::string source = p.value("source", std::string("fit"));
        if (source == "fit") {
            cfg.persona_source = PersonaSource::FitFromCorpus;
        } else if (source == "load") {
            cfg.persona_source = PersonaSource::LoadFile;
            if (!p.contains("path")) {
                throw std::invalid_argument(
                    "persona.source=load requires persona.path");
            }
        } else {
            throw std::invalid_argument("persona.source must be fit or load");
        }
        if (p.contains("path")) cfg.persona_path = p.at("path").get<std::string>();
    }

    if (j.contains("archetype_path")) {
        cfg.archetype_path = j["archetype_path"].get<std::string>();
    }
    if (j.contains("fragment_table_path")) {
        cfg.fragment_table_path = j["fragment_table_path"].get<std::string>();
    }
    if (j.contains("data_dir")) cfg.data_dir = j["data_dir"].get<std::string>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("windows")) {
        for (const auto& w : j["windows"]) {
            auto k = w.get<std::int64_t>();
            if (k < 1) throw std::invalid_argument("window sizes must be >= 1");
            cfg.windows.push_back(static_cast<std::size_t>(k));
        }
    }
    if (j.contains("base_prompt")) {
        cfg.base_prompt = j["base_prompt"].get<std::string>();
        if (cfg.base_prompt.empty()) {
            throw std::invalid_argument("base_prompt must be non-empty");
        }
    }
    if (j.contains("coherence_anchor")) {
        std::string anchor = j["coherence_anchor"].get<std::string>();
        if (anchor == "archetype") {
            cfg.anchor = CoherenceAnchor::Archetype;
        } else if (anchor == "centroid") {
            cfg.anchor = CoherenceAnchor::Centroid;
        } else {
            throw std::invalid_argument(
                "coherence_anchor must be archetype or centroid");
        }
    }
    if (j.contains("closed_loop")) {
        const auto& c = j["closed_loop"];
        detail::require_known_keys(
            c, {"enabled", "generator", "sessions", "max_reply_tokens"},
            "closed_loop");
        cfg.closed_loop.enabled = c.value("enabled", false);
        cfg.closed_loop.generator = c.value("generator", std::string("echo"));
        if (cfg.closed_loop.generator != "http" &&
            !parse_stub_mode(cfg.closed_loop.generator)) {
            throw std::invalid_argument("unknown closed_loop.generator: " +
                                        cfg.closed_loop.generator);
        }
        cfg.closed_loop.sessions =
            c.value("sessions", static_cast<std::uint64_t>(25));
        cfg.closed_loop.max_reply_tokens = c.value("max_reply_tokens", 256);
    }
    if (j.contains("jobs")) {
        auto v = j["jobs"].get<std::int64_t>();
        if (v < 1) throw std::invalid_argument("jobs must be >= 1");
        cfg.jobs = static_cast<unsigned>(v);
    }
    if (j.contains("baseline_policy")) {
        cfg.baseline_policy = j["baseline_policy"].get<std::string>();
        if (!parse_policy_kind(cfg.baseline_policy)) {
            throw std::invalid_argument("unknown baseline_policy: " +
                                        cfg.baseline_policy);
        }
    }
    if (j.contains("sesoi")) {
        cfg.sesoi = j["sesoi"].get<double>();
        if (cfg.sesoi < 0.0) throw std::invalid_argument("sesoi must be >= 0");
    }
    if (j.contains("bootstrap_resamples")) {
        cfg.bootstrap_resamples = j["bootstrap_resamples"].get<int>();
        if (cfg.bootstrap_resamples < 1) {
            throw std::invalid_argument("bootstrap_resamples must be >= 1");
        }
    }
    if (j.contains("paired")) cfg.paired = j["paired"].get<bool>();
    return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path.string());
    std::string raw((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    nlohmann::json j = nlohmann::json::parse(raw);
    return parse_run_config(j, raw);
}

// Raw archetype file: JSON array of 8 numbers, or {"archetype": [...]}.
inline StyleVector load_raw_archetype(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open archetype: " + path.string());
    nlohmann::json j;
    in >> j;
    if (j.is_object() && j.contains("archetype")) j = j["archetype"];
    if (!j.is_array() || j.size() != kNumFeatures) {
        throw std::invalid_argument("archetype must be an array of 8 numbers");
    }
    StyleVector v{};
    for (std::size_t i = 0; i < kNumFeatures; ++i) v[i] = j[i].get<double>();
    return v;
}

} // namespace stylesim
