#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stylesim/style_vector.hpp"

namespace stylesim {

// Per-corpus standardization. Population standard deviation; zero-variance
// columns fall back to std 1.0 so degenerate corpora never divide by zero.
struct FeatureScaler {
    StyleVector means{};
    StyleVector stds{};
    std::string fitted_on;
    std::size_t n_samples = 0;
};

struct PersonaModel {
    FeatureScaler scaler;
    StyleVector centroid{};      // standardized persona centroid
    StyleVector raw_archetype{}; // raw-space coherence anchor
};

inline constexpr double kStdFloor = 1e-9;

inline FeatureScaler fit_scaler(const std::vector<StyleVector>& raw_vectors,
                                const std::string& corpus_id = "") {
    if (raw_vectors.empty()) throw std::invalid_argument("no fitting data");
    FeatureScaler s;
    s.fitted_on = corpus_id;
    s.n_samples = raw_vectors.size();
    const double n = static_cast<double>(raw_vectors.size());
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
        double sum = 0.0;
        for (const auto& v : raw_vectors) sum += v[i];
        s.means[i] = sum / n;
        double sq = 0.0;
        for (const auto& v : raw_vectors) {
            double d = v[i] - s.means[i];
            sq += d * d;
        }
        double sd = std::sqrt(sq / n);
        s.stds[i] = sd < kStdFloor ? 1.0 : sd;
    }
    return s;
}

inline StyleVector standardize(const StyleVector& v, const FeatureScaler& s) {
    StyleVector z;
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
        z[i] = (v[i] - s.means[i]) / s.stds[i];
    }
    return z;
}

inline StyleVector unstandardize(const StyleVector& z, const FeatureScaler& s) {
    StyleVector v;
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
        v[i] = z[i] * s.stds[i] + s.means[i];
    }
    return v;
}

inline StyleVector compute_centroid(const std::vector<StyleVector>& raw_vectors,
                                    const FeatureScaler& s) {
    if (raw_vectors.empty()) throw std::invalid_argument("no fitting data");
    StyleVector acc{};
    for (const auto& v : raw_vectors) acc = acc + standardize(v, s);
    return acc * (1.0 / static_cast<double>(raw_vectors.size()));
}

// Same math as standardize; named separately because the result anchors the
// coherence metric for that corpus.
inline StyleVector standardize_archetype(const StyleVector& raw_archetype,
                                         const FeatureScaler& s) {
    return standardize(raw_archetype, s);
}

// Synthetic default archetype: a friendly, fairly neutral assistant voice.
// Override with a user-supplied raw vector when a real baseline exists.
inline StyleVector default_raw_archetype() {
    StyleVector v{};
    v[kInformality] = 0.45;
    v[kSentiment] = 0.35;
    v[kAvgSentenceLen] = 12.0;
    v[kReadability] = 70.0;
    v[kSocialRate] = 0.08;
    v[kCognitiveRate] = 0.06;
    v[kAffectiveRate] = 0.05;
    v[kFunctionWordRatio] = 0.45;
    return v;
}

// --- JSON persistence -------------------------------------------------------

inline nlohmann::json persona_to_json(const PersonaModel& p) {
    nlohmann::json j;
    j["means"] = p.scaler.means;
    j["stds"] = p.scaler.stds;
    j["centroid"] = p.centroid;
    j["raw_archetype"] = p.raw_archetype;
    j["fitted_on"] = p.scaler.fitted_on;
    j["n_samples"] = p.scaler.n_samples;
    return j;
}

inline PersonaModel persona_from_json(const nlohmann::json& j) {
    PersonaModel p;
    auto read_vec = [&](const char* key) {
        auto arr = j.at(key);
        if (!arr.is_array() || arr.size() != kNumFeatures) {
            throw std::runtime_error(std::string("persona field '") + key +
                                     "' must be an array of 8 numbers");
        }
        StyleVector v{};
        for (std::size_t i = 0; i < kNumFeatures; ++i) v[i] = arr[i].get<double>();
        return v;
    };
    p.scaler.means = read_vec("means");
    p.scaler.stds = read_vec("stds");
    p.centroid = read_vec("centroid");
    p.raw_archetype = read_vec("raw_archetype");
    p.scaler.fitted_on = j.at("fitted_on").get<std::string>();
    p.scaler.n_samples = j.at("n_samples").get<std::size_t>();
    for (double sd : p.scaler.stds) {
        if (!(sd > 0.0)) throw std::runtime_error("persona stds must be positive");
    }
    return p;
}

inline void save_persona(const PersonaModel& p,
                         const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write persona: " + path.string());
    out << persona_to_json(p).dump(2) << "\n";
}

inline PersonaModel load_persona(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read persona: " + path.string());
    nlohmann::json j;
    in >> j;
    return persona_from_json(j);
}

} // namespace stylesim
