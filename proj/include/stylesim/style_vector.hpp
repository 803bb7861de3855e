#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string_view>

namespace stylesim {

// Fixed feature order. Everything downstream (scalers, policies, prompt
// thresholds) indexes into this layout.
enum Feature : std::size_t {
    kInformality = 0,
    kSentiment = 1,
    kAvgSentenceLen = 2,
    kReadability = 3,
    kSocialRate = 4,
    kCognitiveRate = 5,
    kAffectiveRate = 6,
    kFunctionWordRatio = 7,
};

inline constexpr std::size_t kNumFeatures = 8;

inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "informality",   "sentiment",      "avg_sentence_len", "readability",
    "social_rate",   "cognitive_rate", "affective_rate",   "function_word_ratio",
};

// 8-dimensional style vector. Raw (feature units) and standardized (z-score)
// vectors share this type; which space a value lives in is contextual.
using StyleVector = std::array<double, kNumFeatures>;

inline StyleVector zero_vector() { return StyleVector{}; }

inline StyleVector operator+(const StyleVector& a, const StyleVector& b) {
    StyleVector r;
    for (std::size_t i = 0; i < kNumFeatures; ++i) r[i] = a[i] + b[i];
    return r;
}

inline StyleVector operator-(const StyleVector& a, const StyleVector& b) {
    StyleVector r;
    for (std::size_t i = 0; i < kNumFeatures; ++i) r[i] = a[i] - b[i];
    return r;
}

inline StyleVector operator*(const StyleVector& a, double s) {
    StyleVector r;
    for (std::size_t i = 0; i < kNumFeatures; ++i) r[i] = a[i] * s;
    return r;
}

inline StyleVector operator*(double s, const StyleVector& a) { return a * s; }

inline double dot(const StyleVector& a, const StyleVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < kNumFeatures; ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const StyleVector& a) { return std::sqrt(dot(a, a)); }

inline double distance(const StyleVector& a, const StyleVector& b) {
    return norm(a - b);
}

inline bool is_zero(const StyleVector& a) {
    for (double v : a)
        if (v != 0.0) return false;
    return true;
}

inline bool all_finite(const StyleVector& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace stylesim
