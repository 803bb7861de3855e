#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "stylesim/style_vector.hpp"
#include "stylesim/tokenize.hpp"

namespace stylesim {

enum class Direction { High, Low };

// (dimension, direction) identifies a fragment; at most one fragment per
// dimension is ever active because High/Low thresholds cannot both fire.
struct InstructionFragment {
    std::size_t dimension = 0;
    Direction direction = Direction::High;
    std::string text;

    friend bool operator<(const InstructionFragment& a,
                          const InstructionFragment& b) {
        if (a.dimension != b.dimension) return a.dimension < b.dimension;
        return a.direction < b.direction;
    }
    friend bool operator==(const InstructionFragment& a,
                           const InstructionFragment& b) {
        return a.dimension == b.dimension && a.direction == b.direction;
    }
};

using InstructionSet = std::set<InstructionFragment>;

// Fallback delta used when no dimension crosses a threshold; shared with the
// static condition so the non-adaptive prompt is stable.
inline constexpr const char* kStaticFallbackInstruction =
    "Maintain your own consistent, friendly style, regardless of how the user "
    "writes.";

inline constexpr const char* kDefaultBasePrompt =
    "You are a warm, attentive conversational assistant. Stay safe and "
    "respectful, keep the conversation flowing, and answer the user's "
    "questions directly.";

struct FragmentTable {
    // texts[dimension][0] = High fragment, [1] = Low fragment.
    std::array<std::array<std::string, 2>, kNumFeatures> texts;
    // Per-dimension activation thresholds in z-units (symmetric +/-).
    std::array<double, kNumFeatures> thresholds;
};

inline FragmentTable default_fragment_table() {
    FragmentTable t;
    t.thresholds.fill(0.5);
    t.texts[kInformality] = {"Adopt a casual, relaxed tone.",
                             "Maintain a polished, formal register."};
    t.texts[kSentiment] = {"Express warmth and positivity.",
                           "Adopt a serious, subdued tone."};
    t.texts[kAvgSentenceLen] = {"Use longer, more elaborate sentences.",
                                "Keep your sentences short."};
    t.texts[kReadability] = {"Use plain, easy-to-read language.",
                             "Use sophisticated vocabulary and layered sentences."};
    t.texts[kSocialRate] = {
        "Lean into social language about people and relationships.",
        "Keep the focus on the topic rather than on people."};
    t.texts[kCognitiveRate] = {
        "Reason things through aloud with reflective, analytical language.",
        "Favor direct statements over analytical language."};
    t.texts[kAffectiveRate] = {"Use emotionally expressive language.",
                               "Keep emotional language to a minimum."};
    t.texts[kFunctionWordRatio] = {
        "Favor everyday connective words over dense phrasing.",
        "Use dense, content-rich phrasing."};
    return t;
}

// Optional override file: "dimension_index<TAB>direction<TAB>text" with
// direction spelled "high" or "low". Unlisted slots keep their defaults.
inline FragmentTable load_fragment_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open fragment table: " + path.string());
    }
    FragmentTable t = default_fragment_table();
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto t1 = line.find('\t');
        auto t2 = line.find('\t', t1 == std::string::npos ? t1 : t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) continue;
        std::size_t dim = 0;
        try {
            dim = static_cast<std::size_t>(std::stoul(line.substr(0, t1)));
        } catch (const std::exception&) {
            continue;
        }
        if (dim >= kNumFeatures) continue;
        std::string dir = to_lower(trim(line.substr(t1 + 1, t2 - t1 - 1)));
        std::string text = trim(line.substr(t2 + 1));
        if (text.empty()) continue;
        if (dir == "high") {
            t.texts[dim][0] = text;
        } else if (dir == "low") {
            t.texts[dim][1] = text;
        }
    }
    return t;
}

// g(.): threshold each standardized dimension; above +thr emits the High
// fragment, below -thr the Low fragment, nothing in between.
inline InstructionSet vector_to_instructions(const StyleVector& b_target,
                                             const FragmentTable& table) {
    InstructionSet set;
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
        double thr = table.thresholds[i];
        if (b_target[i] > thr) {
            set.insert({i, Direction::High, table.texts[i][0]});
        } else if (b_target[i] < -thr) {
            set.insert({i, Direction::Low, table.texts[i][1]});
        }
    }
    return set;
}

struct ComposedPrompt {
    std::string base;
    std::string delta;
    std::string full_text;
};

// base + "\n\n" + delta; fragments render in ascending dimension order, or
// the static fallback line when no fragment is active.
inline ComposedPrompt compose_prompt(const std::string& base,
                                     const InstructionSet& instr) {
    if (base.empty()) throw std::invalid_argument("empty base prompt");
    ComposedPrompt p;
    p.base = base;
    if (instr.empty()) {
        p.delta = kStaticFallbackInstruction;
    } else {
        for (const auto& frag : instr) {
            if (!p.delta.empty()) p.delta.push_back('\n');
            p.delta += frag.text;
        }
    }
    p.full_text = p.base + "\n\n" + p.delta;
    return p;
}

// Discrete instructional changes between consecutive turns: the symmetric
// difference of the fragment identifier sets.
inline int instruction_churn(const InstructionSet& prev,
                             const InstructionSet& cur) {
    int changes = 0;
    for (const auto& f : prev) {
        if (!cur.count(f)) ++changes;
    }
    for (const auto& f : cur) {
        if (!prev.count(f)) ++changes;
    }
    return changes;
}

// Ceiling on per-turn churn: all 8 dimensions swapping High<->Low.
inline constexpr int kMaxChurnPerTurn = 16;

} // namespace stylesim
