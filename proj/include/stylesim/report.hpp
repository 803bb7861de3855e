#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "stylesim/replay.hpp"
#include "stylesim/stats.hpp"
#include "stylesim/version.hpp"

namespace stylesim {

// Identifies the run that produced a file; written as the first line of
// every output so results stay traceable to a config + seed.
struct RunStamp {
    std::string config_hash;
    std::uint64_t seed = 0;

    std::string header_line() const {
        return "# stylesim " + std::string(kVersion) +
               " config_hash=" + config_hash + " seed=" + std::to_string(seed);
    }
};

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary); // binary: byte-stable newlines
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    return out;
}

} // namespace detail

struct StatsRow {
    std::string comparison;
    std::string metric;
    double mean_delta = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double tost_p = 1.0;
    bool equivalent = false;
};

inline void write_summary_csv(const std::filesystem::path& path,
                              const std::vector<PolicySummary>& summaries,
                              const RunStamp& stamp) {
    auto out = detail::open_out(path);
    out << stamp.header_line() << "\n";
    out << "corpus,policy,session_id,participant_id,synchrony,stability,"
           "coherence,legibility,flip_rate,cache_hit_rate,n_turns\n";
    for (const auto& ps : summaries) {
        for (const auto& s : ps.sessions) {
            out << s.corpus << ',' << s.policy << ',' << s.session_id << ','
                << s.participant_id << ',' << detail::fmt(s.synchrony) << ','
                << detail::fmt(s.stability) << ',' << detail::fmt(s.coherence)
                << ',' << detail::fmt(s.legibility) << ','
                << detail::fmt(s.flip_rate) << ','
                << detail::fmt(s.cache_hit_rate) << ',' << s.n_turns << "\n";
        }
    }
}

inline void write_frontier_csv(const std::filesystem::path& path,
                               const std::vector<PolicySummary>& summaries,
                               const RunStamp& stamp) {
    auto out = detail::open_out(path);
    out << stamp.header_line() << "\n";
    out << "policy,mean_stability,mean_synchrony,mean_coherence\n";
    for (const auto& ps : summaries) {
        out << ps.policy << ',' << detail::fmt(ps.mean_stability) << ','
            << detail::fmt(ps.mean_synchrony) << ','
            << detail::fmt(ps.mean_coherence) << "\n";
    }
}

inline void write_stats_csv(const std::filesystem::path& path,
                            const std::vector<StatsRow>& rows,
                            const RunStamp& stamp) {
    auto out = detail::open_out(path);
    out << stamp.header_line() << "\n";
    out << "comparison,metric,mean_delta,ci_low,ci_high,tost_p,equivalent\n";
    for (const auto& r : rows) {
        out << r.comparison << ',' << r.metric << ','
            << detail::fmt(r.mean_delta) << ',' << detail::fmt(r.ci_low) << ','
            << detail::fmt(r.ci_high) << ',' << detail::fmt(r.tost_p) << ','
            << (r.equivalent ? "true" : "false") << "\n";
    }
}

inline void write_window_ablation_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::size_t, double>>& rows,
    const RunStamp& stamp) {
    auto out = detail::open_out(path);
    out << stamp.header_line() << "\n";
    out << "window,mean_predictive_synchrony\n";
    for (const auto& [k, v] : rows) {
        out << k << ',' << detail::fmt(v) << "\n";
    }
}

// Minimal labelled scatter of (stability, synchrony) policy means.
inline void write_frontier_svg(const std::filesystem::path& path,
                               const std::vector<PolicySummary>& summaries,
                               const RunStamp& stamp) {
    constexpr double kW = 640.0, kH = 480.0, kPad = 60.0;
    auto x_of = [&](double stability) {
        return kPad + (stability + 1.0) / 2.0 * (kW - 2 * kPad);
    };
    auto y_of = [&](double synchrony) {
        return kH - kPad - (synchrony + 1.0) / 2.0 * (kH - 2 * kPad);
    };
    auto out = detail::open_out(path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<!-- " << stamp.header_line().substr(2) << " -->\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
        << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH
        << "\">\n";
    out << "  <rect width=\"" << kW << "\" height=\"" << kH
        << "\" fill=\"white\"/>\n";
    out << "  <line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\""
        << kW - kPad << "\" y2=\"" << kH - kPad
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "  <line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad
        << "\" y2=\"" << kH - kPad
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "  <text x=\"" << kW / 2 << "\" y=\"" << kH - 18
        << "\" text-anchor=\"middle\" font-size=\"14\">stability</text>\n";
    out << "  <text x=\"18\" y=\"" << kH / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 "
           "18 "
        << kH / 2 << ")\">synchrony</text>\n";
    for (const auto& ps : summaries) {
        const double cx = x_of(ps.mean_stability);
        const double cy = y_of(ps.mean_synchrony);
        out << "  <circle cx=\"" << detail::fmt(cx) << "\" cy=\""
            << detail::fmt(cy) << "\" r=\"5\" fill=\"steelblue\"/>\n";
        out << "  <text x=\"" << detail::fmt(cx + 8) << "\" y=\""
            << detail::fmt(cy - 6) << "\" font-size=\"12\">" << ps.policy
            << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace stylesim
