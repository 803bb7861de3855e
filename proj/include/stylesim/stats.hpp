#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "stylesim/random.hpp"

namespace stylesim {

// ---------------------------------------------------------------------------
// Student-t machinery
// ---------------------------------------------------------------------------

namespace detail {

inline double log_gamma(double x) { return std::lgamma(x); }

// Continued fraction for the regularized incomplete beta (Lentz's method).
inline double beta_cont_frac(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = detail::log_gamma(a + b) - detail::log_gamma(a) -
                            detail::log_gamma(b) + a * std::log(x) +
                            b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_cont_frac(a, b, x) / a;
    }
    return 1.0 - front * detail::beta_cont_frac(b, a, 1.0 - x) / b;
}

// CDF of Student's t with (possibly fractional) df degrees of freedom.
inline double student_t_cdf(double t, double df) {
    if (df <= 0.0) throw std::invalid_argument("df must be positive");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

inline double student_t_sf(double t, double df) {
    return student_t_cdf(-t, df);
}

// ---------------------------------------------------------------------------
// Descriptives
// ---------------------------------------------------------------------------

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean of empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) throw std::invalid_argument("variance needs >= 2 values");
    const double m = mean_of(v);
    double sq = 0.0;
    for (double x : v) sq += (x - m) * (x - m);
    return sq / static_cast<double>(v.size() - 1);
}

// Quantile with linear interpolation between closest ranks; data must be
// sorted ascending.
inline double sorted_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    if (sorted.size() == 1) return sorted[0];
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

// ---------------------------------------------------------------------------
// Per-participant deltas
// ---------------------------------------------------------------------------

// delta_i = b_i - a_i joined on participant key; any mismatch is an error
// naming the offending keys.
inline std::vector<double>
per_participant_deltas(const std::map<std::string, double>& a,
                       const std::map<std::string, double>& b) {
    std::string missing;
    for (const auto& [key, _] : a) {
        if (!b.count(key)) missing += " " + key;
    }
    for (const auto& [key, _] : b) {
        if (!a.count(key)) missing += " " + key;
    }
    if (!missing.empty()) {
        throw std::invalid_argument("participant key mismatch:" + missing);
    }
    std::vector<double> deltas;
    deltas.reserve(a.size());
    for (const auto& [key, va] : a) {
        deltas.push_back(b.at(key) - va);
    }
    return deltas;
}

// ---------------------------------------------------------------------------
// Percentile bootstrap
// ---------------------------------------------------------------------------

struct BootstrapResult {
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int n_resamples = 0;
    std::uint64_t seed = 0;
};

inline constexpr int kDefaultResamples = 10000;

// Plain percentile method (2.5th / 97.5th of resample means), no bias
// correction. Resamples are assigned to fixed-size chunks, each drawing from
// its own pre-split seed stream, so any job count reproduces the serial
// result bit for bit.
inline BootstrapResult percentile_bootstrap(const std::vector<double>& values,
                                            int n_resamples, std::uint64_t seed,
                                            unsigned jobs = 1) {
    if (values.size() < 2) {
        throw std::invalid_argument("bootstrap needs >= 2 values");
    }
    if (n_resamples < 1) {
        throw std::invalid_argument("bootstrap needs >= 1 resample");
    }
    constexpr int kChunk = 1024;
    const std::size_t n = values.size();
    const int n_chunks = (n_resamples + kChunk - 1) / kChunk;
    std::vector<double> means(static_cast<std::size_t>(n_resamples));

    auto run_chunk = [&](int chunk) {
        Rng rng(derive_stream_seed(seed, "percentile_bootstrap",
                                   static_cast<std::uint64_t>(chunk)));
        const int begin = chunk * kChunk;
        const int end = std::min(n_resamples, begin + kChunk);
        for (int r = begin; r < end; ++r) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sum += values[rng.bounded(n)];
            }
            means[static_cast<std::size_t>(r)] =
                sum / static_cast<double>(n);
        }
    };

    const unsigned n_jobs = std::max(
        1u, std::min(jobs, static_cast<unsigned>(n_chunks)));
    if (n_jobs == 1) {
        for (int c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> threads;
        std::atomic<int> next{0};
        for (unsigned t = 0; t < n_jobs; ++t) {
            threads.emplace_back([&] {
                for (int c = next.fetch_add(1); c < n_chunks;
                     c = next.fetch_add(1)) {
                    run_chunk(c);
                }
            });
        }
        for (auto& th : threads) th.join();
    }

    std::sort(means.begin(), means.end());
    BootstrapResult res;
    res.mean = mean_of(values);
    res.ci_low = sorted_quantile(means, 0.025);
    res.ci_high = sorted_quantile(means, 0.975);
    res.n_resamples = n_resamples;
    res.seed = seed;
    return res;
}

// ---------------------------------------------------------------------------
// TOST equivalence
// ---------------------------------------------------------------------------

struct TostResult {
    double sesoi = 0.10;
    double mean_diff = 0.0; // mean(b) - mean(a)
    double df = 0.0;
    double t_lower = 0.0;
    double t_upper = 0.0;
    double p_lower = 1.0;
    double p_upper = 1.0;
    double p = 1.0; // max(p_lower, p_upper)
    bool equivalent = false;
};

inline constexpr double kTostAlpha = 0.05;

// Two one-sided Welch t-tests against +/-sesoi. Unpaired; for paired data
// difference the samples first and pass paired = true.
inline TostResult tost_equivalence(const std::vector<double>& sample_a,
                                   const std::vector<double>& sample_b,
                                   double sesoi, bool paired = false) {
    if (sample_a.size() < 3 || sample_b.size() < 3) {
        throw std::invalid_argument("TOST needs >= 3 values per sample");
    }
    TostResult res;
    res.sesoi = sesoi;

    double se = 0.0;
    if (paired) {
        if (sample_a.size() != sample_b.size()) {
            throw std::invalid_argument("paired TOST needs equal-size samples");
        }
        std::vector<double> diffs(sample_a.size());
        for (std::size_t i = 0; i < sample_a.size(); ++i) {
            diffs[i] = sample_b[i] - sample_a[i];
        }
        const double n = static_cast<double>(diffs.size());
        res.mean_diff = mean_of(diffs);
        se = std::sqrt(sample_variance(diffs) / n);
        res.df = n - 1.0;
    } else {
        const double na = static_cast<double>(sample_a.size());
        const double nb = static_cast<double>(sample_b.size());
        const double va = sample_variance(sample_a);
        const double vb = sample_variance(sample_b);
        res.mean_diff = mean_of(sample_b) - mean_of(sample_a);
        se = std::sqrt(va / na + vb / nb);
        const double num = (va / na + vb / nb) * (va / na + vb / nb);
        const double den = (va / na) * (va / na) / (na - 1.0) +
                           (vb / nb) * (vb / nb) / (nb - 1.0);
        res.df = den > 0.0 ? num / den : na + nb - 2.0;
    }

    if (se <= 0.0) {
        // Degenerate samples: equivalence decided by the bound alone.
        bool inside = std::abs(res.mean_diff) < sesoi;
        res.t_lower = res.t_upper = 0.0;
        res.p_lower = res.p_upper = res.p = inside ? 0.0 : 1.0;
        res.equivalent = inside && sesoi > 0.0;
        return res;
    }

    res.t_lower = (res.mean_diff + sesoi) / se;
    res.t_upper = (res.mean_diff - sesoi) / se;
    res.p_lower = student_t_sf(res.t_lower, res.df);
    res.p_upper = student_t_cdf(res.t_upper, res.df);
    res.p = std::max(res.p_lower, res.p_upper);
    res.equivalent = res.p_lower < kTostAlpha && res.p_upper < kTostAlpha;
    return res;
}

// ---------------------------------------------------------------------------
// Spearman correlation
// ---------------------------------------------------------------------------

struct SpearmanResult {
    double rho = 0.0;
    double p = 1.0;
};

namespace detail {
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) /
                               2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& x,
                      const std::vector<double>& y) {
    const double mx = mean_of(x), my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}
} // namespace detail

// Rank with average ties, Pearson on ranks, large-sample t approximation
// for the two-sided p-value.
inline SpearmanResult spearman(const std::vector<double>& x,
                               const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
    if (x.size() < 3) throw std::invalid_argument("spearman needs >= 3 pairs");
    SpearmanResult res;
    res.rho = detail::pearson(detail::average_ranks(x), detail::average_ranks(y));
    const double n = static_cast<double>(x.size());
    const double denom = 1.0 - res.rho * res.rho;
    if (denom <= 0.0) {
        res.p = 0.0;
        return res;
    }
    const double t = res.rho * std::sqrt((n - 2.0) / denom);
    res.p = 2.0 * student_t_sf(std::abs(t), n - 2.0);
    res.p = std::min(res.p, 1.0);
    return res;
}

// ---------------------------------------------------------------------------
// Rank tables
// ---------------------------------------------------------------------------

// rank 1 = highest value; exact ties share the minimum rank.
inline std::map<std::string, int>
rank_policies(const std::map<std::string, double>& metric_by_policy) {
    if (metric_by_policy.size() < 2) {
        throw std::invalid_argument("ranking needs >= 2 policies");
    }
    std::map<std::string, int> ranks;
    for (const auto& [name, value] : metric_by_policy) {
        int rank = 1;
        for (const auto& [other, other_value] : metric_by_policy) {
            (void)other;
            if (other_value > value) ++rank;
        }
        ranks[name] = rank;
    }
    return ranks;
}

} // namespace stylesim
