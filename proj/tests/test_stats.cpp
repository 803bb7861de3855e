#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "stylesim/stats.hpp"

using namespace stylesim;
using Catch::Approx;

TEST_CASE("student t cdf against reference values") {
    // reference values computed with an independent implementation
    REQUIRE(student_t_cdf(1.0, 5.0) ==
            Approx(0.8183912661754387).margin(1e-12));
    REQUIRE(student_t_cdf(-2.5, 10.0) ==
            Approx(0.015723422118304388).margin(1e-12));
    REQUIRE(student_t_cdf(0.0, 3.0) == Approx(0.5).margin(1e-12));
    REQUIRE(student_t_cdf(4.2426406871, 2.0) ==
            Approx(0.9743416490250413).margin(1e-12));
    // fractional degrees of freedom (Welch)
    REQUIRE(student_t_cdf(2.0, 29.5) ==
            Approx(0.9726091937079154).margin(1e-12));

    SECTION("symmetry") {
        for (double t : {0.3, 1.7, 2.9}) {
            REQUIRE(student_t_cdf(t, 7.0) + student_t_cdf(-t, 7.0) ==
                    Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("per_participant_deltas") {
    std::map<std::string, double> a{{"p1", 0.5}, {"p2", 0.8}};
    std::map<std::string, double> b{{"p1", 0.7}, {"p2", 0.8}};

    auto deltas = per_participant_deltas(a, b);
    REQUIRE(deltas.size() == 2);
    REQUIRE(deltas[0] == Approx(0.2).margin(1e-12)); // keyed join: p1 first
    REQUIRE(deltas[1] == 0.0);

    REQUIRE(per_participant_deltas(a, a) == std::vector<double>{0.0, 0.0});

    std::map<std::string, double> disjoint{{"q1", 1.0}, {"q2", 2.0}};
    REQUIRE_THROWS_AS(per_participant_deltas(a, disjoint),
                      std::invalid_argument);
}

TEST_CASE("percentile bootstrap") {
    SECTION("exhaustive oracle for {-1, +1}") {
        // All four equally likely resamples of two values: means are
        // {-1, 0, 0, +1}, so P(-1) = 0.25, P(0) = 0.5, P(+1) = 0.25.
        // With 10,000 resamples both tails hold far more than 2.5% mass, so
        // the percentile CI is exactly [-1, +1].
        const std::vector<double> values{-1.0, 1.0};

        int count_neg = 0, count_zero = 0, count_pos = 0;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double mean = (values[i] + values[j]) / 2.0;
                if (mean == -1.0) ++count_neg;
                else if (mean == 0.0) ++count_zero;
                else ++count_pos;
            }
        }
        REQUIRE(count_neg == 1);
        REQUIRE(count_zero == 2);
        REQUIRE(count_pos == 1);

        auto res = percentile_bootstrap(values, kDefaultResamples, 12345);
        REQUIRE(res.ci_low == -1.0);
        REQUIRE(res.ci_high == 1.0);
        REQUIRE(res.mean == 0.0);
    }

    SECTION("constant input collapses the CI") {
        auto res = percentile_bootstrap({0.42, 0.42, 0.42, 0.42}, 2000, 9);
        REQUIRE(res.ci_low == 0.42);
        REQUIRE(res.ci_high == 0.42);
    }

    SECTION("fixed seed reproduces the CI bit-exactly") {
        const std::vector<double> values{0.1, 0.4, -0.3, 0.9, 0.2, -0.1, 0.5};
        auto a = percentile_bootstrap(values, 5000, 777);
        auto b = percentile_bootstrap(values, 5000, 777);
        REQUIRE(a.ci_low == b.ci_low);
        REQUIRE(a.ci_high == b.ci_high);
        auto c = percentile_bootstrap(values, 5000, 778);
        REQUIRE((a.ci_low != c.ci_low || a.ci_high != c.ci_high));
    }

    SECTION("pre-split streams: parallel resampling matches serial") {
        const std::vector<double> values{0.1, 0.4, -0.3, 0.9, 0.2, -0.1, 0.5};
        auto serial = percentile_bootstrap(values, 5000, 777, 1);
        auto parallel = percentile_bootstrap(values, 5000, 777, 4);
        REQUIRE(serial.ci_low == parallel.ci_low);
        REQUIRE(serial.ci_high == parallel.ci_high);
    }

    SECTION("shift equivariance") {
        const std::vector<double> values{0.1, 0.4, -0.3, 0.9, 0.2};
        std::vector<double> shifted;
        for (double v : values) shifted.push_back(v + 10.0);
        auto a = percentile_bootstrap(values, 3000, 42);
        auto b = percentile_bootstrap(shifted, 3000, 42);
        REQUIRE(b.ci_low == Approx(a.ci_low + 10.0).margin(1e-12));
        REQUIRE(b.ci_high == Approx(a.ci_high + 10.0).margin(1e-12));
    }

    SECTION("undersized input is an error") {
        REQUIRE_THROWS_AS(percentile_bootstrap({1.0}, 100, 1),
                          std::invalid_argument);
    }
}

namespace {
// 15 values at lo and 15 at hi: mean (lo+hi)/2, easy closed-form variance.
std::vector<double> bimodal_sample(double lo, double hi) {
    std::vector<double> v;
    for (int i = 0; i < 15; ++i) v.push_back(lo);
    for (int i = 0; i < 15; ++i) v.push_back(hi);
    return v;
}
} // namespace

TEST_CASE("TOST equivalence against closed-form oracles") {
    const auto a = bimodal_sample(0.45, 0.55);

    SECTION("pinned fixture: small shift is equivalent") {
        // b = a + 0.02; Welch df = 58, se = 0.0131306...;
        // p_lower = sf((0.02+0.10)/se), p_upper = cdf((0.02-0.10)/se).
        auto b = bimodal_sample(0.47, 0.57);
        auto res = tost_equivalence(a, b, 0.10);
        REQUIRE(res.df == Approx(58.0).margin(1e-9));
        REQUIRE(res.p_lower == Approx(3.914166000039633e-13).margin(1e-6));
        REQUIRE(res.p_upper == Approx(4.791922377949845e-08).margin(1e-6));
        REQUIRE(res.equivalent);
    }

    SECTION("pinned fixture: half-unit gap is not equivalent") {
        auto b = bimodal_sample(0.95, 1.05);
        auto res = tost_equivalence(a, b, 0.10);
        REQUIRE(res.p_upper == Approx(1.0).margin(1e-6));
        REQUIRE_FALSE(res.equivalent);
    }

    SECTION("two copies of the same sample are equivalent") {
        auto res = tost_equivalence(a, a, 0.10);
        REQUIRE(res.p_lower == Approx(1.3520754336106666e-10).margin(1e-6));
        REQUIRE(res.p_upper == Approx(1.3520754336106666e-10).margin(1e-6));
        REQUIRE(res.equivalent);
    }

    SECTION("sesoi of zero is never equivalent") {
        auto res = tost_equivalence(a, a, 0.0);
        REQUIRE_FALSE(res.equivalent);
    }

    SECTION("symmetry of the verdict") {
        auto b = bimodal_sample(0.47, 0.57);
        REQUIRE(tost_equivalence(a, b, 0.10).equivalent ==
                tost_equivalence(b, a, 0.10).equivalent);
    }

    SECTION("undersized samples are an error") {
        REQUIRE_THROWS_AS(tost_equivalence({1.0, 2.0}, a, 0.1),
                          std::invalid_argument);
    }

    SECTION("paired mode uses the differenced sample") {
        auto b = bimodal_sample(0.47, 0.57);
        auto res = tost_equivalence(a, b, 0.10, /*paired=*/true);
        REQUIRE(res.df == Approx(29.0));
        REQUIRE(res.equivalent); // constant +0.02 differences, tiny se
    }
}

TEST_CASE("spearman rank correlation") {
    SECTION("monotone identity and reversal") {
        std::vector<double> x{1, 2, 3, 4, 5};
        std::vector<double> y{10, 20, 30, 40, 50};
        REQUIRE(spearman(x, y).rho == Approx(1.0));
        std::vector<double> neg{50, 40, 30, 20, 10};
        REQUIRE(spearman(x, neg).rho == Approx(-1.0));
    }

    SECTION("tied fixture pinned by hand ranking") {
        // ranks of x: 1, 2.5, 2.5, 4; Pearson on ranks = sqrt(4.5/5)
        std::vector<double> x{1, 2, 2, 3};
        std::vector<double> y{1, 2, 3, 4};
        auto res = spearman(x, y);
        REQUIRE(res.rho == Approx(0.9486832980505138).margin(1e-12));
        REQUIRE(res.p == Approx(0.05131670194948612).margin(1e-9));
    }

    SECTION("invariant under strictly monotone transforms") {
        std::vector<double> x{0.3, 1.7, 0.9, 2.4, 1.1, 0.2};
        std::vector<double> y{4.0, 2.2, 3.1, 0.4, 2.8, 4.4};
        auto base = spearman(x, y);
        std::vector<double> tx;
        for (double v : x) tx.push_back(std::exp(v));
        std::vector<double> ty;
        for (double v : y) ty.push_back(v * v * v + 5.0);
        auto transformed = spearman(tx, ty);
        REQUIRE(transformed.rho == Approx(base.rho).margin(1e-12));
    }

    SECTION("length mismatch is an error") {
        REQUIRE_THROWS_AS(spearman({1, 2, 3}, {1, 2}), std::invalid_argument);
    }
}

TEST_CASE("rank_policies: rank 1 is best, ties share the minimum rank") {
    std::map<std::string, double> synchrony{
        {"uncapped", 1.0}, {"deadband", 0.997}, {"ema", 0.9},
        {"cap", 0.81},     {"hybrid", 0.81},    {"static", 0.08}};
    auto ranks = rank_policies(synchrony);
    REQUIRE(ranks["uncapped"] == 1);
    REQUIRE(ranks["deadband"] == 2);
    REQUIRE(ranks["ema"] == 3);
    REQUIRE(ranks["cap"] == 4);
    REQUIRE(ranks["hybrid"] == 4); // shared rank
    REQUIRE(ranks["static"] == 6);

    REQUIRE_THROWS_AS(rank_policies({{"only", 1.0}}), std::invalid_argument);
}
