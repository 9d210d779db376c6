#include <gtest/gtest.h>

#include <cmath>

#include "bnkit/error.hpp"
#include "bnkit/posterior.hpp"
#include "support.hpp"

using namespace bnkit;
using namespace testsupport;

namespace {

DirichletPosterior two_cell(std::uint64_t a, std::uint64_t b, double alpha) {
    return {{"x", "y"}, {a, b}, {alpha, alpha}};
}

McConfig config(std::size_t chains, std::size_t samples, std::uint64_t seed) {
    McConfig c;
    c.chains = chains;
    c.samples_per_chain = samples;
    c.seed = seed;
    return c;
}

// Shortest 95% interval of Beta(a, b) by a density grid.
std::pair<double, double> beta_hpd_oracle(double a, double b, double prob) {
    const std::size_t n = 200000;
    const double h = 1.0 / n;
    const double lnorm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    std::vector<double> cdf(n + 1, 0.0);
    auto pdf = [&](double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return std::exp(lnorm + (a - 1) * std::log(x) + (b - 1) * std::log1p(-x));
    };
    for (std::size_t i = 1; i <= n; ++i) cdf[i] = cdf[i - 1] + 0.5 * h * (pdf((i - 1) * h) + pdf(i * h));
    std::pair<double, double> best{0.0, 1.0};
    std::size_t u = 0;
    for (std::size_t l = 0; l <= n; ++l) {
        while (u <= n && cdf[u] - cdf[l] < prob) ++u;
        if (u > n) break;
        if ((u - l) * h < best.second - best.first) best = {l * h, u * h};
    }
    return best;
}

}  // namespace

TEST(PosteriorFromQuery, CellsAndErrors) {
    Dataset d({{"F", "filter", {"no", "si"}}, {"X", "x", {"0", "1"}}, {"Y", "y", {"a", "b", "c"}}},
              {{1, 1, 1, 1, 0}, {1, 0, 1, 1, 0}, {0, 0, 2, 1, kMissing}});
    EXPECT_THROW(posterior_from_query(d, {{"F", 1}}, {"X", "Y"}, 0.5), MissingData);
    Dataset ok({{"F", "filter", {"no", "si"}}, {"X", "x", {"0", "1"}}, {"Y", "y", {"a", "b", "c"}}},
               {{1, 1, 1, 0}, {1, 0, 1, 1}, {0, 0, 2, 1}});
    auto q = posterior_from_query(ok, {{"F", 1}}, {"X", "Y"}, 0.5);
    EXPECT_EQ(q.counts, (std::vector<std::uint64_t>{1, 1, 0, 0, 0, 1}));
    EXPECT_EQ(q.alpha, std::vector<double>(6, 0.5));
    ASSERT_EQ(q.cells.size(), 6u);
    EXPECT_EQ(q.cells[1], "X=1,Y=a");
    EXPECT_EQ(q.cells[2], "X=0,Y=b");
    EXPECT_THROW(posterior_from_query(ok, {{"F", 0}, {"X", 0}}, {"X", "Y"}, 0.5), EmptySubset);
    EXPECT_THROW(posterior_from_query(ok, {}, {"X", "X"}, 0.5), OverlapError);
    EXPECT_THROW(posterior_from_query(ok, {}, {"X", "Q"}, 0.5), UnknownNode);
    EXPECT_THROW(posterior_from_query(ok, {}, {"X", "Y"}, 0.0), ConstraintViolation);
}

TEST(Alpha, Conventions) {
    EXPECT_DOUBLE_EQ(alpha_iss_cells(10, 9), 10.0 / 9.0);
    Network net(parse_model_string("[P][BB][AK|P:BB]"), schemas_for({"AK", "BB", "P"}, {3, 3, 3}),
                {Cpt{"P", {}, {}, 3, {0.2, 0.3, 0.5}}, Cpt{"BB", {}, {}, 3, {0.2, 0.3, 0.5}},
                 Cpt{"AK", {"BB", "P"}, {3, 3}, 3, [] {
                     std::vector<double> t;
                     for (int j = 0; j < 9; ++j) t.insert(t.end(), {0.2, 0.3, 0.5});
                     return t;
                 }()}});
    EXPECT_DOUBLE_EQ(alpha_parent_product(10, net, {"BB", "AK"}), 10.0 / 27.0);
}

TEST(Sample, SimplexAndDeterminism) {
    auto p = two_cell(3, 1, 1.0);
    auto cfg = config(3, 500, 7);
    auto d1 = sample(p, cfg);
    for (std::size_t c = 0; c < d1.chains; ++c)
        for (std::size_t s = 0; s < d1.samples; ++s) {
            EXPECT_GT(d1.at(c, s, 0), 0.0);
            EXPECT_GT(d1.at(c, s, 1), 0.0);
            EXPECT_NEAR(d1.at(c, s, 0) + d1.at(c, s, 1), 1.0, 1e-12);
        }
    EXPECT_EQ(sample(p, cfg), d1);
    cfg.seed = 8;
    EXPECT_NE(sample(p, cfg), d1);
    EXPECT_THROW(sample(p, config(0, 10, 1)), ConstraintViolation);
    EXPECT_THROW(sample({{"x"}, {1}, {1.0}}, cfg), FormatError);
}

TEST(Summarize, MeanWithinThreeNaiveSe) {
    auto p = two_cell(3, 1, 1.0);
    auto s = summarize(sample(p, config(4, 10000, 1)), McConfig{});
    EXPECT_NEAR(s.cells[0].mean, 2.0 / 3.0, 3 * s.cells[0].naive_se);
    EXPECT_NEAR(s.cells[1].mean, 1.0 / 3.0, 3 * s.cells[1].naive_se);
    EXPECT_NEAR(s.cells[0].sd / s.cells[0].naive_se, 200.0, 1e-9);
    EXPECT_NEAR(s.cells[0].ts_se / s.cells[0].naive_se, 1.0, 0.3);
}

TEST(Summarize, ConstantDraws) {
    Draws d{2, 5, 1, std::vector<double>(10, 0.25)};
    auto s = summarize(d, McConfig{});
    EXPECT_EQ(s.cells[0].sd, 0.0);
    EXPECT_EQ(s.cells[0].mean, 0.25);
    for (const auto& [lo, hi] : s.cells[0].hpd) {
        EXPECT_EQ(lo, 0.25);
        EXPECT_EQ(hi, 0.25);
    }
}

TEST(Quantile, Interpolation) {
    const std::vector<double> v{1, 2, 3, 4, 5};
    EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 3.0);
    EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.25), 2.0);
    EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.1), 1.4);
    EXPECT_DOUBLE_EQ(quantile_sorted(v, 1.0), 5.0);
    EXPECT_EQ(hpd_sorted({0, 1, 1.1, 1.2, 5}, 0.6), (std::pair<double, double>{1, 1.2}));
}

TEST(Hpd, MatchesBetaGridOracle) {
    auto s = summarize(sample(two_cell(39, 19, 1.0), config(1, 200000, 3)), McConfig{});
    const auto [lo, hi] = beta_hpd_oracle(40, 20, 0.95);
    EXPECT_NEAR(s.cells[0].hpd[0].first, lo, 0.005);
    EXPECT_NEAR(s.cells[0].hpd[0].second, hi, 0.005);
}

TEST(Hpd, WithinRangeAndNoWiderThanCentral) {
    std::mt19937_64 rng(50);
    for (int t = 0; t < 10; ++t) {
        DirichletPosterior p{{"a", "b", "c"}, {rng() % 30, rng() % 30, rng() % 30}, {1, 1, 1}};
        const auto draws = sample(p, config(2, 4000, rng()));
        const auto s = summarize(draws, McConfig{});
        for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t c = 0; c < 2; ++c) {
                std::vector<double> v;
                for (std::size_t i = 0; i < draws.samples; ++i) v.push_back(draws.at(c, i, k));
                std::sort(v.begin(), v.end());
                const auto [lo, hi] = s.cells[k].hpd[c];
                EXPECT_GE(lo, v.front());
                EXPECT_LE(hi, v.back());
                EXPECT_LE(hi - lo, quantile_sorted(v, 0.975) - quantile_sorted(v, 0.025) + 1e-3);
            }
        }
    }
}

TEST(Summarize, PerChainMeansConsistent) {
    DirichletPosterior p{{"a", "b", "c"}, {12, 30, 7}, {0.5, 0.5, 0.5}};
    McConfig cfg = config(4, 5000, 11);
    const auto draws = sample(p, cfg);
    const auto s = summarize(draws, cfg);
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t c = 0; c < 4; ++c) {
            double m = 0.0;
            for (std::size_t i = 0; i < draws.samples; ++i) m += draws.at(c, i, k);
            m /= static_cast<double>(draws.samples);
            EXPECT_LT(std::abs(m - s.cells[k].mean), 5 * s.cells[k].naive_se * std::sqrt(4.0));
        }
}

TEST(FormatSummary, Layout) {
    auto cfg = config(2, 100, 5);
    auto s = summarize(sample(two_cell(5, 5, 1.0), cfg), cfg);
    const auto text = format_summary(s, {"A=0", "A=1"});
    EXPECT_NE(text.find("Iterations = 1:100\nThinning interval = 1\nNumber of chains = 2\nSample size per chain = 100\n"),
              std::string::npos)
        << text;
    EXPECT_NE(text.find("1. Empirical mean and standard deviation for each variable,"), std::string::npos);
    EXPECT_NE(text.find("2. Quantiles for each variable:"), std::string::npos);
    EXPECT_NE(text.find("[[2]]"), std::string::npos);
    EXPECT_NE(text.find("attr(,\"Probability\")\n[1] 0.95"), std::string::npos);
    EXPECT_NE(text.find("pi.2"), std::string::npos);
    EXPECT_NE(text.find("A=1"), std::string::npos);
    EXPECT_EQ(format_summary(s, {"A=0", "A=1"}), text);
}
