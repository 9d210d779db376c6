#include <gtest/gtest.h>

#include "bnkit/error.hpp"
#include "bnkit/params.hpp"
#include "support.hpp"

using namespace bnkit;
using namespace testsupport;

namespace {

Dataset pair_data() {
    return Dataset(schemas_for({"A", "B"}, {2, 2}), {{0, 0, 1}, {0, 1, 1}});
}

}  // namespace

TEST(FitMle, Ratios) {
    auto net = fit_mle(pair_data(), parse_model_string("[A][B|A]"));
    EXPECT_EQ(net.cpt("B").table, (std::vector<double>{0.5, 0.5, 0.0, 1.0}));
    EXPECT_NEAR(net.cpt("A").prob(0, 0), 2.0 / 3.0, 1e-15);
    EXPECT_TRUE(net.diagnostics().empty());
}

TEST(FitMle, UnseenConfigurationIsUniform) {
    Dataset d(schemas_for({"A", "B"}, {3, 2}), {{0, 0, 2}, {0, 1, 1}});
    auto net = fit_mle(d, parse_model_string("[A][B|A]"));
    EXPECT_EQ(net.cpt("B").prob(1, 0), 0.5);
    EXPECT_EQ(net.cpt("B").prob(1, 1), 0.5);
    EXPECT_EQ(net.diagnostics(), (std::vector<EmptyConfiguration>{{"B", 1}}));
}

TEST(FitMle, Errors) {
    Dataset m(schemas_for({"A", "B"}, {2, 2}), {{0, kMissing}, {0, 1}});
    EXPECT_THROW(fit_mle(m, parse_model_string("[A][B|A]")), MissingData);
    EXPECT_THROW(fit_mle(pair_data(), Dag({"A", "C"})), NodeSetMismatch);
    EXPECT_THROW(fit_bayes(pair_data(), Dag({"A", "B"}), 0.0), ConstraintViolation);
}

TEST(FitBayes, ConjugateUpdate) {
    Dataset d(schemas_for({"A"}, {2}), {{0, 0, 0, 1}});
    auto net = fit_bayes(d, Dag({"A"}), 2.0);
    EXPECT_NEAR(net.cpt("A").prob(0, 0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(net.cpt("A").prob(0, 1), 1.0 / 3.0, 1e-15);

    Dataset empty(schemas_for({"A", "B"}, {2, 3}), {{}, {}});
    auto prior = fit_bayes(empty, parse_model_string("[A][B|A]"), 5.0);
    for (double p : prior.cpt("B").table) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
}

TEST(FitBayes, SmallIssApproachesMle) {
    std::mt19937_64 rng(12);
    auto d = random_dataset(rng, {"A", "B", "C"}, {2, 3, 2}, 2000);
    auto g = parse_model_string("[A][B|A][C|A:B]");
    auto mle = fit_mle(d, g);
    auto bayes = fit_bayes(d, g, 1e-8);
    for (std::size_t v = 0; v < 3; ++v)
        for (std::size_t i = 0; i < mle.cpt(v).table.size(); ++i)
            EXPECT_NEAR(bayes.cpt(v).table[i], mle.cpt(v).table[i], 1e-9);
}

TEST(Fit, RowsAreStochastic) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 30; ++t) {
        auto g = random_dag(rng, 5, 0.5);
        auto d = random_dataset(rng, g.nodes(), {2, 3, 2, 4, 2}, rng() % 60);
        for (const auto& net : {fit_mle(d, g), fit_bayes(d, g, 1 + rng() % 20)})
            for (const auto& cpt : net.cpts())
                for (std::size_t j = 0; j < cpt.q(); ++j) {
                    double s = 0.0;
                    for (double p : cpt.row(j)) s += p;
                    EXPECT_NEAR(s, 1.0, 1e-12);
                }
    }
}

TEST(Network, ValidatesPieces) {
    auto net = fit_mle(pair_data(), parse_model_string("[A][B|A]"));
    auto cpts = net.cpts();
    cpts[1].table[0] = 0.9;
    EXPECT_THROW(Network(net.dag(), net.schemas(), cpts), FormatError);
    EXPECT_THROW(Network(Dag({"A", "B"}), net.schemas(), net.cpts()), Error);
}

TEST(FormatCpt, Layout) {
    auto net = fit_mle(pair_data(), parse_model_string("[A][B|A]"));
    const auto text = format_cpt(net, "B");
    EXPECT_EQ(text, "Conditional probability table:\n\n  A\nB   0 1\n0 0.5 0\n1 0.5 1\n");
}
