#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "bnkit/dataset.hpp"
#include "bnkit/error.hpp"
#include "support.hpp"

using namespace bnkit;
using namespace testsupport;

namespace {

Dataset small() {
    return Dataset({{"A", "a", {"1", "2"}}, {"B", "b", {"0", "1"}}}, {{0, 0, 1}, {0, 1, 1}});
}

}  // namespace

TEST(Dataset, Validation) {
    EXPECT_THROW(Dataset({{"A", "a", {"x"}}, {"A", "a", {"x"}}}, {{0}, {0}}), CodeCollision);
    EXPECT_THROW(Dataset({{"A", "a", {"x"}}, {"B", "b", {"x"}}}, {{0}, {0, 0}}), RaggedRow);
    EXPECT_THROW(Dataset({{"A", "a", {"x"}}}, {{1}}), UnknownLabel);
    EXPECT_THROW(Dataset({{"A", "a", {}}}, {{}}), FormatError);
    EXPECT_THROW(Dataset({{"A", "a", {"x", "x"}}}, {{}}), FormatError);
    EXPECT_NO_THROW(Dataset({{"A", "a", {"x"}}}, {{kMissing}}));
}

TEST(Dataset, RequireCompleteNamesColumns) {
    Dataset d({{"A", "a", {"x"}}, {"B", "b", {"x"}}, {"C", "c", {"x"}}}, {{0, 0}, {kMissing, 0}, {0, kMissing}});
    EXPECT_EQ(d.incomplete_variables(), (std::vector<NodeId>{"B", "C"}));
    try {
        d.require_complete();
        FAIL();
    } catch (const MissingData& e) {
        EXPECT_NE(std::string(e.what()).find("B"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("C"), std::string::npos);
    }
}

TEST(MergeLevels, Examples) {
    Dataset d({{"X", "x", {"1", "2", "3", "4", "5"}}}, {{0, 3, kMissing, 4}});
    LevelMapping m{{"1", "low"}, {"2", "low"}, {"3", "mid"}, {"4", "high"}, {"5", "high"}};
    auto out = merge_levels(d, "X", m);
    EXPECT_EQ(out.schema(0).levels, (std::vector<std::string>{"low", "mid", "high"}));
    EXPECT_EQ(out.column(0), (std::vector<Level>{0, 2, kMissing, 2}));
    LevelMapping id{{"1", "1"}, {"2", "2"}, {"3", "3"}, {"4", "4"}, {"5", "5"}};
    EXPECT_EQ(merge_levels(d, "X", id), d);
    m.erase("5");
    EXPECT_THROW(merge_levels(d, "X", m), PartialMapping);
    EXPECT_THROW(merge_levels(d, "Q", id), UnknownNode);
}

TEST(FuseVariables, BooleanProduct) {
    Dataset d({{"P", "p", {"vero", "falso"}}, {"Q", "q", {"vero", "falso"}}, {"R", "r", {"x"}}},
              {{0, 1, kMissing}, {1, 1, 0}, {0, 0, 0}});
    auto out = fuse_variables(d, "P", "Q", "PQ", [](const std::string& a, const std::string& b) { return a + "/" + b; });
    EXPECT_EQ(out.codes(), (std::vector<NodeId>{"PQ", "R"}));
    EXPECT_EQ(out.schema(0).levels, (std::vector<std::string>{"vero/vero", "vero/falso", "falso/vero", "falso/falso"}));
    EXPECT_EQ(out.column(0), (std::vector<Level>{1, 3, kMissing}));
}

TEST(FuseVariables, AgeConcordance) {
    const std::vector<std::string> ages{"<50", ">=50", "non so"};
    Dataset d({{"M", "m", ages}, {"F", "f", ages}}, {{0, 1, 2, 0}, {0, 0, 1, 1}});
    auto combine = [](const std::string& a, const std::string& b) {
        if (a == "non so" || b == "non so") return std::string("non so");
        if (a != b) return std::string("discordi");
        return a == "<50" ? std::string("entrambi<50") : std::string("entrambi>=50");
    };
    auto out = fuse_variables(d, "M", "F", "ETA", combine);
    EXPECT_EQ(out.schema(0).levels, (std::vector<std::string>{"entrambi<50", "discordi", "non so", "entrambi>=50"}));
    EXPECT_EQ(out.column(0), (std::vector<Level>{0, 1, 2, 1}));
}

TEST(FuseVariables, ConstantCombineAndErrors) {
    auto d = small();
    auto out = fuse_variables(d, "A", "B", "AB", [](const std::string&, const std::string&) { return "x"; });
    EXPECT_EQ(out.schema(0).levels, (std::vector<std::string>{"x"}));
    auto concat = [](const std::string& a, const std::string& b) { return a + b; };
    EXPECT_THROW(fuse_variables(d, "A", "Q", "AB", concat), UnknownNode);
    Dataset three({{"A", "a", {"1"}}, {"B", "b", {"1"}}, {"C", "c", {"1"}}}, {{0}, {0}, {0}});
    EXPECT_THROW(fuse_variables(three, "A", "B", "C", concat), CodeCollision);
}

TEST(FuseVariables, CompositionWithMerge) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) EXPECT_TRUE(fuse_merge_law_holds(random_pair_table(rng, 1 + rng() % 40)));
}

TEST(CascadeImpute, Rules) {
    Dataset d({{"G", "gate", {"yes", "no"}}, {"T", "target", {"yes", "no"}}},
              {{1, 0, 1, 1}, {kMissing, kMissing, 0, kMissing}});
    const std::vector<ImputeTarget> targets{{"T", "no"}};
    auto out = cascade_impute(d, "G", "no", targets);
    EXPECT_EQ(out.column(1), (std::vector<Level>{1, kMissing, 0, 1}));
    EXPECT_EQ(d.column(1)[0], kMissing);
    const std::vector<ImputeTarget> bad{{"T", "maybe"}};
    EXPECT_THROW(cascade_impute(d, "G", "no", bad), UnknownLabel);
    EXPECT_THROW(cascade_impute(d, "Q", "no", targets), UnknownNode);
}

TEST(Discretize, Bins) {
    const std::vector<double> cuts{18.5, 25, 30};
    const std::vector<double> raw{21.0, 25.0, 10.0, 45.0, std::numeric_limits<double>::quiet_NaN(), 18.5};
    auto col = discretize(raw, cuts, {"under", "normal", "over", "obese"});
    EXPECT_EQ(col.cells, (std::vector<Level>{1, 1, 0, 3, kMissing, 0}));
    EXPECT_THROW(discretize(raw, cuts, {"a", "b"}), BadCuts);
    const std::vector<double> unsorted{2, 1};
    EXPECT_THROW(discretize(raw, unsorted, {"a", "b", "c"}), BadCuts);
}

TEST(DropIncomplete, Rows) {
    Dataset d({{"A", "a", {"x", "y"}}}, {{0, kMissing, 1}});
    EXPECT_EQ(drop_incomplete(d).rows(), 2u);
    EXPECT_EQ(drop_incomplete(small()), small());
    Dataset all({{"A", "a", {"x"}}}, {{kMissing, kMissing}});
    EXPECT_EQ(drop_incomplete(all).rows(), 0u);
}

TEST(FilterAndDrop, Basics) {
    auto d = small();
    const std::vector<std::string> keep{"1"};
    EXPECT_EQ(filter_rows(d, "B", keep).rows(), 2u);
    const std::vector<NodeId> codes{"A"};
    EXPECT_EQ(drop_variables(d, codes).codes(), (std::vector<NodeId>{"B"}));
}

TEST(FamilyCounts, Tally) {
    auto d = small();
    const std::vector<NodeId> parents{"A"};
    auto c = family_counts(d, "B", parents);
    EXPECT_EQ(c.q, 2u);
    EXPECT_EQ(c.r, 2u);
    EXPECT_EQ(c.n_ijk, (std::vector<std::uint64_t>{1, 1, 0, 1}));
    EXPECT_EQ(c.n_ij, (std::vector<std::uint64_t>{2, 1}));
    auto root = family_counts(d, "B", std::span<const NodeId>{});
    EXPECT_EQ(root.q, 1u);
    EXPECT_EQ(root.n_ijk, (std::vector<std::uint64_t>{1, 2}));
    const std::vector<NodeId> self{"B"};
    EXPECT_THROW(family_counts(d, "B", self), OverlapError);
    Dataset m({{"A", "a", {"x"}}}, {{kMissing}});
    EXPECT_THROW(family_counts(m, "A", std::span<const NodeId>{}), MissingData);
}

TEST(FamilyCounts, MixedRadixAndPermutationInvariance) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 30; ++t) {
        auto d = random_dataset(rng, {"A", "B", "C"}, {2, 3, 3}, 200);
        const std::vector<NodeId> parents{"C", "A"};
        auto c = family_counts(d, "B", parents);
        EXPECT_EQ(c.total(), 200u);
        std::vector<std::uint64_t> oracle(c.q * c.r, 0);
        for (std::size_t r = 0; r < d.rows(); ++r) {
            const auto j = static_cast<std::size_t>(d.at(r, 2)) * 2 + static_cast<std::size_t>(d.at(r, 0));
            ++oracle[j * 3 + static_cast<std::size_t>(d.at(r, 1))];
        }
        EXPECT_EQ(c.n_ijk, oracle);
        std::vector<std::size_t> perm(d.rows());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        EXPECT_EQ(family_counts(d.select_rows(perm), "B", parents).n_ijk, c.n_ijk);
    }
}

TEST(Preprocessing, OperationsArePure) {
    std::mt19937_64 rng(4);
    auto d = random_pair_table(rng, 30);
    const auto copy = d;
    merge_levels(d, "C", {{"0", "z"}, {"1", "z"}});
    fuse_variables(d, "A", "B", "F", symmetric_combine);
    const std::vector<ImputeTarget> targets{{"A", "0"}};
    cascade_impute(d, "C", "0", targets);
    drop_incomplete(d);
    EXPECT_EQ(d, copy);
}
