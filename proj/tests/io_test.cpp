#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bnkit/error.hpp"
#include "bnkit/io.hpp"
#include "bnkit/pipeline.hpp"
#include "bnkit/search.hpp"
#include "support.hpp"

using namespace bnkit;
using namespace testsupport;

namespace {

CsvTable csv(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

const std::vector<VariableSchema> kAB{{"A", "a", {"1", "2"}}, {"B", "b", {"0", "1"}}};

}  // namespace

TEST(Csv, Parse) {
    auto t = csv("A,B\n\"x,y\",\"he said \"\"hi\"\"\"\n\n\"multi\nline\",z\n");
    EXPECT_EQ(t.header, (std::vector<std::string>{"A", "B"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][0], "x,y");
    EXPECT_EQ(t.rows[0][1], "he said \"hi\"");
    EXPECT_EQ(t.rows[1][0], "multi\nline");
    EXPECT_THROW(csv("A,B\n1\n"), RaggedRow);
    EXPECT_THROW(csv("A\n\"open\n"), FormatError);
    std::ostringstream out;
    write_csv(out, t);
    EXPECT_EQ(csv(out.str()).rows, t.rows);
}

TEST(Csv, ToDataset) {
    auto d = dataset_from_csv(csv("A,B\n2,0\n2,NA\n1,\n"), kAB);
    EXPECT_EQ(d.column(0), (std::vector<Level>{1, 1, 0}));
    EXPECT_EQ(d.column(1), (std::vector<Level>{0, kMissing, kMissing}));
    try {
        dataset_from_csv(csv("A,B\n2,0\n3,0\n"), kAB);
        FAIL();
    } catch (const UnknownLabel& e) {
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
    }
    EXPECT_THROW(dataset_from_csv(csv("A\n1\n"), kAB), MissingColumn);
    EXPECT_EQ(dataset_from_csv(dataset_to_csv(d), kAB), d);
}

TEST(Schema, RoundTrip) {
    const std::string text =
        R"({"variables":[{"code":"A","name":"alpha","levels":["x","y"]},{"code":"BMI","numeric":true}]})";
    auto s = parse_schema(text);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_TRUE(s[1].numeric);
    EXPECT_EQ(s[0].schema.levels, (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(parse_schema(schema_to_json(s)), s);
    EXPECT_THROW(parse_schema("{\"variables\": 3}"), FormatError);
    EXPECT_THROW(parse_schema("not json"), FormatError);
}

TEST(NetworkJson, RoundTripPreservesQueries) {
    std::mt19937_64 rng(60);
    auto g = random_dag(rng, 6, 0.5);
    auto net = random_network(rng, g, {2, 3, 2, 2, 3, 2});
    ArcConstraints c;
    c.blacklist.insert({"B", "A"});
    NetworkDocument doc{net, {"BIC", 0.0, 500, constraints_digest(c), "0.1.0", "mle", 0.0},
                        SearchRecord{-12.5, 1, 10, 4, 6, {{{MoveKind::Add, "A", "B"}, 3.25}}}};
    auto back = network_from_json(network_to_json(doc));
    EXPECT_EQ(back.network, net);
    EXPECT_EQ(back.provenance, doc.provenance);
    ASSERT_TRUE(back.search.has_value());
    EXPECT_EQ(back.search->trace[0].move, (Move{MoveKind::Add, "A", "B"}));
    EXPECT_EQ(network_to_json(back), network_to_json(doc));

    for (int t = 0; t < 100; ++t) {
        auto names = g.nodes();
        std::shuffle(names.begin(), names.end(), rng);
        std::vector<NodeId> targets{names[0]};
        Evidence ev;
        for (std::size_t i = 1; i < names.size(); ++i)
            if (rng() % 3 == 0) ev[names[i]] = rng() % net.schema(names[i]).cardinality();
        EXPECT_EQ(query(back.network, targets, ev).values(), query(net, targets, ev).values());
    }
}

TEST(NetworkJson, Errors) {
    EXPECT_THROW(network_from_json("{}"), FormatError);
    EXPECT_THROW(network_from_json("[1,2"), FormatError);
    EXPECT_THROW(load_network("/nonexistent/net.json"), FormatError);
}

TEST(ConstraintsDigest, StableAndSensitive) {
    ArcConstraints a, b;
    a.blacklist.insert({"A", "B"});
    b.whitelist.insert({"A", "B"});
    EXPECT_EQ(constraints_digest(a).size(), 16u);
    EXPECT_EQ(constraints_digest(a), constraints_digest(a));
    EXPECT_NE(constraints_digest(a), constraints_digest(b));
}

TEST(Pipeline, RunsStepsInOrder) {
    auto t = csv("G,T,BMI,X\nno,NA,21,1\nyes,NA,31,2\nyes,yes,NA,1\nno,no,17,2\n");
    std::vector<SchemaEntry> schema{{{"G", "gate", {"yes", "no"}}, false},
                                    {{"T", "target", {"yes", "no"}}, false},
                                    {{"BMI", "bmi", {}}, true},
                                    {{"X", "x", {"1", "2"}}, false}};
    auto w = make_workbench(t, schema);
    auto steps = parse_pipeline(R"({"steps":[
        {"op":"impute","gate":"G","negative":"no","targets":[{"var":"T","fill":"no"}]},
        {"op":"discretize","source":"BMI","cuts":[18.5,25,30],"labels":["under","normal","over","obese"]},
        {"op":"merge","var":"X","mapping":{"1":"low","2":"low"}},
        {"op":"drop_incomplete"}]})");
    ASSERT_EQ(steps.size(), 4u);
    EXPECT_EQ(step_name(steps[0]), "impute");
    auto r = run_pipeline(w, steps);
    EXPECT_EQ(r.data.rows(), 2u);
    EXPECT_EQ(r.data.codes(), (std::vector<NodeId>{"G", "T", "X", "BMI"}));
    EXPECT_EQ(r.log.size(), 4u);
    EXPECT_EQ(r.log[3], "step 4 drop_incomplete: rows 4 -> 2, variables 4");
}

TEST(Pipeline, Errors) {
    try {
        parse_pipeline(R"({"steps":[{"op":"merge","var":"X","mapping":{}},{"op":"explode"}]})");
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("explode"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("step 2"), std::string::npos);
    }
    auto w = make_workbench(csv("A\nx\n"), {{{"A", "a", {"x"}}, false}});
    std::vector<PipelineStep> steps{FilterStep{"Q", {"x"}}};
    try {
        run_pipeline(w, steps);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.error_class(), ErrorClass::Usage);
        EXPECT_EQ(std::string(e.what()).rfind("step 1 (filter): ", 0), 0u);
    }
}

TEST(Pipeline, UndiscretizedNumericColumnsDropped) {
    auto w = make_workbench(csv("A,N\nx,1.5\n"), {{{"A", "a", {"x"}}, false}, {{"N", "n", {}}, true}});
    auto r = run_pipeline(w, {});
    EXPECT_EQ(r.data.codes(), (std::vector<NodeId>{"A"}));
    ASSERT_EQ(r.log.size(), 1u);
    EXPECT_NE(r.log[0].find("N"), std::string::npos);
    EXPECT_THROW(make_workbench(csv("A,N\nx,abc\n"), {{{"A", "a", {"x"}}, false}, {{"N", "n", {}}, true}}),
                 FormatError);
}
