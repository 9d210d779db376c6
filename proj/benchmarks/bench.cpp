#include <benchmark/benchmark.h>

#include <random>

#include "bnkit/inference.hpp"
#include "bnkit/posterior.hpp"
#include "bnkit/search.hpp"

using namespace bnkit;

namespace {

Network chain_network(std::size_t n) {
    std::vector<NodeId> names;
    std::vector<VariableSchema> schemas;
    std::vector<Arc> arcs;
    std::vector<Cpt> cpts;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back("V" + std::to_string(100 + i));
        schemas.push_back({names.back(), names.back(), {"0", "1"}});
        if (i == 0) {
            cpts.push_back({names.back(), {}, {}, 2, {0.4, 0.6}});
        } else {
            arcs.push_back({names[i - 1], names[i]});
            cpts.push_back({names.back(), {names[i - 1]}, {2}, 2, {0.8, 0.2, 0.3, 0.7}});
        }
    }
    return Network(Dag(names, arcs), schemas, cpts);
}

Dataset sample_chain(const Network& net, std::size_t rows) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<Level>> cols(net.size(), std::vector<Level>(rows));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t v = 0; v < net.size(); ++v) {
            const std::size_t j = v == 0 ? 0 : static_cast<std::size_t>(cols[v - 1][r]);
            cols[v][r] = u(rng) < net.cpt(v).prob(j, 0) ? 0 : 1;
        }
    return Dataset(net.schemas(), std::move(cols));
}

}  // namespace

static void BM_HillClimb(benchmark::State& state) {
    const auto net = chain_network(static_cast<std::size_t>(state.range(0)));
    const auto d = sample_chain(net, 2000);
    for (auto _ : state) benchmark::DoNotOptimize(hill_climb(d, ScoreSpec::bic(), {}));
}
BENCHMARK(BM_HillClimb)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_Query(benchmark::State& state) {
    const auto net = chain_network(static_cast<std::size_t>(state.range(0)));
    const auto& nodes = net.dag().nodes();
    const Evidence ev{{nodes.back(), 1}};
    for (auto _ : state) benchmark::DoNotOptimize(query(net, {nodes.front()}, ev));
}
BENCHMARK(BM_Query)->Arg(8)->Arg(32);

static void BM_PosteriorSample(benchmark::State& state) {
    DirichletPosterior p{{}, {120, 431, 88, 35, 260, 41, 12, 60, 9}, std::vector<double>(9, 10.0 / 27.0)};
    for (std::size_t k = 0; k < 9; ++k) p.cells.push_back("c" + std::to_string(k));
    McConfig cfg;
    cfg.samples_per_chain = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(summarize(sample(p, cfg), cfg));
}
BENCHMARK(BM_PosteriorSample)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
