// Shared generators and brute-force oracles for the test programs.
#ifndef BNKIT_TESTS_SUPPORT_HPP
#define BNKIT_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bnkit/dataset.hpp"
#include "bnkit/graph.hpp"
#include "bnkit/inference.hpp"
#include "bnkit/params.hpp"

namespace testsupport {

using namespace bnkit;

inline std::string data_file(const std::string& name) {
    std::ifstream in(std::string(BNKIT_TEST_DATA) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<NodeId> node_names(std::size_t n) {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('A' + i)));
    return out;
}

// Arcs only go forward in a random permutation, so the result is acyclic.
inline Dag random_dag(std::mt19937_64& rng, std::size_t n, double p_arc) {
    auto names = node_names(n);
    auto order = names;
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution coin(p_arc);
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng)) arcs.push_back({order[i], order[j]});
    return Dag(names, arcs);
}

// Every DAG over the given nodes: each unordered pair is absent, forward or backward.
inline std::vector<Dag> all_dags(const std::vector<NodeId>& nodes) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) pairs.emplace_back(i, j);
    std::size_t total = 1;
    for (std::size_t p = 0; p < pairs.size(); ++p) total *= 3;
    std::vector<Dag> out;
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<Arc> arcs;
        std::size_t c = code;
        for (auto [i, j] : pairs) {
            const auto t = c % 3;
            c /= 3;
            if (t == 1) arcs.push_back({nodes[i], nodes[j]});
            if (t == 2) arcs.push_back({nodes[j], nodes[i]});
        }
        try {
            out.emplace_back(nodes, arcs);
        } catch (const std::exception&) {
        }
    }
    return out;
}

inline std::vector<double> random_row(std::mt19937_64& rng, std::size_t r, double floor = 0.05) {
    std::uniform_real_distribution<double> u(floor, 1.0);
    std::vector<double> row(r);
    double s = 0.0;
    for (auto& v : row) s += v = u(rng);
    for (auto& v : row) v /= s;
    return row;
}

inline std::vector<VariableSchema> schemas_for(const std::vector<NodeId>& names, const std::vector<std::size_t>& cards) {
    std::vector<VariableSchema> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        VariableSchema s{names[i], names[i], {}};
        for (std::size_t k = 0; k < cards[i]; ++k) s.levels.push_back(std::to_string(k));
        out.push_back(std::move(s));
    }
    return out;
}

// Strictly positive CPTs.
inline Network random_network(std::mt19937_64& rng, const Dag& g, const std::vector<std::size_t>& cards,
                              double floor = 0.05) {
    auto schemas = schemas_for(g.nodes(), cards);
    std::vector<Cpt> cpts;
    for (std::size_t v = 0; v < g.size(); ++v) {
        Cpt c;
        c.child = g.name(v);
        c.parents = g.parent_names(c.child);
        c.r = cards[v];
        std::size_t q = 1;
        for (auto p : g.parents(v)) q *= cards[p];
        for (std::size_t j = 0; j < q; ++j) {
            auto row = random_row(rng, c.r, floor);
            c.table.insert(c.table.end(), row.begin(), row.end());
        }
        cpts.push_back(std::move(c));
    }
    return Network(g, std::move(schemas), std::move(cpts));
}

// Forward sampling in topological order.
inline Dataset sample_dataset(std::mt19937_64& rng, const Network& net, std::size_t n) {
    const auto& g = net.dag();
    const auto order = topological_indices(g);
    std::vector<std::vector<Level>> columns(g.size(), std::vector<Level>(n));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t row = 0; row < n; ++row) {
        for (auto v : order) {
            const auto& cpt = net.cpt(v);
            std::size_t j = 0;
            for (auto p : g.parents(v)) j = j * net.cardinality(p) + static_cast<std::size_t>(columns[p][row]);
            double x = u(rng);
            std::size_t k = 0;
            while (k + 1 < cpt.r && x >= cpt.prob(j, k)) x -= cpt.prob(j, k++);
            columns[v][row] = static_cast<Level>(k);
        }
    }
    return Dataset(net.schemas(), std::move(columns));
}

inline Dataset random_dataset(std::mt19937_64& rng, const std::vector<NodeId>& names,
                              const std::vector<std::size_t>& cards, std::size_t n) {
    std::vector<std::vector<Level>> columns;
    for (auto c : cards) {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(c) - 1);
        std::vector<Level> col(n);
        for (auto& v : col) v = pick(rng);
        columns.push_back(std::move(col));
    }
    return Dataset(schemas_for(names, cards), std::move(columns));
}

// Path-enumeration d-separation: every simple path in the skeleton between
// x and y must contain a blocked interior node.
inline bool dsep_oracle(const Dag& g, const std::set<std::size_t>& x, const std::set<std::size_t>& y,
                        const std::set<std::size_t>& z) {
    const auto n = g.size();
    std::vector<std::set<std::size_t>> descendants(n);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t w = 0; w < n; ++w)
            if (g.reaches(v, w)) descendants[v].insert(w);
    auto blocked_at = [&](std::size_t prev, std::size_t mid, std::size_t next) {
        const bool collider = g.has_arc(prev, mid) && g.has_arc(next, mid);
        if (!collider) return z.count(mid) > 0;
        for (auto d : descendants[mid])
            if (z.count(d)) return false;
        return true;
    };
    std::vector<std::size_t> path;
    std::vector<char> on_path(n, 0);
    bool connected = false;
    std::function<void(std::size_t)> walk = [&](std::size_t v) {
        if (connected) return;
        if (path.size() > 1 && y.count(v)) {
            connected = true;
            return;
        }
        for (std::size_t w = 0; w < n; ++w) {
            if (on_path[w] || !(g.has_arc(v, w) || g.has_arc(w, v))) continue;
            if (path.size() >= 2 && blocked_at(path[path.size() - 2], v, w)) continue;
            if (x.count(w)) continue;
            path.push_back(w);
            on_path[w] = 1;
            walk(w);
            on_path[w] = 0;
            path.pop_back();
        }
    };
    for (auto s : x) {
        path = {s};
        std::fill(on_path.begin(), on_path.end(), 0);
        on_path[s] = 1;
        walk(s);
        if (connected) return false;
    }
    return true;
}

// P(targets | ev) by summing cells of a full joint whose scope is in node order.
inline Factor condition_joint(const Factor& joint, const std::vector<NodeId>& targets, const Evidence& ev) {
    const auto& scope = joint.scope();
    std::vector<std::size_t> pos;
    std::vector<std::size_t> cards;
    for (const auto& t : targets) {
        auto it = std::find(scope.begin(), scope.end(), t);
        pos.push_back(static_cast<std::size_t>(it - scope.begin()));
        cards.push_back(joint.cards()[pos.back()]);
    }
    std::size_t out_size = 1;
    for (auto c : cards) out_size *= c;
    std::vector<double> values(out_size, 0.0);
    std::vector<std::size_t> idx(scope.size(), 0);
    for (std::size_t cell = 0; cell < joint.size(); ++cell) {
        bool match = true;
        for (const auto& [var, level] : ev) {
            auto it = std::find(scope.begin(), scope.end(), var);
            match = match && idx[static_cast<std::size_t>(it - scope.begin())] == level;
        }
        if (match) {
            std::size_t o = 0;
            for (std::size_t t = 0; t < pos.size(); ++t) o = o * cards[t] + idx[pos[t]];
            values[o] += joint.values()[cell];
        }
        for (std::size_t d = scope.size(); d-- > 0;) {
            if (++idx[d] < joint.cards()[d]) break;
            idx[d] = 0;
        }
    }
    double total = 0.0;
    for (double v : values) total += v;
    for (auto& v : values) v /= total;
    return Factor(targets, cards, values);
}

inline std::set<std::size_t> bits_to_set(unsigned mask) {
    std::set<std::size_t> out;
    for (std::size_t i = 0; i < 32; ++i)
        if (mask & (1u << i)) out.insert(i);
    return out;
}

inline std::vector<NodeId> names_of(const Dag& g, const std::set<std::size_t>& s) {
    std::vector<NodeId> out;
    for (auto v : s) out.push_back(g.name(v));
    return out;
}

// Random table with missing cells over variables A and B (plus a bystander C).
inline Dataset random_pair_table(std::mt19937_64& rng, std::size_t rows) {
    const std::size_t ra = 2 + rng() % 3, rb = 2 + rng() % 3;
    auto schemas = schemas_for({"A", "B", "C"}, {ra, rb, 2});
    std::vector<std::vector<Level>> columns(3, std::vector<Level>(rows));
    std::bernoulli_distribution missing(0.1);
    for (std::size_t j = 0; j < 3; ++j)
        for (auto& v : columns[j])
            v = missing(rng) ? kMissing : static_cast<Level>(rng() % schemas[j].cardinality());
    return Dataset(std::move(schemas), std::move(columns));
}

inline std::string symmetric_combine(const std::string& a, const std::string& b) {
    return a == b ? "both" + a : "discordant";
}

// Fuse by concatenation and then merge with the symmetric map, against a direct symmetric fuse.
inline bool fuse_merge_law_holds(const Dataset& d) {
    auto concat = [](const std::string& a, const std::string& b) { return a + "/" + b; };
    auto fused = fuse_variables(d, "A", "B", "F", concat);
    LevelMapping sym;
    for (const auto& la : d.schema(d.index_of("A")).levels)
        for (const auto& lb : d.schema(d.index_of("B")).levels) sym[concat(la, lb)] = symmetric_combine(la, lb);
    auto two_step = merge_levels(fused, "F", sym);
    auto direct = fuse_variables(d, "A", "B", "F", symmetric_combine);
    return two_step == direct;
}

}  // namespace testsupport

#endif  // BNKIT_TESTS_SUPPORT_HPP
