#include "bnkit/search.hpp"

#include <algorithm>
#include <cmath>
#include <ranges>
#include <sstream>

#include "bnkit/error.hpp"
#include "bnkit/format.hpp"

namespace bnkit {

void ArcConstraints::validate(const std::vector<NodeId>& nodes) const {
    auto known = [&](const NodeId& n) {
        if (std::find(nodes.begin(), nodes.end(), n) == nodes.end())
            throw UnknownNode("constraint refers to unknown node '" + n + "'");
    };
    for (const auto& [from, to] : blacklist) {
        known(from);
        known(to);
    }
    std::vector<Arc> white;
    for (const auto& [from, to] : whitelist) {
        known(from);
        known(to);
        if (blacklist.count({from, to}))
            throw ConstraintViolation("arc " + from + " -> " + to + " is both blacklisted and whitelisted");
        white.push_back({from, to});
    }
    try {
        Dag check(nodes, white);
    } catch (const CycleError&) {
        throw ConstraintViolation("whitelisted arcs form a directed cycle");
    }
}

void ArcConstraints::forbid_parents(const std::vector<NodeId>& nodes, const NodeId& node,
                                    const std::vector<NodeId>& allowed_parents) {
    for (const auto& from : nodes) {
        if (from == node) continue;
        if (std::find(allowed_parents.begin(), allowed_parents.end(), from) != allowed_parents.end()) continue;
        blacklist.insert({from, node});
    }
}

bool satisfies(const Dag& g, const ArcConstraints& c) {
    for (const auto& [from, to] : c.blacklist)
        if (g.contains(from) && g.contains(to) && g.has_arc(g.index_of(from), g.index_of(to))) return false;
    for (const auto& [from, to] : c.whitelist)
        if (!g.contains(from) || !g.contains(to) || !g.has_arc(g.index_of(from), g.index_of(to))) return false;
    return true;
}

std::string to_string(MoveKind kind) {
    switch (kind) {
        case MoveKind::Add: return "add";
        case MoveKind::Delete: return "delete";
        case MoveKind::Reverse: return "reverse";
    }
    return "?";
}

Dag apply(const Dag& g, const Move& m) {
    switch (m.kind) {
        case MoveKind::Add: return g.add_arc(m.from, m.to);
        case MoveKind::Delete: return g.remove_arc(m.from, m.to);
        case MoveKind::Reverse: return g.reverse_arc(m.from, m.to);
    }
    return g;
}

namespace {

constexpr double kTieTolerance = 1e-9;

struct IndexMove {
    MoveKind kind;
    std::size_t from;
    std::size_t to;
};

struct ArcMask {
    std::size_t n = 0;
    std::vector<char> black;
    std::vector<char> white;

    ArcMask(const Dag& g, const ArcConstraints& c) : n(g.size()), black(n * n, 0), white(n * n, 0) {
        for (const auto& [from, to] : c.blacklist) black[g.index_of(from) * n + g.index_of(to)] = 1;
        for (const auto& [from, to] : c.whitelist) white[g.index_of(from) * n + g.index_of(to)] = 1;
    }
    bool blacklisted(std::size_t from, std::size_t to) const { return black[from * n + to]; }
    bool whitelisted(std::size_t from, std::size_t to) const { return white[from * n + to]; }
};

// reach[a * n + b] != 0 iff a directed path a -> ... -> b exists (a reaches itself).
std::vector<char> reachability(const Dag& g) {
    const auto n = g.size();
    std::vector<char> reach(n * n, 0);
    const auto order = topological_indices(g);
    for (auto v : order | std::views::reverse) {
        reach[v * n + v] = 1;
        for (auto c : g.children(v))
            for (std::size_t w = 0; w < n; ++w)
                if (reach[c * n + w]) reach[v * n + w] = 1;
    }
    return reach;
}

std::vector<IndexMove> enumerate_moves(const Dag& g, const ArcMask& mask) {
    const auto n = g.size();
    const auto reach = reachability(g);
    std::vector<IndexMove> moves;
    for (std::size_t from = 0; from < n; ++from)
        for (std::size_t to = 0; to < n; ++to) {
            if (from == to || g.has_arc(from, to) || mask.blacklisted(from, to)) continue;
            if (reach[to * n + from]) continue;
            moves.push_back({MoveKind::Add, from, to});
        }
    for (std::size_t from = 0; from < n; ++from)
        for (auto to : g.children(from))
            if (!mask.whitelisted(from, to)) moves.push_back({MoveKind::Delete, from, to});
    for (std::size_t from = 0; from < n; ++from)
        for (auto to : g.children(from)) {
            if (mask.whitelisted(from, to) || mask.blacklisted(to, from)) continue;
            // Reversal is acyclic iff no other directed path from -> to exists.
            bool other_path = false;
            for (auto c : g.children(from))
                if (c != to && reach[c * n + to]) {
                    other_path = true;
                    break;
                }
            if (!other_path) moves.push_back({MoveKind::Reverse, from, to});
        }
    return moves;
}

void check_constraints(const Dag& g, const ArcConstraints& c) {
    c.validate(g.nodes());
    if (!satisfies(g, c)) throw ConstraintViolation("graph violates the arc constraints");
}

}  // namespace

std::vector<Move> legal_moves(const Dag& g, const ArcConstraints& c) {
    check_constraints(g, c);
    std::vector<Move> out;
    for (const auto& m : enumerate_moves(g, ArcMask(g, c))) out.push_back({m.kind, g.name(m.from), g.name(m.to)});
    return out;
}

SearchReport hill_climb(const Dataset& d, const ScoreSpec& spec, const ArcConstraints& c,
                        const SearchOptions& options) {
    validate(spec);
    if (!(options.eps > 0.0)) throw ConstraintViolation("eps must be positive");
    d.require_complete();

    auto nodes = d.codes();
    std::sort(nodes.begin(), nodes.end());
    c.validate(nodes);
    Dag g;
    if (options.start) {
        g = *options.start;
        if (g.nodes() != nodes) throw NodeSetMismatch("start graph nodes differ from dataset variables");
    } else {
        std::vector<Arc> white;
        for (const auto& [from, to] : c.whitelist) white.push_back({from, to});
        g = Dag(nodes, white);
    }
    check_constraints(g, c);

    const ArcMask mask(g, c);
    std::vector<std::size_t> column(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) column[v] = d.index_of(g.name(v));

    ScoreCache cache(d, spec, options.use_cache);
    std::vector<std::size_t> scratch;
    auto family = [&](std::size_t v, const std::vector<std::size_t>& parents, std::ptrdiff_t drop,
                      std::ptrdiff_t add) {
        scratch.clear();
        for (auto p : parents)
            if (static_cast<std::ptrdiff_t>(p) != drop) scratch.push_back(column[p]);
        if (add >= 0) scratch.push_back(column[static_cast<std::size_t>(add)]);
        return cache.family(column[v], scratch);
    };

    std::vector<double> current(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) current[v] = family(v, g.parents(v), -1, -1);

    SearchReport rep;
    rep.sample_size = d.rows();
    while (rep.iterations < options.max_iter) {
        const auto moves = enumerate_moves(g, mask);
        double best_delta = -std::numeric_limits<double>::infinity();
        const IndexMove* best = nullptr;
        double best_to = 0.0, best_from = 0.0;
        for (const auto& m : moves) {
            const auto from = static_cast<std::ptrdiff_t>(m.from);
            double new_to = 0.0, new_from = 0.0, delta = 0.0;
            switch (m.kind) {
                case MoveKind::Add:
                    new_to = family(m.to, g.parents(m.to), -1, from);
                    delta = new_to - current[m.to];
                    break;
                case MoveKind::Delete:
                    new_to = family(m.to, g.parents(m.to), from, -1);
                    delta = new_to - current[m.to];
                    break;
                case MoveKind::Reverse:
                    new_to = family(m.to, g.parents(m.to), from, -1);
                    new_from = family(m.from, g.parents(m.from), -1, static_cast<std::ptrdiff_t>(m.to));
                    delta = (new_to - current[m.to]) + (new_from - current[m.from]);
                    break;
            }
            if (best == nullptr || delta > best_delta + kTieTolerance * std::max(1.0, std::abs(best_delta))) {
                best_delta = delta;
                best = &m;
                best_to = new_to;
                best_from = new_from;
            }
        }
        if (best == nullptr || !(best_delta > options.eps)) break;

        switch (best->kind) {
            case MoveKind::Add: g = g.add_arc(best->from, best->to); break;
            case MoveKind::Delete: g = g.remove_arc(best->from, best->to); break;
            case MoveKind::Reverse:
                g = g.reverse_arc(best->from, best->to);
                current[best->from] = best_from;
                break;
        }
        current[best->to] = best_to;
        rep.trace.push_back({{best->kind, g.name(best->from), g.name(best->to)}, best_delta});
        ++rep.iterations;
    }

    rep.final = g;
    rep.score = 0.0;
    for (double s : current) rep.score += s;
    rep.cache_hits = cache.hits();
    rep.cache_misses = cache.misses();
    rep.score_calls = cache.calls();
    return rep;
}

std::string report(const SearchReport& r, const ScoreSpec& spec) {
    const auto summary = summarize_graph(r.final);
    std::ostringstream os;
    os << "model:\n";
    os << "  " << format_model_string(r.final) << "\n";
    os << "nodes: " << summary.node_count << "\n";
    os << "arcs: " << summary.arc_count << "\n";
    os << "  undirected arcs: 0\n";
    os << "  directed arcs: " << summary.arc_count << "\n";
    os << "average markov blanket size: " << format_fixed(summary.avg_markov_blanket, 2) << "\n";
    os << "average neighbourhood size: " << format_fixed(summary.avg_neighbourhood, 2) << "\n";
    os << "average branching factor: " << format_fixed(summary.avg_branching_factor, 2) << "\n";
    os << "\n";
    os << "learning algorithm: Hill-Climbing\n";
    switch (spec.kind) {
        case ScoreKind::BIC:
            os << "score: BIC (disc.)\n";
            os << "penalization coefficient: " << format_trimmed(penalty_coefficient(spec.kind, r.sample_size), 5)
               << "\n";
            break;
        case ScoreKind::AIC:
            os << "score: AIC (disc.)\n";
            os << "penalization coefficient: " << format_trimmed(penalty_coefficient(spec.kind, r.sample_size), 5)
               << "\n";
            break;
        case ScoreKind::BDEU:
            os << "score: Bayesian Dirichlet (BDe)\n";
            os << "graph prior: Uniform\n";
            os << "imaginary sample size: " << format_trimmed(spec.iss, 5) << "\n";
            break;
    }
    os << "tests used in the learning procedure: " << r.score_calls << "\n";
    os << "optimized: TRUE\n";
    return os.str();
}

}  // namespace bnkit
