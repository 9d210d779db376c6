#include "bnkit/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "bnkit/error.hpp"
#include "bnkit/format.hpp"

namespace bnkit {

Factor::Factor(std::vector<NodeId> scope, std::vector<std::size_t> cards, std::vector<double> values)
    : m_scope(std::move(scope)), m_cards(std::move(cards)), m_values(std::move(values)) {
    if (m_scope.size() != m_cards.size()) throw FormatError("factor scope and cardinalities differ in length");
    std::size_t n = 1;
    for (auto c : m_cards) n *= c;
    if (n != m_values.size()) throw FormatError("factor table size does not match its scope");
    std::set<NodeId> unique(m_scope.begin(), m_scope.end());
    if (unique.size() != m_scope.size()) throw FormatError("factor scope repeats a variable");
}

bool Factor::contains(const NodeId& var) const {
    return std::find(m_scope.begin(), m_scope.end(), var) != m_scope.end();
}

double Factor::at(std::span<const std::size_t> assignment) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < m_cards.size(); ++i) idx = idx * m_cards[i] + assignment[i];
    return m_values[idx];
}

double Factor::sum() const {
    return std::accumulate(m_values.begin(), m_values.end(), 0.0);
}

namespace {

// Stride of each variable of `f` inside its own table, or 0 for variables
// not in f, listed for the given target scope.
std::vector<std::size_t> strides_for(const Factor& f, const std::vector<NodeId>& scope) {
    std::vector<std::size_t> own(f.scope().size());
    std::size_t s = 1;
    for (std::size_t i = f.scope().size(); i-- > 0;) {
        own[i] = s;
        s *= f.cards()[i];
    }
    std::vector<std::size_t> out(scope.size(), 0);
    for (std::size_t i = 0; i < scope.size(); ++i) {
        auto it = std::find(f.scope().begin(), f.scope().end(), scope[i]);
        if (it != f.scope().end()) out[i] = own[static_cast<std::size_t>(it - f.scope().begin())];
    }
    return out;
}

}  // namespace

Factor multiply(const Factor& a, const Factor& b) {
    std::vector<NodeId> scope = a.scope();
    std::vector<std::size_t> cards = a.cards();
    for (std::size_t i = 0; i < b.scope().size(); ++i) {
        if (a.contains(b.scope()[i])) continue;
        scope.push_back(b.scope()[i]);
        cards.push_back(b.cards()[i]);
    }
    std::size_t total = 1;
    for (auto c : cards) total *= c;

    const auto sa = strides_for(a, scope);
    const auto sb = strides_for(b, scope);
    std::vector<double> values(total);
    std::vector<std::size_t> idx(scope.size(), 0);
    std::size_t ia = 0, ib = 0;
    for (std::size_t cell = 0; cell < total; ++cell) {
        values[cell] = a.values()[ia] * b.values()[ib];
        // odometer, last variable fastest
        for (std::size_t d = scope.size(); d-- > 0;) {
            if (++idx[d] < cards[d]) {
                ia += sa[d];
                ib += sb[d];
                break;
            }
            ia -= sa[d] * (cards[d] - 1);
            ib -= sb[d] * (cards[d] - 1);
            idx[d] = 0;
        }
    }
    return Factor(std::move(scope), std::move(cards), std::move(values));
}

Factor sum_out(const Factor& f, const NodeId& var) {
    auto it = std::find(f.scope().begin(), f.scope().end(), var);
    if (it == f.scope().end()) return f;
    const auto pos = static_cast<std::size_t>(it - f.scope().begin());
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < pos; ++i) outer *= f.cards()[i];
    for (std::size_t i = pos + 1; i < f.scope().size(); ++i) inner *= f.cards()[i];
    const auto card = f.cards()[pos];

    std::vector<double> values(outer * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t k = 0; k < card; ++k)
            for (std::size_t i = 0; i < inner; ++i) values[o * inner + i] += f.values()[(o * card + k) * inner + i];

    auto scope = f.scope();
    auto cards = f.cards();
    scope.erase(scope.begin() + static_cast<std::ptrdiff_t>(pos));
    cards.erase(cards.begin() + static_cast<std::ptrdiff_t>(pos));
    return Factor(std::move(scope), std::move(cards), std::move(values));
}

Factor reduce(const Factor& f, const NodeId& var, std::size_t level) {
    auto it = std::find(f.scope().begin(), f.scope().end(), var);
    if (it == f.scope().end()) return f;
    const auto pos = static_cast<std::size_t>(it - f.scope().begin());
    const auto card = f.cards()[pos];
    if (level >= card) throw FormatError("level index out of range for '" + var + "'");
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < pos; ++i) outer *= f.cards()[i];
    for (std::size_t i = pos + 1; i < f.scope().size(); ++i) inner *= f.cards()[i];

    std::vector<double> values(outer * inner);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < inner; ++i) values[o * inner + i] = f.values()[(o * card + level) * inner + i];

    auto scope = f.scope();
    auto cards = f.cards();
    scope.erase(scope.begin() + static_cast<std::ptrdiff_t>(pos));
    cards.erase(cards.begin() + static_cast<std::ptrdiff_t>(pos));
    return Factor(std::move(scope), std::move(cards), std::move(values));
}

Factor reorder(const Factor& f, const std::vector<NodeId>& order) {
    if (order.size() != f.scope().size()) throw FormatError("reorder needs a permutation of the scope");
    std::vector<std::size_t> cards;
    for (const auto& v : order) {
        auto it = std::find(f.scope().begin(), f.scope().end(), v);
        if (it == f.scope().end()) throw FormatError("reorder needs a permutation of the scope");
        cards.push_back(f.cards()[static_cast<std::size_t>(it - f.scope().begin())]);
    }
    // A unit factor over the new scope times f yields f's values laid out in the new order.
    Factor unit(order, cards, std::vector<double>(f.size(), 1.0));
    return multiply(unit, f);
}

Factor normalize(const Factor& f) {
    const double total = f.sum();
    if (!(total > 0.0) || !std::isfinite(total)) throw ZeroProbabilityEvidence("evidence has zero probability");
    auto values = f.values();
    for (auto& v : values) v /= total;
    return Factor(f.scope(), f.cards(), std::move(values));
}

namespace {

Factor cpt_factor(const Network& net, std::size_t v) {
    const auto& cpt = net.cpt(v);
    std::vector<NodeId> scope = cpt.parents;
    std::vector<std::size_t> cards = cpt.parent_cards;
    scope.push_back(cpt.child);
    cards.push_back(cpt.r);
    return Factor(std::move(scope), std::move(cards), cpt.table);
}

}  // namespace

Factor full_joint(const Network& net, std::size_t max_cells) {
    double cells = 1.0;
    for (std::size_t v = 0; v < net.size(); ++v) cells *= static_cast<double>(net.cardinality(v));
    if (cells > static_cast<double>(max_cells))
        throw StateSpaceTooLarge("joint state space has " + std::to_string(cells) + " cells, above the bound of " +
                                 std::to_string(max_cells));
    Factor joint;
    for (auto v : topological_indices(net.dag())) joint = multiply(joint, cpt_factor(net, v));
    return reorder(joint, net.dag().nodes());
}

Factor query(const Network& net, const std::vector<NodeId>& targets, const Evidence& ev) {
    const auto& g = net.dag();
    if (targets.empty()) throw OverlapError("query needs at least one target");
    std::set<NodeId> target_set;
    for (const auto& t : targets) {
        g.index_of(t);
        if (!target_set.insert(t).second) throw OverlapError("target '" + t + "' listed twice");
    }
    for (const auto& [var, level] : ev) {
        const auto v = g.index_of(var);
        if (target_set.count(var)) throw OverlapError("'" + var + "' is both a target and evidence");
        if (level >= net.cardinality(v)) throw FormatError("level index out of range for '" + var + "'");
    }

    // Nodes outside the ancestral set of targets and evidence sum out to 1.
    std::vector<char> relevant(g.size(), 0);
    std::vector<std::size_t> stack;
    auto visit = [&](std::size_t v) {
        if (!relevant[v]) {
            relevant[v] = 1;
            stack.push_back(v);
        }
    };
    for (const auto& t : targets) visit(g.index_of(t));
    for (const auto& [var, level] : ev) visit(g.index_of(var));
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto p : g.parents(v)) visit(p);
    }

    std::vector<Factor> factors;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (!relevant[v]) continue;
        Factor f = cpt_factor(net, v);
        for (const auto& [var, level] : ev) f = reduce(f, var, level);
        factors.push_back(std::move(f));
    }

    std::set<NodeId> to_eliminate;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (relevant[v] && !target_set.count(g.name(v)) && !ev.count(g.name(v))) to_eliminate.insert(g.name(v));

    while (!to_eliminate.empty()) {
        // min-degree in the current interaction graph; std::set order breaks ties by code
        NodeId pick;
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (const auto& var : to_eliminate) {
            std::set<NodeId> neighbours;
            for (const auto& f : factors)
                if (f.contains(var)) neighbours.insert(f.scope().begin(), f.scope().end());
            const auto degree = neighbours.empty() ? 0 : neighbours.size() - 1;
            if (degree < best) {
                best = degree;
                pick = var;
            }
        }
        Factor product;
        std::vector<Factor> rest;
        for (auto& f : factors) {
            if (f.contains(pick))
                product = multiply(product, f);
            else
                rest.push_back(std::move(f));
        }
        rest.push_back(sum_out(product, pick));
        factors = std::move(rest);
        to_eliminate.erase(pick);
    }

    Factor result;
    for (const auto& f : factors) result = multiply(result, f);
    return normalize(reorder(result, targets));
}

std::vector<Factor> marginals(const Network& net, const std::vector<NodeId>& vars) {
    if (vars.empty()) throw OverlapError("marginals need at least one variable");
    std::vector<Factor> out;
    for (const auto& v : vars) out.push_back(query(net, {v}));
    return out;
}

std::string format_factor(const Network& net, const Factor& f) {
    std::vector<ArrayDim> dims;
    for (const auto& v : f.scope()) dims.push_back({v, net.schema(v).levels});
    return format_array(dims, f.values());
}

}  // namespace bnkit
