#ifndef BNKIT_INFERENCE_HPP
#define BNKIT_INFERENCE_HPP

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bnkit/graph.hpp"
#include "bnkit/params.hpp"

namespace bnkit {

/// Dense nonnegative table over the joint states of `scope`, mixed radix
/// with the first variable most significant.
class Factor {
public:
    Factor() : m_values{1.0} {}
    Factor(std::vector<NodeId> scope, std::vector<std::size_t> cards, std::vector<double> values);

    const std::vector<NodeId>& scope() const noexcept { return m_scope; }
    const std::vector<std::size_t>& cards() const noexcept { return m_cards; }
    const std::vector<double>& values() const noexcept { return m_values; }
    std::size_t size() const noexcept { return m_values.size(); }
    bool contains(const NodeId& var) const;
    // Cell for one level per scope variable, in scope order.
    double at(std::span<const std::size_t> assignment) const;
    double sum() const;

private:
    std::vector<NodeId> m_scope;
    std::vector<std::size_t> m_cards;
    std::vector<double> m_values;
};

Factor multiply(const Factor& a, const Factor& b);
Factor sum_out(const Factor& f, const NodeId& var);
// Slice at var = level; var leaves the scope.
Factor reduce(const Factor& f, const NodeId& var, std::size_t level);
// Same table with the scope permuted into `order` (a permutation of the scope).
Factor reorder(const Factor& f, const std::vector<NodeId>& order);
Factor normalize(const Factor& f);

// Observed level index per variable.
using Evidence = std::map<NodeId, std::size_t>;

/// Product of all CPTs over the full state space, scope in node order.
/// Errors: StateSpaceTooLarge when the table would exceed max_cells.
Factor full_joint(const Network& net, std::size_t max_cells = std::size_t{1} << 22);

/// Exact P(targets | ev) by variable elimination (min-degree order, ties by
/// code) over the ancestors of the targets and the evidence. The result's
/// scope is `targets` in the given order.
/// Errors: UnknownNode, OverlapError, ZeroProbabilityEvidence, FormatError (level out of range).
Factor query(const Network& net, const std::vector<NodeId>& targets, const Evidence& ev = {});

/// One single-variable marginal per entry of vars. Errors: UnknownNode.
std::vector<Factor> marginals(const Network& net, const std::vector<NodeId>& vars);

/// R-style table text with level labels taken from the network schemas.
std::string format_factor(const Network& net, const Factor& f);

}  // namespace bnkit

#endif  // BNKIT_INFERENCE_HPP
