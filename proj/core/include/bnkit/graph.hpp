#ifndef BNKIT_GRAPH_HPP
#define BNKIT_GRAPH_HPP

#include <compare>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bnkit {

// Variable code such as "A", "BB" or "Tt". Case-sensitive, compared lexicographically.
using NodeId = std::string;

struct Arc {
    NodeId from;
    NodeId to;

    auto operator<=>(const Arc&) const = default;
};

/// Directed acyclic graph over named nodes.
///
/// Nodes are kept sorted by code, so node indices follow the lexicographic
/// order of the codes and every index-ordered iteration is deterministic.
/// Parent and child lists are sorted as well. A Dag is a value: the arc
/// operations return a new graph and leave the receiver untouched, and
/// every graph that exists is acyclic.
class Dag {
public:
    Dag() = default;
    explicit Dag(std::vector<NodeId> nodes);
    Dag(std::vector<NodeId> nodes, const std::vector<Arc>& arcs);

    std::size_t size() const noexcept { return m_nodes.size(); }
    const std::vector<NodeId>& nodes() const noexcept { return m_nodes; }
    const NodeId& name(std::size_t v) const { return m_nodes.at(v); }
    bool contains(std::string_view code) const;
    // Throws UnknownNode.
    std::size_t index_of(std::string_view code) const;

    const std::vector<std::size_t>& parents(std::size_t v) const { return m_parents.at(v); }
    const std::vector<std::size_t>& children(std::size_t v) const { return m_children.at(v); }
    std::vector<NodeId> parent_names(std::string_view code) const;

    bool has_arc(std::size_t from, std::size_t to) const;
    // True when a directed path from -> ... -> to exists (trivially for from == to).
    bool reaches(std::size_t from, std::size_t to) const;
    std::size_t arc_count() const noexcept { return m_arc_count; }
    // All arcs, sorted by (from, to).
    std::vector<Arc> arcs() const;

    // Errors: UnknownNode, DuplicateArc, CycleError (self-loops included).
    Dag add_arc(std::string_view from, std::string_view to) const;
    Dag add_arc(std::size_t from, std::size_t to) const;
    // Errors: UnknownNode, ConstraintViolation when the arc is absent.
    Dag remove_arc(std::string_view from, std::string_view to) const;
    Dag remove_arc(std::size_t from, std::size_t to) const;
    // Errors: as remove_arc, plus CycleError.
    Dag reverse_arc(std::string_view from, std::string_view to) const;
    Dag reverse_arc(std::size_t from, std::size_t to) const;

    friend bool operator==(const Dag&, const Dag&) = default;

private:
    void insert_arc(std::size_t from, std::size_t to);
    void erase_arc(std::size_t from, std::size_t to);

    std::vector<NodeId> m_nodes;
    std::vector<std::vector<std::size_t>> m_parents;
    std::vector<std::vector<std::size_t>> m_children;
    std::size_t m_arc_count = 0;
};

/// Kahn's algorithm; among the admissible orders the lexicographically
/// smallest code is always emitted first.
std::vector<NodeId> topological_order(const Dag& g);
std::vector<std::size_t> topological_indices(const Dag& g);

/// Reads the bracket notation "[A] [B|A] [C|A:B]". Whitespace between
/// blocks is optional. Errors: SyntaxError, UnknownNode, DuplicateArc, CycleError.
Dag parse_model_string(std::string_view text);
/// Blocks in topological order, parents sorted, separated by single spaces.
std::string format_model_string(const Dag& g);

struct VStructure {
    NodeId parent1;  // parent1 < parent2
    NodeId child;
    NodeId parent2;

    auto operator<=>(const VStructure&) const = default;
};

struct SkeletonInfo {
    std::set<std::pair<NodeId, NodeId>> edges;  // first < second
    std::set<VStructure> vstructures;
};

SkeletonInfo skeleton_and_vstructures(const Dag& g);

/// Markov equivalence: same skeleton and same v-structures.
/// Errors: NodeSetMismatch.
bool equivalent(const Dag& g1, const Dag& g2);

/// Reachability (Bayes-ball) d-separation test of x and y given z.
/// Errors: UnknownNode, OverlapError (sets not disjoint, or x / y empty).
bool d_separated(const Dag& g, std::span<const NodeId> x, std::span<const NodeId> y,
                 std::span<const NodeId> z);
bool d_separated_indices(const Dag& g, std::span<const std::size_t> x, std::span<const std::size_t> y,
                         std::span<const std::size_t> z);

/// Parents, children and co-parents of v, sorted; never contains v.
std::vector<NodeId> markov_blanket(const Dag& g, std::string_view v);
std::vector<std::size_t> markov_blanket_indices(const Dag& g, std::size_t v);

struct GraphSummary {
    std::size_t node_count = 0;
    std::size_t arc_count = 0;
    double avg_markov_blanket = 0.0;
    double avg_neighbourhood = 0.0;
    double avg_branching_factor = 0.0;
};

GraphSummary summarize_graph(const Dag& g);

/// Graphviz rendering: node statements in code order, then one edge per arc
/// in (from, to) order.
std::string to_dot(const Dag& g, std::string_view graph_name = "bn");

}  // namespace bnkit

#endif  // BNKIT_GRAPH_HPP
