#include "bnkit/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <sstream>

#include "bnkit/error.hpp"

namespace bnkit {

namespace {

void insert_sorted(std::vector<std::size_t>& v, std::size_t x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

void erase_sorted(std::vector<std::size_t>& v, std::size_t x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
}

}  // namespace

Dag::Dag(std::vector<NodeId> nodes) : m_nodes(std::move(nodes)) {
    std::sort(m_nodes.begin(), m_nodes.end());
    for (std::size_t i = 0; i < m_nodes.size(); ++i) {
        if (m_nodes[i].empty()) throw SyntaxError("node code must be nonempty");
        if (i > 0 && m_nodes[i] == m_nodes[i - 1]) throw SyntaxError("duplicate node '" + m_nodes[i] + "'");
    }
    m_parents.resize(m_nodes.size());
    m_children.resize(m_nodes.size());
}

Dag::Dag(std::vector<NodeId> nodes, const std::vector<Arc>& arcs) : Dag(std::move(nodes)) {
    for (const auto& arc : arcs) {
        const auto from = index_of(arc.from);
        const auto to = index_of(arc.to);
        if (from == to) throw CycleError("self-loop on '" + arc.from + "'");
        if (has_arc(from, to)) throw DuplicateArc("duplicate arc " + arc.from + " -> " + arc.to);
        insert_arc(from, to);
    }
    if (topological_indices(*this).size() != size()) throw CycleError("arc set contains a directed cycle");
}

bool Dag::contains(std::string_view code) const {
    return std::binary_search(m_nodes.begin(), m_nodes.end(), code);
}

std::size_t Dag::index_of(std::string_view code) const {
    auto it = std::lower_bound(m_nodes.begin(), m_nodes.end(), code);
    if (it == m_nodes.end() || *it != code) throw UnknownNode("unknown node '" + std::string(code) + "'");
    return static_cast<std::size_t>(it - m_nodes.begin());
}

std::vector<NodeId> Dag::parent_names(std::string_view code) const {
    std::vector<NodeId> out;
    for (auto p : m_parents[index_of(code)]) out.push_back(m_nodes[p]);
    return out;
}

bool Dag::has_arc(std::size_t from, std::size_t to) const {
    return std::binary_search(m_parents.at(to).begin(), m_parents.at(to).end(), from);
}

bool Dag::reaches(std::size_t from, std::size_t to) const {
    if (from == to) return true;
    std::vector<char> seen(size(), 0);
    std::vector<std::size_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto c : m_children[v]) {
            if (c == to) return true;
            if (!seen[c]) {
                seen[c] = 1;
                stack.push_back(c);
            }
        }
    }
    return false;
}

std::vector<Arc> Dag::arcs() const {
    std::vector<Arc> out;
    out.reserve(m_arc_count);
    for (std::size_t from = 0; from < size(); ++from)
        for (auto to : m_children[from]) out.push_back({m_nodes[from], m_nodes[to]});
    return out;
}

void Dag::insert_arc(std::size_t from, std::size_t to) {
    insert_sorted(m_parents[to], from);
    insert_sorted(m_children[from], to);
    ++m_arc_count;
}

void Dag::erase_arc(std::size_t from, std::size_t to) {
    erase_sorted(m_parents[to], from);
    erase_sorted(m_children[from], to);
    --m_arc_count;
}

Dag Dag::add_arc(std::string_view from, std::string_view to) const {
    return add_arc(index_of(from), index_of(to));
}

Dag Dag::add_arc(std::size_t from, std::size_t to) const {
    if (from >= size() || to >= size()) throw UnknownNode("node index out of range");
    if (from == to) throw CycleError("self-loop on '" + m_nodes[from] + "'");
    if (has_arc(from, to)) throw DuplicateArc("arc " + m_nodes[from] + " -> " + m_nodes[to] + " already present");
    if (reaches(to, from))
        throw CycleError("arc " + m_nodes[from] + " -> " + m_nodes[to] + " would create a directed cycle");
    Dag out = *this;
    out.insert_arc(from, to);
    return out;
}

Dag Dag::remove_arc(std::string_view from, std::string_view to) const {
    return remove_arc(index_of(from), index_of(to));
}

Dag Dag::remove_arc(std::size_t from, std::size_t to) const {
    if (from >= size() || to >= size()) throw UnknownNode("node index out of range");
    if (!has_arc(from, to))
        throw ConstraintViolation("arc " + m_nodes[from] + " -> " + m_nodes[to] + " is not present");
    Dag out = *this;
    out.erase_arc(from, to);
    return out;
}

Dag Dag::reverse_arc(std::string_view from, std::string_view to) const {
    return reverse_arc(index_of(from), index_of(to));
}

Dag Dag::reverse_arc(std::size_t from, std::size_t to) const {
    Dag out = remove_arc(from, to);
    if (out.reaches(from, to))
        throw CycleError("reversing " + m_nodes[from] + " -> " + m_nodes[to] + " would create a directed cycle");
    out.insert_arc(to, from);
    return out;
}

std::vector<std::size_t> topological_indices(const Dag& g) {
    std::vector<std::size_t> indegree(g.size());
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t v = 0; v < g.size(); ++v) {
        indegree[v] = g.parents(v).size();
        if (indegree[v] == 0) ready.push(v);
    }
    std::vector<std::size_t> order;
    order.reserve(g.size());
    while (!ready.empty()) {
        auto v = ready.top();
        ready.pop();
        order.push_back(v);
        for (auto c : g.children(v))
            if (--indegree[c] == 0) ready.push(c);
    }
    return order;
}

std::vector<NodeId> topological_order(const Dag& g) {
    std::vector<NodeId> out;
    for (auto v : topological_indices(g)) out.push_back(g.name(v));
    return out;
}

Dag parse_model_string(std::string_view text) {
    struct Block {
        NodeId child;
        std::vector<NodeId> parents;
    };
    std::vector<Block> blocks;

    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    auto is_token_char = [&](char c) { return !is_space(c) && c != '[' && c != ']' && c != '|' && c != ':'; };

    std::size_t pos = 0;
    auto fail = [&](const std::string& msg) -> SyntaxError {
        return SyntaxError("model string, offset " + std::to_string(pos) + ": " + msg);
    };
    auto read_token = [&]() {
        std::size_t start = pos;
        while (pos < text.size() && is_token_char(text[pos])) ++pos;
        if (pos == start) throw fail("expected a node code");
        return NodeId(text.substr(start, pos - start));
    };

    while (true) {
        while (pos < text.size() && is_space(text[pos])) ++pos;
        if (pos == text.size()) break;
        if (text[pos] != '[') throw fail("expected '['");
        ++pos;
        Block block;
        block.child = read_token();
        if (pos < text.size() && text[pos] == '|') {
            ++pos;
            block.parents.push_back(read_token());
            while (pos < text.size() && text[pos] == ':') {
                ++pos;
                block.parents.push_back(read_token());
            }
        }
        if (pos >= text.size() || text[pos] != ']') throw fail("expected ']'");
        ++pos;
        blocks.push_back(std::move(block));
    }

    std::vector<NodeId> nodes;
    for (const auto& b : blocks) nodes.push_back(b.child);
    std::vector<NodeId> sorted = nodes;
    std::sort(sorted.begin(), sorted.end());
    if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end())
        throw SyntaxError("model string declares node '" + *dup + "' twice");

    std::vector<Arc> arcs;
    for (const auto& b : blocks) {
        for (const auto& p : b.parents) {
            if (!std::binary_search(sorted.begin(), sorted.end(), p))
                throw UnknownNode("parent '" + p + "' of '" + b.child + "' is not declared as a block");
            arcs.push_back({p, b.child});
        }
    }
    return Dag(std::move(nodes), arcs);
}

std::string format_model_string(const Dag& g) {
    std::string out;
    for (auto v : topological_indices(g)) {
        if (!out.empty()) out += ' ';
        out += '[';
        out += g.name(v);
        const auto& ps = g.parents(v);
        for (std::size_t i = 0; i < ps.size(); ++i) {
            out += i == 0 ? '|' : ':';
            out += g.name(ps[i]);
        }
        out += ']';
    }
    return out;
}

SkeletonInfo skeleton_and_vstructures(const Dag& g) {
    SkeletonInfo info;
    for (const auto& arc : g.arcs()) info.edges.insert(std::minmax(arc.from, arc.to));
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto& ps = g.parents(c);
        for (std::size_t i = 0; i < ps.size(); ++i) {
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
                if (g.has_arc(ps[i], ps[j]) || g.has_arc(ps[j], ps[i])) continue;
                info.vstructures.insert({g.name(ps[i]), g.name(c), g.name(ps[j])});
            }
        }
    }
    return info;
}

bool equivalent(const Dag& g1, const Dag& g2) {
    if (g1.nodes() != g2.nodes()) throw NodeSetMismatch("graphs are defined over different node sets");
    auto a = skeleton_and_vstructures(g1);
    auto b = skeleton_and_vstructures(g2);
    return a.edges == b.edges && a.vstructures == b.vstructures;
}

bool d_separated_indices(const Dag& g, std::span<const std::size_t> x, std::span<const std::size_t> y,
                         std::span<const std::size_t> z) {
    if (x.empty() || y.empty()) throw OverlapError("d-separation needs nonempty x and y sets");
    enum : char { kNone = 0, kX = 1, kY = 2, kZ = 3 };
    std::vector<char> role(g.size(), kNone);
    auto mark = [&](std::span<const std::size_t> set, char r) {
        for (auto v : set) {
            if (v >= g.size()) throw UnknownNode("node index out of range");
            if (role[v] != kNone && role[v] != r)
                throw OverlapError("node '" + g.name(v) + "' appears in more than one set");
            role[v] = r;
        }
    };
    mark(x, kX);
    mark(y, kY);
    mark(z, kZ);

    // Nodes that are in z or have a descendant in z: colliders there are open.
    std::vector<char> z_ancestor(g.size(), 0);
    {
        std::vector<std::size_t> stack(z.begin(), z.end());
        for (auto v : z) z_ancestor[v] = 1;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (auto p : g.parents(v))
                if (!z_ancestor[p]) {
                    z_ancestor[p] = 1;
                    stack.push_back(p);
                }
        }
    }

    // Trail search over (node, direction). "up" = entered from a child,
    // "down" = entered from a parent.
    constexpr int kUp = 0, kDown = 1;
    std::vector<char> visited(2 * g.size(), 0);
    std::deque<std::pair<std::size_t, int>> queue;
    for (auto v : x) queue.emplace_back(v, kUp);
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        if (visited[2 * v + dir]) continue;
        visited[2 * v + dir] = 1;
        const bool in_z = role[v] == kZ;
        if (!in_z && role[v] == kY) return false;
        if (dir == kUp) {
            if (in_z) continue;
            for (auto p : g.parents(v)) queue.emplace_back(p, kUp);
            for (auto c : g.children(v)) queue.emplace_back(c, kDown);
        } else {
            if (!in_z)
                for (auto c : g.children(v)) queue.emplace_back(c, kDown);
            if (z_ancestor[v])
                for (auto p : g.parents(v)) queue.emplace_back(p, kUp);
        }
    }
    return true;
}

bool d_separated(const Dag& g, std::span<const NodeId> x, std::span<const NodeId> y, std::span<const NodeId> z) {
    auto to_indices = [&](std::span<const NodeId> names) {
        std::vector<std::size_t> out;
        for (const auto& n : names) out.push_back(g.index_of(n));
        return out;
    };
    auto xi = to_indices(x), yi = to_indices(y), zi = to_indices(z);
    return d_separated_indices(g, xi, yi, zi);
}

std::vector<std::size_t> markov_blanket_indices(const Dag& g, std::size_t v) {
    std::set<std::size_t> mb(g.parents(v).begin(), g.parents(v).end());
    for (auto c : g.children(v)) {
        mb.insert(c);
        mb.insert(g.parents(c).begin(), g.parents(c).end());
    }
    mb.erase(v);
    return {mb.begin(), mb.end()};
}

std::vector<NodeId> markov_blanket(const Dag& g, std::string_view v) {
    std::vector<NodeId> out;
    for (auto i : markov_blanket_indices(g, g.index_of(v))) out.push_back(g.name(i));
    return out;
}

GraphSummary summarize_graph(const Dag& g) {
    GraphSummary s;
    s.node_count = g.size();
    s.arc_count = g.arc_count();
    if (g.size() == 0) return s;
    std::size_t mb_total = 0;
    for (std::size_t v = 0; v < g.size(); ++v) mb_total += markov_blanket_indices(g, v).size();
    const auto n = static_cast<double>(g.size());
    s.avg_markov_blanket = static_cast<double>(mb_total) / n;
    s.avg_neighbourhood = 2.0 * static_cast<double>(g.arc_count()) / n;
    s.avg_branching_factor = static_cast<double>(g.arc_count()) / n;
    return s;
}

std::string to_dot(const Dag& g, std::string_view graph_name) {
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') q += '\\';
            q += c;
        }
        return q + "\"";
    };
    std::ostringstream os;
    os << "digraph " << quote(std::string(graph_name)) << " {\n";
    for (const auto& n : g.nodes()) os << "  " << quote(n) << " [label=" << quote(n) << "];\n";
    for (const auto& arc : g.arcs()) os << "  " << quote(arc.from) << " -> " << quote(arc.to) << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace bnkit
