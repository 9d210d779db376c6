#ifndef BNKIT_SEARCH_HPP
#define BNKIT_SEARCH_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bnkit/dataset.hpp"
#include "bnkit/graph.hpp"
#include "bnkit/scoring.hpp"

namespace bnkit {

struct ArcConstraints {
    std::set<std::pair<NodeId, NodeId>> blacklist;  // (from, to) pairs that may never appear
    std::set<std::pair<NodeId, NodeId>> whitelist;  // (from, to) pairs that must appear

    /// Throws UnknownNode for codes outside `nodes`, ConstraintViolation when
    /// the lists intersect or the whitelist is cyclic.
    void validate(const std::vector<NodeId>& nodes) const;
    // Blacklists every arc into `node` except from the codes in `allowed_parents`.
    void forbid_parents(const std::vector<NodeId>& nodes, const NodeId& node,
                        const std::vector<NodeId>& allowed_parents = {});
};

// True when g contains no blacklisted arc and every whitelisted arc.
bool satisfies(const Dag& g, const ArcConstraints& c);

enum class MoveKind { Add, Delete, Reverse };
std::string to_string(MoveKind kind);

struct Move {
    MoveKind kind;
    NodeId from;
    NodeId to;

    friend bool operator==(const Move&, const Move&) = default;
};

Dag apply(const Dag& g, const Move& m);

/// Every single-arc change that keeps g acyclic and within c, ordered as
/// additions, deletions, reversals, each by (from, to).
/// Errors: ConstraintViolation when g already violates c.
std::vector<Move> legal_moves(const Dag& g, const ArcConstraints& c);

struct TraceStep {
    Move move;
    double delta;
};

struct SearchOptions {
    std::optional<Dag> start;  // default: the whitelisted arcs alone
    double eps = 1e-9;
    std::size_t max_iter = std::numeric_limits<std::size_t>::max();
    bool use_cache = true;
};

struct SearchReport {
    Dag final;
    double score = 0.0;
    std::size_t iterations = 0;
    std::uint64_t score_calls = 0;  // family-score requests, hits + misses
    std::uint64_t cache_hits = 0;
    std::uint64_t cache_misses = 0;
    std::size_t sample_size = 0;
    std::vector<TraceStep> trace;
};

/// Steepest-ascent hill climbing with add / delete / reverse moves.
///
/// Each step applies the legal move with the largest score gain; gains within
/// a relative 1e-9 of each other count as ties, which go to the earliest move
/// in legal_moves() order. The search stops once the best
/// gain is <= eps or after max_iter steps.
/// Errors: MissingData, ConstraintViolation, UnknownNode.
SearchReport hill_climb(const Dataset& d, const ScoreSpec& spec, const ArcConstraints& c,
                        const SearchOptions& options = {});

/// Text block: model string, graph statistics, algorithm and score details.
std::string report(const SearchReport& r, const ScoreSpec& spec);

}  // namespace bnkit

#endif  // BNKIT_SEARCH_HPP
