#ifndef BNKIT_POSTERIOR_HPP
#define BNKIT_POSTERIOR_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bnkit/dataset.hpp"
#include "bnkit/graph.hpp"
#include "bnkit/inference.hpp"
#include "bnkit/params.hpp"

namespace bnkit {

struct DirichletPosterior {
    std::vector<std::string> cells;
    std::vector<std::uint64_t> counts;
    std::vector<double> alpha;
};

// Errors: FormatError unless |cells| = |counts| = |alpha| >= 2 and alpha > 0.
void validate(const DirichletPosterior& p);

/// Contingency tally of vars over rows where every filter variable takes the
/// given level. Cells run with vars.first varying fastest, so cell 2 is
/// (first = level 1, second = level 0).
/// Errors: UnknownNode, MissingData, EmptySubset, ConstraintViolation (alpha <= 0).
DirichletPosterior posterior_from_query(const Dataset& d, const Evidence& rows_filter,
                                        const std::pair<NodeId, NodeId>& vars, double alpha_scalar);

// iss spread over every cell of the table.
double alpha_iss_cells(double iss, std::size_t cells);
// iss / (product of the cardinalities of the parents of vars.second in net x cardinality of vars.first).
double alpha_parent_product(double iss, const Network& net, const std::pair<NodeId, NodeId>& vars);

struct McConfig {
    std::size_t chains = 4;
    std::size_t samples_per_chain = 10000;
    std::uint64_t seed = 1;
    double hpd_prob = 0.95;
};

// Errors: ConstraintViolation for zero chains/samples or hpd_prob outside (0,1).
void validate(const McConfig& cfg);

/// chains x samples x cells, flattened with the cell index fastest.
struct Draws {
    std::size_t chains = 0;
    std::size_t samples = 0;
    std::size_t cells = 0;
    std::vector<double> values;

    double at(std::size_t chain, std::size_t s, std::size_t cell) const {
        return values[(chain * samples + s) * cells + cell];
    }
    friend bool operator==(const Draws&, const Draws&) = default;
};

/// Independent Dirichlet(counts + alpha) draws; each chain runs its own
/// generator seeded from (seed, chain index), so results do not depend on
/// thread scheduling.
Draws sample(const DirichletPosterior& p, const McConfig& cfg);

inline constexpr std::array<double, 5> kQuantileProbs{0.025, 0.25, 0.5, 0.75, 0.975};

struct CellSummary {
    double mean = 0.0;
    double sd = 0.0;
    double naive_se = 0.0;
    double ts_se = 0.0;
    std::array<double, 5> quantiles{};
    std::vector<std::pair<double, double>> hpd;  // one per chain
};

struct PosteriorSummary {
    std::size_t chains = 0;
    std::size_t samples = 0;
    double hpd_prob = 0.95;
    std::vector<CellSummary> cells;
};

// Sample quantile with linear interpolation at p(n-1) on sorted values.
double quantile_sorted(const std::vector<double>& sorted, double p);
// Shortest window holding ceil(prob * n) of the sorted values.
std::pair<double, double> hpd_sorted(const std::vector<double>& sorted, double prob);

PosteriorSummary summarize(const Draws& draws, const McConfig& cfg);

/// Text block in the layout of the coda summary and HPDinterval output,
/// cells named pi.1 ... pi.K, followed by the cell legend.
std::string format_summary(const PosteriorSummary& s, const std::vector<std::string>& cell_labels);

}  // namespace bnkit

#endif  // BNKIT_POSTERIOR_HPP
