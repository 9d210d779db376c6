#ifndef BNKIT_PARAMS_HPP
#define BNKIT_PARAMS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnkit/dataset.hpp"
#include "bnkit/graph.hpp"

namespace bnkit {

/// Conditional probability table P(child | parents).
///
/// Rows are parent configurations (mixed radix over `parents`, first parent
/// most significant), columns are child levels.
struct Cpt {
    NodeId child;
    std::vector<NodeId> parents;
    std::vector<std::size_t> parent_cards;
    std::size_t r = 0;
    std::vector<double> table;  // q x r, row-major

    std::size_t q() const noexcept { return r == 0 ? 0 : table.size() / r; }
    double prob(std::size_t j, std::size_t k) const { return table[j * r + k]; }
    std::span<const double> row(std::size_t j) const { return {table.data() + j * r, r}; }

    friend bool operator==(const Cpt&, const Cpt&) = default;
};

// A parent configuration that had no observations at fitting time.
struct EmptyConfiguration {
    NodeId child;
    std::size_t row;

    friend bool operator==(const EmptyConfiguration&, const EmptyConfiguration&) = default;
};

/// A Dag plus one CPT per node, all indexed by the Dag's node index.
class Network {
public:
    Network() = default;
    /// `schemas` and `cpts` may come in any order; they are matched to the
    /// dag by code. Throws NodeSetMismatch / FormatError when the pieces do
    /// not fit together (wrong parents, wrong dimensions, rows not summing to 1).
    Network(Dag dag, std::vector<VariableSchema> schemas, std::vector<Cpt> cpts,
            std::vector<EmptyConfiguration> diagnostics = {});

    const Dag& dag() const noexcept { return m_dag; }
    std::size_t size() const noexcept { return m_dag.size(); }
    const VariableSchema& schema(std::size_t v) const { return m_schemas.at(v); }
    const VariableSchema& schema(std::string_view code) const { return m_schemas.at(m_dag.index_of(code)); }
    const std::vector<VariableSchema>& schemas() const noexcept { return m_schemas; }
    const Cpt& cpt(std::size_t v) const { return m_cpts.at(v); }
    const Cpt& cpt(std::string_view code) const { return m_cpts.at(m_dag.index_of(code)); }
    const std::vector<Cpt>& cpts() const noexcept { return m_cpts; }
    std::size_t cardinality(std::size_t v) const { return m_schemas.at(v).cardinality(); }
    const std::vector<EmptyConfiguration>& diagnostics() const noexcept { return m_diagnostics; }

    friend bool operator==(const Network&, const Network&) = default;

private:
    Dag m_dag;
    std::vector<VariableSchema> m_schemas;
    std::vector<Cpt> m_cpts;
    std::vector<EmptyConfiguration> m_diagnostics;
};

/// table[j][k] = n_ijk / n_ij; unobserved configurations get a uniform row
/// and are listed in diagnostics(). Errors: MissingData, NodeSetMismatch.
Network fit_mle(const Dataset& d, const Dag& g);

/// Posterior mean under the BDeu prior:
/// (n_ijk + iss/(r q)) / (n_ij + iss/q). Errors: as fit_mle, ConstraintViolation for iss <= 0.
Network fit_bayes(const Dataset& d, const Dag& g, double iss);

/// "Conditional probability table:" followed by the table in R layout
/// (child levels as rows, first parent as columns, one slice per
/// configuration of the remaining parents).
std::string format_cpt(const Network& net, std::string_view node);

}  // namespace bnkit

#endif  // BNKIT_PARAMS_HPP
