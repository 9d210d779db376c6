#include "bnkit/params.hpp"

#include <algorithm>
#include <cmath>

#include "bnkit/error.hpp"
#include "bnkit/format.hpp"

namespace bnkit {

Network::Network(Dag dag, std::vector<VariableSchema> schemas, std::vector<Cpt> cpts,
                 std::vector<EmptyConfiguration> diagnostics)
    : m_dag(std::move(dag)), m_diagnostics(std::move(diagnostics)) {
    const auto n = m_dag.size();
    if (schemas.size() != n || cpts.size() != n)
        throw NodeSetMismatch("network needs exactly one schema and one CPT per node");
    m_schemas.resize(n);
    m_cpts.resize(n);
    std::vector<char> seen_schema(n, 0), seen_cpt(n, 0);
    for (auto& s : schemas) {
        validate_schema(s);
        const auto v = m_dag.index_of(s.code);
        if (seen_schema[v]++) throw NodeSetMismatch("two schemas for '" + s.code + "'");
        m_schemas[v] = std::move(s);
    }
    for (auto& c : cpts) {
        const auto v = m_dag.index_of(c.child);
        if (seen_cpt[v]++) throw NodeSetMismatch("two CPTs for '" + c.child + "'");
        m_cpts[v] = std::move(c);
    }
    for (std::size_t v = 0; v < n; ++v) {
        auto& c = m_cpts[v];
        const auto expected = m_dag.parent_names(m_dag.name(v));
        if (c.parents != expected) throw NodeSetMismatch("CPT parents of '" + c.child + "' differ from the graph");
        c.parent_cards.clear();
        std::size_t q = 1;
        for (auto p : m_dag.parents(v)) {
            c.parent_cards.push_back(m_schemas[p].cardinality());
            q *= m_schemas[p].cardinality();
        }
        if (c.r != m_schemas[v].cardinality() || c.table.size() != q * c.r)
            throw FormatError("CPT of '" + c.child + "' has the wrong dimensions");
        for (std::size_t j = 0; j < q; ++j) {
            double sum = 0.0;
            for (auto p : c.row(j)) {
                if (!(p >= 0.0 && p <= 1.0)) throw FormatError("CPT of '" + c.child + "' has an entry outside [0,1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9) throw FormatError("CPT row of '" + c.child + "' does not sum to 1");
        }
    }
}

namespace {

template <typename RowFn>
Network fit(const Dataset& d, const Dag& g, RowFn&& fill_row) {
    auto codes = d.codes();
    std::sort(codes.begin(), codes.end());
    if (codes != g.nodes()) throw NodeSetMismatch("graph nodes differ from dataset variables");
    d.require_complete();

    std::vector<VariableSchema> schemas;
    std::vector<Cpt> cpts;
    std::vector<EmptyConfiguration> diagnostics;
    for (std::size_t v = 0; v < g.size(); ++v) {
        const auto& child = g.name(v);
        const auto parents = g.parent_names(child);
        const auto counts = family_counts(d, child, parents);
        Cpt cpt{child, parents, counts.parent_cards, counts.r, std::vector<double>(counts.q * counts.r)};
        for (std::size_t j = 0; j < counts.q; ++j) {
            if (!fill_row(counts, j, std::span<double>(cpt.table.data() + j * cpt.r, cpt.r)))
                diagnostics.push_back({child, j});
        }
        schemas.push_back(d.schema(d.index_of(child)));
        cpts.push_back(std::move(cpt));
    }
    return Network(g, std::move(schemas), std::move(cpts), std::move(diagnostics));
}

}  // namespace

Network fit_mle(const Dataset& d, const Dag& g) {
    return fit(d, g, [](const FamilyCounts& c, std::size_t j, std::span<double> row) {
        const auto nij = c.n_ij[j];
        if (nij == 0) {
            std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(c.r));
            return false;
        }
        for (std::size_t k = 0; k < c.r; ++k)
            row[k] = static_cast<double>(c.count(j, k)) / static_cast<double>(nij);
        return true;
    });
}

Network fit_bayes(const Dataset& d, const Dag& g, double iss) {
    if (!(iss > 0.0)) throw ConstraintViolation("imaginary sample size must be positive");
    return fit(d, g, [iss](const FamilyCounts& c, std::size_t j, std::span<double> row) {
        const double a_j = iss / static_cast<double>(c.q);
        const double a_jk = a_j / static_cast<double>(c.r);
        const double denom = static_cast<double>(c.n_ij[j]) + a_j;
        for (std::size_t k = 0; k < c.r; ++k) row[k] = (static_cast<double>(c.count(j, k)) + a_jk) / denom;
        return c.n_ij[j] > 0;
    });
}

std::string format_cpt(const Network& net, std::string_view node) {
    const auto v = net.dag().index_of(node);
    const auto& cpt = net.cpt(v);
    std::vector<ArrayDim> dims;
    dims.push_back({cpt.child, net.schema(v).levels});
    for (auto p : net.dag().parents(v)) dims.push_back({net.dag().name(p), net.schema(p).levels});

    // Reorder from (parent configuration, child) to (child, parents...).
    const auto q = cpt.q();
    std::vector<double> values(q * cpt.r);
    for (std::size_t k = 0; k < cpt.r; ++k)
        for (std::size_t j = 0; j < q; ++j) values[k * q + j] = cpt.prob(j, k);

    return "Conditional probability table:\n\n" + format_array(dims, values);
}

}  // namespace bnkit
