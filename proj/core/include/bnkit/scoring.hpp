#ifndef BNKIT_SCORING_HPP
#define BNKIT_SCORING_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "bnkit/dataset.hpp"
#include "bnkit/graph.hpp"

namespace bnkit {

enum class ScoreKind { BIC, AIC, BDEU };

struct ScoreSpec {
    ScoreKind kind = ScoreKind::BIC;
    double iss = 10.0;  // imaginary sample size, BDEU only

    static ScoreSpec bic() { return {ScoreKind::BIC, 0.0}; }
    static ScoreSpec aic() { return {ScoreKind::AIC, 0.0}; }
    static ScoreSpec bdeu(double iss) { return {ScoreKind::BDEU, iss}; }

    friend bool operator==(const ScoreSpec&, const ScoreSpec&) = default;
};

// Throws ConstraintViolation for a non-positive BDEU iss.
void validate(const ScoreSpec& spec);
std::string to_string(ScoreKind kind);
// Accepts "bic", "aic", "bdeu" (case-insensitive; "bde" is an alias of "bdeu").
ScoreKind parse_score_kind(std::string_view text);

// Weight of the parameter count in the maximised score: ln(n)/2 for BIC, 1 for AIC.
double penalty_coefficient(ScoreKind kind, std::size_t n);

/// sum_jk n_ijk ln(n_ijk / n_ij) with 0 ln 0 = 0.
double family_loglik(const FamilyCounts& c);

/// Family term of a decomposable score, larger is better. `n` is the number
/// of rows in the dataset the counts came from. Errors: BadSampleSize.
double family_score(const FamilyCounts& c, const ScoreSpec& spec, std::size_t n);

/// Sum of family scores of every node of g. Errors: MissingData, NodeSetMismatch.
double network_score(const Dataset& d, const Dag& g, const ScoreSpec& spec);

/// Memoised family scores for one dataset and one score.
///
/// Keys are (child, sorted parent set); the parent order does not change a
/// family score, so permutations share an entry. Lookups are serialised by a
/// mutex and each key is stored once, so concurrent callers always observe
/// the same value.
class ScoreCache {
public:
    ScoreCache(const Dataset& data, ScoreSpec spec, bool enabled = true);

    const Dataset& data() const noexcept { return m_data; }
    const ScoreSpec& spec() const noexcept { return m_spec; }

    // child and parents are dataset column indices.
    double family(std::size_t child, std::span<const std::size_t> parents);

    std::uint64_t hits() const;
    std::uint64_t misses() const;
    std::uint64_t calls() const { return hits() + misses(); }

private:
    const Dataset& m_data;
    ScoreSpec m_spec;
    bool m_enabled;
    mutable std::mutex m_mutex;
    std::map<std::pair<std::size_t, std::vector<std::size_t>>, double> m_entries;
    std::uint64_t m_hits = 0;
    std::uint64_t m_misses = 0;
};

}  // namespace bnkit

#endif  // BNKIT_SCORING_HPP
