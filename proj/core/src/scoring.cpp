#include "bnkit/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "bnkit/error.hpp"

namespace bnkit {

void validate(const ScoreSpec& spec) {
    if (spec.kind == ScoreKind::BDEU && !(spec.iss > 0.0))
        throw ConstraintViolation("BDeu imaginary sample size must be positive");
}

std::string to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::BIC: return "bic";
        case ScoreKind::AIC: return "aic";
        case ScoreKind::BDEU: return "bdeu";
    }
    return "?";
}

ScoreKind parse_score_kind(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "bic") return ScoreKind::BIC;
    if (s == "aic") return ScoreKind::AIC;
    if (s == "bdeu" || s == "bde") return ScoreKind::BDEU;
    throw FormatError("unknown score '" + std::string(text) + "' (expected bic, aic or bdeu)");
}

double penalty_coefficient(ScoreKind kind, std::size_t n) {
    switch (kind) {
        case ScoreKind::BIC: return std::log(static_cast<double>(n)) / 2.0;
        case ScoreKind::AIC: return 1.0;
        case ScoreKind::BDEU: return 0.0;
    }
    return 0.0;
}

double family_loglik(const FamilyCounts& c) {
    double ll = 0.0;
    for (std::size_t j = 0; j < c.q; ++j) {
        const auto nij = c.n_ij[j];
        if (nij == 0) continue;
        const double log_nij = std::log(static_cast<double>(nij));
        for (std::size_t k = 0; k < c.r; ++k) {
            const auto nijk = c.count(j, k);
            if (nijk == 0) continue;
            ll += static_cast<double>(nijk) * (std::log(static_cast<double>(nijk)) - log_nij);
        }
    }
    return ll;
}

namespace {

double bdeu_family(const FamilyCounts& c, double iss) {
    const double a_j = iss / static_cast<double>(c.q);
    const double a_jk = a_j / static_cast<double>(c.r);
    const double lg_a_j = std::lgamma(a_j);
    const double lg_a_jk = std::lgamma(a_jk);
    double s = 0.0;
    for (std::size_t j = 0; j < c.q; ++j) {
        const auto nij = c.n_ij[j];
        if (nij == 0) continue;  // term vanishes exactly
        s += lg_a_j - std::lgamma(static_cast<double>(nij) + a_j);
        for (std::size_t k = 0; k < c.r; ++k) {
            const auto nijk = c.count(j, k);
            if (nijk == 0) continue;
            s += std::lgamma(static_cast<double>(nijk) + a_jk) - lg_a_jk;
        }
    }
    return s;
}

}  // namespace

double family_score(const FamilyCounts& c, const ScoreSpec& spec, std::size_t n) {
    const double dim = static_cast<double>(c.q) * static_cast<double>(c.r - 1);
    switch (spec.kind) {
        case ScoreKind::BIC:
            if (n < 1) throw BadSampleSize("BIC needs at least one observation");
            return family_loglik(c) - penalty_coefficient(ScoreKind::BIC, n) * dim;
        case ScoreKind::AIC:
            return family_loglik(c) - dim;
        case ScoreKind::BDEU:
            validate(spec);
            return bdeu_family(c, spec.iss);
    }
    return 0.0;
}

double network_score(const Dataset& d, const Dag& g, const ScoreSpec& spec) {
    auto codes = d.codes();
    std::sort(codes.begin(), codes.end());
    if (codes != g.nodes()) throw NodeSetMismatch("graph nodes differ from dataset variables");
    d.require_complete();
    double total = 0.0;
    for (std::size_t v = 0; v < g.size(); ++v) {
        std::vector<std::size_t> parents;
        for (auto p : g.parents(v)) parents.push_back(d.index_of(g.name(p)));
        // same parent order as ScoreCache, so both routes agree bit for bit
        std::sort(parents.begin(), parents.end());
        auto counts = family_counts(d, d.index_of(g.name(v)), parents);
        total += family_score(counts, spec, d.rows());
    }
    return total;
}

ScoreCache::ScoreCache(const Dataset& data, ScoreSpec spec, bool enabled)
    : m_data(data), m_spec(spec), m_enabled(enabled) {
    validate(m_spec);
}

double ScoreCache::family(std::size_t child, std::span<const std::size_t> parents) {
    std::vector<std::size_t> key_parents(parents.begin(), parents.end());
    std::sort(key_parents.begin(), key_parents.end());
    auto key = std::make_pair(child, std::move(key_parents));
    if (m_enabled) {
        std::lock_guard lock(m_mutex);
        if (auto it = m_entries.find(key); it != m_entries.end()) {
            ++m_hits;
            return it->second;
        }
    }
    const double value = family_score(family_counts(m_data, child, key.second), m_spec, m_data.rows());
    std::lock_guard lock(m_mutex);
    ++m_misses;
    if (!m_enabled) return value;
    return m_entries.emplace(std::move(key), value).first->second;
}

std::uint64_t ScoreCache::hits() const {
    std::lock_guard lock(m_mutex);
    return m_hits;
}

std::uint64_t ScoreCache::misses() const {
    std::lock_guard lock(m_mutex);
    return m_misses;
}

}  // namespace bnkit
