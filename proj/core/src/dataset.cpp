#include "bnkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "bnkit/error.hpp"

namespace bnkit {

std::optional<Level> VariableSchema::find_level(std::string_view label) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i] == label) return static_cast<Level>(i);
    return std::nullopt;
}

Level VariableSchema::level_index(std::string_view label) const {
    if (auto l = find_level(label)) return *l;
    throw UnknownLabel("variable '" + code + "' has no level '" + std::string(label) + "'");
}

void validate_schema(const VariableSchema& s) {
    if (s.code.empty()) throw FormatError("variable code must be nonempty");
    if (s.levels.empty()) throw FormatError("variable '" + s.code + "' has no levels");
    std::set<std::string> seen;
    for (const auto& l : s.levels)
        if (!seen.insert(l).second) throw FormatError("variable '" + s.code + "' repeats level '" + l + "'");
}

Dataset::Dataset(std::vector<VariableSchema> schemas, std::vector<std::vector<Level>> columns)
    : m_schemas(std::move(schemas)), m_columns(std::move(columns)) {
    if (m_schemas.size() != m_columns.size()) throw RaggedRow("schema count does not match column count");
    std::set<NodeId> codes;
    for (const auto& s : m_schemas) {
        validate_schema(s);
        if (!codes.insert(s.code).second) throw CodeCollision("duplicate variable code '" + s.code + "'");
    }
    m_rows = m_columns.empty() ? 0 : m_columns.front().size();
    for (std::size_t j = 0; j < m_columns.size(); ++j) {
        if (m_columns[j].size() != m_rows) throw RaggedRow("column '" + m_schemas[j].code + "' has a different length");
        const auto card = static_cast<Level>(m_schemas[j].cardinality());
        for (auto c : m_columns[j])
            if (c != kMissing && (c < 0 || c >= card))
                throw UnknownLabel("column '" + m_schemas[j].code + "' holds an out-of-range level index");
    }
}

std::vector<NodeId> Dataset::codes() const {
    std::vector<NodeId> out;
    for (const auto& s : m_schemas) out.push_back(s.code);
    return out;
}

std::optional<std::size_t> Dataset::find(std::string_view code) const {
    for (std::size_t j = 0; j < m_schemas.size(); ++j)
        if (m_schemas[j].code == code) return j;
    return std::nullopt;
}

std::size_t Dataset::index_of(std::string_view code) const {
    if (auto j = find(code)) return *j;
    throw UnknownNode("dataset has no variable '" + std::string(code) + "'");
}

bool Dataset::complete() const {
    return incomplete_variables().empty();
}

std::vector<NodeId> Dataset::incomplete_variables() const {
    std::vector<NodeId> out;
    for (std::size_t j = 0; j < m_columns.size(); ++j)
        if (std::find(m_columns[j].begin(), m_columns[j].end(), kMissing) != m_columns[j].end())
            out.push_back(m_schemas[j].code);
    return out;
}

void Dataset::require_complete() const {
    auto bad = incomplete_variables();
    if (bad.empty()) return;
    std::string msg = "data contain missing values in column(s):";
    for (const auto& c : bad) msg += " " + c;
    throw MissingData(msg);
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
    std::vector<std::vector<Level>> cols(m_columns.size());
    for (std::size_t j = 0; j < m_columns.size(); ++j) {
        cols[j].reserve(rows.size());
        for (auto r : rows) cols[j].push_back(m_columns[j].at(r));
    }
    return Dataset(m_schemas, std::move(cols));
}

Dataset merge_levels(const Dataset& d, std::string_view var, const LevelMapping& mapping) {
    const auto j = d.index_of(var);
    const auto& old = d.schema(j);
    VariableSchema merged{old.code, old.name, {}};
    std::vector<Level> remap(old.cardinality());
    for (std::size_t k = 0; k < old.cardinality(); ++k) {
        auto it = mapping.find(old.levels[k]);
        if (it == mapping.end())
            throw PartialMapping("mapping for '" + old.code + "' does not cover level '" + old.levels[k] + "'");
        auto existing = merged.find_level(it->second);
        if (!existing) {
            merged.levels.push_back(it->second);
            existing = static_cast<Level>(merged.levels.size() - 1);
        }
        remap[k] = *existing;
    }
    auto schemas = d.schemas();
    schemas[j] = merged;
    std::vector<std::vector<Level>> cols;
    for (std::size_t v = 0; v < d.variables(); ++v) cols.push_back(d.column(v));
    for (auto& c : cols[j])
        if (c != kMissing) c = remap[static_cast<std::size_t>(c)];
    return Dataset(std::move(schemas), std::move(cols));
}

Dataset fuse_variables(const Dataset& d, std::string_view a, std::string_view b, const NodeId& new_code,
                       const CombineFn& combine, std::string new_name) {
    const auto ja = d.index_of(a);
    const auto jb = d.index_of(b);
    if (ja == jb) throw CodeCollision("cannot fuse '" + std::string(a) + "' with itself");
    if (auto clash = d.find(new_code); clash && *clash != ja && *clash != jb)
        throw CodeCollision("variable code '" + new_code + "' already exists");

    const auto& sa = d.schema(ja);
    const auto& sb = d.schema(jb);
    VariableSchema fused{new_code, new_name.empty() ? sa.name + " / " + sb.name : std::move(new_name), {}};
    std::vector<Level> table(sa.cardinality() * sb.cardinality());
    for (std::size_t ka = 0; ka < sa.cardinality(); ++ka) {
        for (std::size_t kb = 0; kb < sb.cardinality(); ++kb) {
            auto label = combine(sa.levels[ka], sb.levels[kb]);
            auto existing = fused.find_level(label);
            if (!existing) {
                fused.levels.push_back(label);
                existing = static_cast<Level>(fused.levels.size() - 1);
            }
            table[ka * sb.cardinality() + kb] = *existing;
        }
    }

    std::vector<Level> fused_col(d.rows());
    for (std::size_t r = 0; r < d.rows(); ++r) {
        auto la = d.at(r, ja), lb = d.at(r, jb);
        fused_col[r] = (la == kMissing || lb == kMissing)
                           ? kMissing
                           : table[static_cast<std::size_t>(la) * sb.cardinality() + static_cast<std::size_t>(lb)];
    }

    std::vector<VariableSchema> schemas;
    std::vector<std::vector<Level>> cols;
    for (std::size_t v = 0; v < d.variables(); ++v) {
        if (v == jb) continue;
        if (v == ja) {
            schemas.push_back(fused);
            cols.push_back(fused_col);
        } else {
            schemas.push_back(d.schema(v));
            cols.push_back(d.column(v));
        }
    }
    return Dataset(std::move(schemas), std::move(cols));
}

Dataset cascade_impute(const Dataset& d, std::string_view gate, std::string_view gate_negative,
                       std::span<const ImputeTarget> targets) {
    const auto jg = d.index_of(gate);
    const auto negative = d.schema(jg).level_index(gate_negative);
    struct Resolved {
        std::size_t col;
        Level fill;
    };
    std::vector<Resolved> resolved;
    for (const auto& t : targets) {
        auto j = d.index_of(t.var);
        resolved.push_back({j, d.schema(j).level_index(t.fill_label)});
    }

    std::vector<std::vector<Level>> cols;
    for (std::size_t v = 0; v < d.variables(); ++v) cols.push_back(d.column(v));
    for (std::size_t r = 0; r < d.rows(); ++r) {
        if (cols[jg][r] != negative) continue;
        for (const auto& t : resolved)
            if (cols[t.col][r] == kMissing) cols[t.col][r] = t.fill;
    }
    return Dataset(d.schemas(), std::move(cols));
}

CategoricalColumn discretize(std::span<const double> raw, std::span<const double> cuts,
                             std::vector<std::string> labels) {
    if (labels.size() != cuts.size() + 1)
        throw BadCuts("discretize needs exactly one more label than cut points");
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (!std::isfinite(cuts[i])) throw BadCuts("cut points must be finite");
        if (i > 0 && !(cuts[i - 1] < cuts[i])) throw BadCuts("cut points must be strictly ascending");
    }
    CategoricalColumn out{std::move(labels), {}};
    out.cells.reserve(raw.size());
    for (double v : raw) {
        if (!std::isfinite(v)) {
            out.cells.push_back(kMissing);
            continue;
        }
        // first cut >= v gives the right-closed bin
        auto it = std::lower_bound(cuts.begin(), cuts.end(), v);
        out.cells.push_back(static_cast<Level>(it - cuts.begin()));
    }
    return out;
}

Dataset drop_incomplete(const Dataset& d) {
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < d.rows(); ++r) {
        bool ok = true;
        for (std::size_t v = 0; v < d.variables() && ok; ++v) ok = d.at(r, v) != kMissing;
        if (ok) keep.push_back(r);
    }
    return d.select_rows(keep);
}

Dataset filter_rows(const Dataset& d, std::string_view var, std::span<const std::string> keep) {
    const auto j = d.index_of(var);
    std::vector<char> allowed(d.schema(j).cardinality(), 0);
    for (const auto& label : keep) allowed[static_cast<std::size_t>(d.schema(j).level_index(label))] = 1;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < d.rows(); ++r) {
        auto l = d.at(r, j);
        if (l != kMissing && allowed[static_cast<std::size_t>(l)]) rows.push_back(r);
    }
    return d.select_rows(rows);
}

Dataset drop_variables(const Dataset& d, std::span<const NodeId> codes) {
    std::vector<char> drop(d.variables(), 0);
    for (const auto& c : codes) drop[d.index_of(c)] = 1;
    std::vector<VariableSchema> schemas;
    std::vector<std::vector<Level>> cols;
    for (std::size_t v = 0; v < d.variables(); ++v) {
        if (drop[v]) continue;
        schemas.push_back(d.schema(v));
        cols.push_back(d.column(v));
    }
    if (schemas.empty()) return Dataset();
    return Dataset(std::move(schemas), std::move(cols));
}

std::uint64_t FamilyCounts::total() const {
    return std::accumulate(n_ij.begin(), n_ij.end(), std::uint64_t{0});
}

FamilyCounts family_counts(const Dataset& d, std::size_t child, std::span<const std::size_t> parent_set) {
    if (child >= d.variables()) throw UnknownNode("variable index out of range");
    FamilyCounts fc;
    fc.child = d.schema(child).code;
    fc.r = d.schema(child).cardinality();
    for (auto p : parent_set) {
        if (p >= d.variables()) throw UnknownNode("variable index out of range");
        if (p == child) throw OverlapError("'" + fc.child + "' cannot be its own parent");
        fc.parent_set.push_back(d.schema(p).code);
        fc.parent_cards.push_back(d.schema(p).cardinality());
        fc.q *= d.schema(p).cardinality();
    }
    fc.n_ijk.assign(fc.q * fc.r, 0);
    fc.n_ij.assign(fc.q, 0);

    const auto& child_col = d.column(child);
    for (std::size_t row = 0; row < d.rows(); ++row) {
        std::size_t j = 0;
        for (std::size_t i = 0; i < parent_set.size(); ++i) {
            auto l = d.column(parent_set[i])[row];
            if (l == kMissing) throw MissingData("missing value in column '" + fc.parent_set[i] + "'");
            j = j * fc.parent_cards[i] + static_cast<std::size_t>(l);
        }
        auto k = child_col[row];
        if (k == kMissing) throw MissingData("missing value in column '" + fc.child + "'");
        ++fc.n_ijk[j * fc.r + static_cast<std::size_t>(k)];
        ++fc.n_ij[j];
    }
    return fc;
}

FamilyCounts family_counts(const Dataset& d, std::string_view child, std::span<const NodeId> parent_set) {
    std::vector<std::size_t> ps;
    for (const auto& p : parent_set) ps.push_back(d.index_of(p));
    return family_counts(d, d.index_of(child), ps);
}

}  // namespace bnkit
