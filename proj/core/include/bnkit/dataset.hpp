#ifndef BNKIT_DATASET_HPP
#define BNKIT_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnkit/graph.hpp"

namespace bnkit {

// Position of a label in its variable's level list, or kMissing.
using Level = std::int32_t;
inline constexpr Level kMissing = -1;

struct VariableSchema {
    NodeId code;
    std::string name;
    std::vector<std::string> levels;

    std::size_t cardinality() const noexcept { return levels.size(); }
    std::optional<Level> find_level(std::string_view label) const;
    // Throws UnknownLabel.
    Level level_index(std::string_view label) const;

    friend bool operator==(const VariableSchema&, const VariableSchema&) = default;
};

// Throws on empty codes, zero levels or duplicated labels.
void validate_schema(const VariableSchema& s);

/// n x V table of categorical cells, stored column-major.
///
/// Level indices always refer to the schema's label list; they are never
/// derived from the order in which labels show up in the data.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<VariableSchema> schemas, std::vector<std::vector<Level>> columns);

    std::size_t rows() const noexcept { return m_rows; }
    std::size_t variables() const noexcept { return m_schemas.size(); }
    const std::vector<VariableSchema>& schemas() const noexcept { return m_schemas; }
    const VariableSchema& schema(std::size_t var) const { return m_schemas.at(var); }
    std::vector<NodeId> codes() const;

    std::optional<std::size_t> find(std::string_view code) const;
    // Throws UnknownNode.
    std::size_t index_of(std::string_view code) const;

    const std::vector<Level>& column(std::size_t var) const { return m_columns.at(var); }
    Level at(std::size_t row, std::size_t var) const { return m_columns.at(var).at(row); }

    bool complete() const;
    // Codes of the variables that contain at least one missing cell.
    std::vector<NodeId> incomplete_variables() const;
    // Throws MissingData naming the offending columns.
    void require_complete() const;

    Dataset select_rows(std::span<const std::size_t> rows) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<VariableSchema> m_schemas;
    std::vector<std::vector<Level>> m_columns;
    std::size_t m_rows = 0;
};

using LevelMapping = std::map<std::string, std::string>;
using CombineFn = std::function<std::string(const std::string&, const std::string&)>;

/// Relabels `var` through `mapping` (total over its current levels). The new
/// level list is the mapping's outputs in order of first appearance while
/// walking the old levels. Errors: UnknownNode, PartialMapping.
Dataset merge_levels(const Dataset& d, std::string_view var, const LevelMapping& mapping);

/// Replaces `a` and `b` by a single variable `new_code` at a's position.
/// Its levels are the distinct combine() outputs in order of first
/// appearance over the label product (a-major). A fused cell is missing iff
/// either source cell is missing. Errors: UnknownNode, CodeCollision.
Dataset fuse_variables(const Dataset& d, std::string_view a, std::string_view b, const NodeId& new_code,
                       const CombineFn& combine, std::string new_name = {});

struct ImputeTarget {
    NodeId var;
    std::string fill_label;
};

/// For rows whose gate answer is `gate_negative`, fills missing target cells
/// with the target's fill label. Errors: UnknownNode, UnknownLabel.
Dataset cascade_impute(const Dataset& d, std::string_view gate, std::string_view gate_negative,
                       std::span<const ImputeTarget> targets);

struct CategoricalColumn {
    std::vector<std::string> levels;
    std::vector<Level> cells;
};

/// Left-open, right-closed bins clamped at both ends; non-finite values
/// become missing. Errors: BadCuts.
CategoricalColumn discretize(std::span<const double> raw, std::span<const double> cuts,
                             std::vector<std::string> labels);

Dataset drop_incomplete(const Dataset& d);

// Keeps rows whose `var` label is one of `keep`. Missing cells are dropped.
Dataset filter_rows(const Dataset& d, std::string_view var, std::span<const std::string> keep);
Dataset drop_variables(const Dataset& d, std::span<const NodeId> codes);

/// Sufficient statistics of one family.
///
/// Parent configuration j is the mixed-radix number formed by the parent
/// levels with the first parent most significant.
struct FamilyCounts {
    NodeId child;
    std::vector<NodeId> parent_set;
    std::vector<std::size_t> parent_cards;
    std::size_t r = 0;
    std::size_t q = 1;
    std::vector<std::uint64_t> n_ijk;  // q x r, row-major
    std::vector<std::uint64_t> n_ij;   // q

    std::uint64_t count(std::size_t j, std::size_t k) const { return n_ijk[j * r + k]; }
    std::uint64_t total() const;
};

// Errors: MissingData, UnknownNode, OverlapError (child among parents).
FamilyCounts family_counts(const Dataset& d, std::string_view child, std::span<const NodeId> parent_set);
FamilyCounts family_counts(const Dataset& d, std::size_t child, std::span<const std::size_t> parent_set);

}  // namespace bnkit

#endif  // BNKIT_DATASET_HPP
