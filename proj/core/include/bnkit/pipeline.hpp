#ifndef BNKIT_PIPELINE_HPP
#define BNKIT_PIPELINE_HPP

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bnkit/dataset.hpp"
#include "bnkit/io.hpp"

namespace bnkit {

/// Categorical data plus the raw numeric columns still waiting for a
/// discretize step. Row i of every numeric column belongs to row i of data.
struct Workbench {
    Dataset data;
    std::vector<NodeId> numeric_codes;
    std::vector<std::vector<double>> numeric;  // NaN marks a missing value
};

// Errors: as dataset_from_csv; FormatError for unparsable numbers.
Workbench make_workbench(const CsvTable& t, const std::vector<SchemaEntry>& schema, const std::string& missing = "NA");

struct MergeStep {
    NodeId var;
    LevelMapping mapping;
};
// Either label concatenation with `separator`, or an explicit (a, b) -> label table.
struct FuseStep {
    NodeId a;
    NodeId b;
    NodeId code;
    std::string name;
    std::string separator;
    std::map<std::pair<std::string, std::string>, std::string> table;
};
struct ImputeStep {
    NodeId gate;
    std::string gate_negative;
    std::vector<ImputeTarget> targets;
};
struct DiscretizeStep {
    NodeId source;
    NodeId code;
    std::string name;
    std::vector<double> cuts;
    std::vector<std::string> labels;
};
struct DropIncompleteStep {};
struct FilterStep {
    NodeId var;
    std::vector<std::string> keep;
};
struct DropVarsStep {
    std::vector<NodeId> codes;
};

using PipelineStep =
    std::variant<MergeStep, FuseStep, ImputeStep, DiscretizeStep, DropIncompleteStep, FilterStep, DropVarsStep>;

/// {"steps": [{"op": "merge" | "fuse" | "impute" | "discretize" |
/// "drop_incomplete" | "filter" | "drop_vars", ...}, ...]}
/// Errors: FormatError naming the step index and op.
std::vector<PipelineStep> parse_pipeline(std::string_view json_text);

std::string step_name(const PipelineStep& step);

Workbench apply_step(const Workbench& w, const PipelineStep& step);

struct PipelineResult {
    Dataset data;
    std::vector<std::string> log;  // one line per step, plus dropped numeric columns
};

/// Applies the steps in order. Numeric columns never discretized are
/// dropped from the result and reported in the log.
PipelineResult run_pipeline(const Workbench& start, const std::vector<PipelineStep>& steps);

}  // namespace bnkit

#endif  // BNKIT_PIPELINE_HPP
