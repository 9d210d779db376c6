#include "bnkit/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "bnkit/error.hpp"

namespace bnkit {

using nlohmann::json;

Workbench make_workbench(const CsvTable& t, const std::vector<SchemaEntry>& schema, const std::string& missing) {
    Workbench w;
    std::vector<VariableSchema> categorical;
    for (const auto& e : schema) {
        if (!e.numeric) {
            categorical.push_back(e.schema);
            continue;
        }
        auto j = t.column(e.schema.code);
        if (!j) throw MissingColumn("column '" + e.schema.code + "' not found in CSV header");
        std::vector<double> col;
        col.reserve(t.rows.size());
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            const auto& cell = t.rows[r][*j];
            if (cell.empty() || cell == missing) {
                col.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            double v = 0.0;
            auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || end != cell.data() + cell.size())
                throw FormatError("row " + std::to_string(r + 2) + ", column '" + e.schema.code + "': '" + cell +
                                  "' is not a number");
            col.push_back(v);
        }
        w.numeric_codes.push_back(e.schema.code);
        w.numeric.push_back(std::move(col));
    }
    w.data = dataset_from_csv(t, categorical, missing);
    return w;
}

namespace {

PipelineStep parse_step(const json& s) {
    const auto op = s.at("op").get<std::string>();
    if (op == "merge") return MergeStep{s.at("var").get<std::string>(), s.at("mapping").get<LevelMapping>()};
    if (op == "fuse") {
        FuseStep f{s.at("a").get<std::string>(), s.at("b").get<std::string>(), s.at("code").get<std::string>(),
                   s.value("name", std::string{}), s.value("separator", std::string{"_"}), {}};
        if (s.contains("table"))
            for (const auto& row : s["table"]) {
                if (!row.is_array() || row.size() != 3)
                    throw FormatError("fuse table entries must be [a_label, b_label, fused_label]");
                f.table[{row[0].get<std::string>(), row[1].get<std::string>()}] = row[2].get<std::string>();
            }
        return f;
    }
    if (op == "impute") {
        ImputeStep st{s.at("gate").get<std::string>(), s.at("negative").get<std::string>(), {}};
        for (const auto& t : s.at("targets")) st.targets.push_back({t.at("var").get<std::string>(), t.at("fill").get<std::string>()});
        return st;
    }
    if (op == "discretize") {
        DiscretizeStep st{s.at("source").get<std::string>(), s.value("code", std::string{}),
                          s.value("name", std::string{}), s.at("cuts").get<std::vector<double>>(),
                          s.at("labels").get<std::vector<std::string>>()};
        if (st.code.empty()) st.code = st.source;
        return st;
    }
    if (op == "drop_incomplete") return DropIncompleteStep{};
    if (op == "filter") return FilterStep{s.at("var").get<std::string>(), s.at("keep").get<std::vector<std::string>>()};
    if (op == "drop_vars") return DropVarsStep{s.at("codes").get<std::vector<std::string>>()};
    throw FormatError("unknown pipeline op '" + op + "'");
}

}  // namespace

std::vector<PipelineStep> parse_pipeline(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("pipeline is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("steps") || !doc["steps"].is_array())
        throw FormatError("pipeline needs a \"steps\" array");
    std::vector<PipelineStep> steps;
    for (std::size_t i = 0; i < doc["steps"].size(); ++i) {
        const auto& s = doc["steps"][i];
        try {
            steps.push_back(parse_step(s));
        } catch (const json::exception& e) {
            throw FormatError("step " + std::to_string(i + 1) + " (" + s.value("op", std::string{"?"}) + "): " + e.what());
        } catch (const FormatError& e) {
            throw FormatError("step " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return steps;
}

std::string step_name(const PipelineStep& step) {
    static const char* names[] = {"merge", "fuse", "impute", "discretize", "drop_incomplete", "filter", "drop_vars"};
    return names[step.index()];
}

namespace {

Workbench keep_rows(const Workbench& w, const std::vector<std::size_t>& rows) {
    Workbench out;
    out.data = w.data.select_rows(rows);
    out.numeric_codes = w.numeric_codes;
    for (const auto& col : w.numeric) {
        std::vector<double> kept;
        kept.reserve(rows.size());
        for (auto r : rows) kept.push_back(col[r]);
        out.numeric.push_back(std::move(kept));
    }
    return out;
}

std::optional<std::size_t> numeric_index(const Workbench& w, const NodeId& code) {
    auto it = std::find(w.numeric_codes.begin(), w.numeric_codes.end(), code);
    if (it == w.numeric_codes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - w.numeric_codes.begin());
}

struct StepRunner {
    const Workbench& w;

    Workbench operator()(const MergeStep& s) const {
        return {merge_levels(w.data, s.var, s.mapping), w.numeric_codes, w.numeric};
    }

    Workbench operator()(const FuseStep& s) const {
        CombineFn combine;
        if (s.table.empty()) {
            combine = [sep = s.separator](const std::string& a, const std::string& b) { return a + sep + b; };
        } else {
            combine = [&s](const std::string& a, const std::string& b) {
                auto it = s.table.find({a, b});
                if (it == s.table.end())
                    throw PartialMapping("fuse table has no entry for (" + a + ", " + b + ")");
                return it->second;
            };
        }
        return {fuse_variables(w.data, s.a, s.b, s.code, combine, s.name), w.numeric_codes, w.numeric};
    }

    Workbench operator()(const ImputeStep& s) const {
        return {cascade_impute(w.data, s.gate, s.gate_negative, s.targets), w.numeric_codes, w.numeric};
    }

    Workbench operator()(const DiscretizeStep& s) const {
        auto idx = numeric_index(w, s.source);
        if (!idx) throw UnknownNode("'" + s.source + "' is not a numeric column");
        if (w.data.find(s.code) || (s.code != s.source && numeric_index(w, s.code)))
            throw CodeCollision("variable '" + s.code + "' already exists");
        auto column = discretize(w.numeric[*idx], s.cuts, s.labels);

        std::vector<VariableSchema> schemas = w.data.schemas();
        std::vector<std::vector<Level>> columns;
        for (std::size_t j = 0; j < w.data.variables(); ++j) columns.push_back(w.data.column(j));
        schemas.push_back({s.code, s.name.empty() ? s.code : s.name, column.levels});
        columns.push_back(std::move(column.cells));

        Workbench out{Dataset(std::move(schemas), std::move(columns)), w.numeric_codes, w.numeric};
        out.numeric_codes.erase(out.numeric_codes.begin() + static_cast<std::ptrdiff_t>(*idx));
        out.numeric.erase(out.numeric.begin() + static_cast<std::ptrdiff_t>(*idx));
        return out;
    }

    Workbench operator()(const DropIncompleteStep&) const {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < w.data.rows(); ++r) {
            bool ok = true;
            for (std::size_t j = 0; ok && j < w.data.variables(); ++j) ok = w.data.at(r, j) != kMissing;
            for (std::size_t j = 0; ok && j < w.numeric.size(); ++j) ok = std::isfinite(w.numeric[j][r]);
            if (ok) rows.push_back(r);
        }
        return keep_rows(w, rows);
    }

    Workbench operator()(const FilterStep& s) const {
        const auto j = w.data.index_of(s.var);
        const auto& schema = w.data.schema(j);
        std::vector<char> wanted(schema.cardinality(), 0);
        for (const auto& label : s.keep) wanted[static_cast<std::size_t>(schema.level_index(label))] = 1;
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < w.data.rows(); ++r) {
            const auto v = w.data.at(r, j);
            if (v != kMissing && wanted[static_cast<std::size_t>(v)]) rows.push_back(r);
        }
        return keep_rows(w, rows);
    }

    Workbench operator()(const DropVarsStep& s) const {
        Workbench out{w.data, w.numeric_codes, w.numeric};
        std::vector<NodeId> categorical;
        for (const auto& code : s.codes) {
            if (auto idx = numeric_index(out, code)) {
                out.numeric_codes.erase(out.numeric_codes.begin() + static_cast<std::ptrdiff_t>(*idx));
                out.numeric.erase(out.numeric.begin() + static_cast<std::ptrdiff_t>(*idx));
            } else {
                categorical.push_back(code);
            }
        }
        out.data = drop_variables(w.data, categorical);
        return out;
    }
};

}  // namespace

Workbench apply_step(const Workbench& w, const PipelineStep& step) {
    return std::visit(StepRunner{w}, step);
}

PipelineResult run_pipeline(const Workbench& start, const std::vector<PipelineStep>& steps) {
    PipelineResult result;
    Workbench w = start;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto before = w.data.rows();
        try {
            w = apply_step(w, steps[i]);
        } catch (const Error& e) {
            const std::string msg = "step " + std::to_string(i + 1) + " (" + step_name(steps[i]) + "): " + e.what();
            throw Error(e.error_class(), msg);
        }
        result.log.push_back("step " + std::to_string(i + 1) + " " + step_name(steps[i]) + ": rows " +
                             std::to_string(before) + " -> " + std::to_string(w.data.rows()) + ", variables " +
                             std::to_string(w.data.variables()));
    }
    for (const auto& code : w.numeric_codes)
        result.log.push_back("numeric column '" + code + "' was never discretized and is dropped");
    result.data = std::move(w.data);
    return result;
}

}  // namespace bnkit
