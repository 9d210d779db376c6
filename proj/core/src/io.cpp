#include "bnkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bnkit/error.hpp"

namespace bnkit {

using nlohmann::json;

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return j;
    return std::nullopt;
}

namespace {

// Splits one record; may consume further physical lines for quoted newlines.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
    std::string line;
    if (!std::getline(in, line)) return false;
    ++line_no;
    fields.clear();
    std::string cell;
    bool quoted = false;
    std::size_t i = 0;
    for (;;) {
        if (i == line.size()) {
            if (quoted) {
                if (!std::getline(in, line))
                    throw FormatError("line " + std::to_string(line_no) + ": unterminated quoted field");
                ++line_no;
                cell += '\n';
                i = 0;
                continue;
            }
            break;
        }
        const char ch = line[i++];
        if (quoted) {
            if (ch == '"') {
                if (i < line.size() && line[i] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cell));
            cell.clear();
        } else if (ch != '\r' || i != line.size()) {
            cell += ch;
        }
    }
    fields.push_back(std::move(cell));
    return true;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
    CsvTable t;
    std::size_t line_no = 0;
    if (!read_record(in, t.header, line_no)) throw FormatError("CSV input is empty");
    std::vector<std::string> fields;
    for (;;) {
        const auto start = line_no + 1;
        if (!read_record(in, fields, line_no)) break;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != t.header.size())
            throw RaggedRow("line " + std::to_string(start) + ": expected " + std::to_string(t.header.size()) +
                            " fields, found " + std::to_string(fields.size()));
        t.rows.push_back(fields);
    }
    return t;
}

void write_csv(std::ostream& out, const CsvTable& t) {
    auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << quote_if_needed(row[j]);
        out << "\n";
    };
    write_row(t.header);
    for (const auto& row : t.rows) write_row(row);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw FormatError("error writing '" + path.string() + "'");
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    try {
        return parse_csv(in);
    } catch (const RaggedRow& e) {
        throw RaggedRow(path.string() + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& t) {
    std::ostringstream ss;
    write_csv(ss, t);
    write_text_file(path, ss.str());
}

std::vector<SchemaEntry> parse_schema(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("schema is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("variables") || !doc["variables"].is_array())
        throw FormatError("schema needs a \"variables\" array");
    std::vector<SchemaEntry> out;
    for (const auto& v : doc["variables"]) {
        try {
            SchemaEntry e;
            e.schema.code = v.at("code").get<std::string>();
            e.schema.name = v.value("name", e.schema.code);
            e.numeric = v.value("numeric", false);
            if (!e.numeric) {
                e.schema.levels = v.at("levels").get<std::vector<std::string>>();
                validate_schema(e.schema);
            }
            out.push_back(std::move(e));
        } catch (const json::exception& ex) {
            throw FormatError("bad schema entry " + v.dump() + ": " + ex.what());
        }
    }
    return out;
}

std::string schema_to_json(const std::vector<SchemaEntry>& entries) {
    json vars = json::array();
    for (const auto& e : entries) {
        json v{{"code", e.schema.code}, {"name", e.schema.name}};
        if (e.numeric)
            v["numeric"] = true;
        else
            v["levels"] = e.schema.levels;
        vars.push_back(std::move(v));
    }
    return json{{"variables", vars}}.dump(2) + "\n";
}

std::vector<SchemaEntry> load_schema(const std::filesystem::path& path) {
    try {
        return parse_schema(read_text_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_schema(const std::filesystem::path& path, const std::vector<SchemaEntry>& entries) {
    write_text_file(path, schema_to_json(entries));
}

Dataset dataset_from_csv(const CsvTable& t, const std::vector<VariableSchema>& schemas, const std::string& missing) {
    std::vector<std::vector<Level>> columns;
    for (const auto& s : schemas) {
        auto j = t.column(s.code);
        if (!j) throw MissingColumn("column '" + s.code + "' not found in CSV header");
        std::vector<Level> col;
        col.reserve(t.rows.size());
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            const auto& cell = t.rows[r][*j];
            if (cell.empty() || cell == missing) {
                col.push_back(kMissing);
                continue;
            }
            auto level = s.find_level(cell);
            if (!level)
                throw UnknownLabel("row " + std::to_string(r + 2) + ", column '" + s.code + "': unknown label '" +
                                   cell + "'");
            col.push_back(*level);
        }
        columns.push_back(std::move(col));
    }
    return Dataset(schemas, std::move(columns));
}

CsvTable dataset_to_csv(const Dataset& d, const std::string& missing) {
    CsvTable t;
    t.header = d.codes();
    t.rows.assign(d.rows(), std::vector<std::string>(d.variables()));
    for (std::size_t j = 0; j < d.variables(); ++j) {
        const auto& s = d.schema(j);
        for (std::size_t r = 0; r < d.rows(); ++r) {
            const auto v = d.at(r, j);
            t.rows[r][j] = v == kMissing ? missing : s.levels[static_cast<std::size_t>(v)];
        }
    }
    return t;
}

Dataset load_dataset(const std::filesystem::path& csv, const std::filesystem::path& schema,
                     const std::string& missing) {
    std::vector<VariableSchema> schemas;
    for (auto& e : load_schema(schema)) {
        if (e.numeric) continue;
        schemas.push_back(std::move(e.schema));
    }
    const auto table = read_csv_file(csv);
    try {
        return dataset_from_csv(table, schemas, missing);
    } catch (const UnknownLabel& e) {
        throw UnknownLabel(csv.string() + ": " + e.what());
    } catch (const MissingColumn& e) {
        throw MissingColumn(csv.string() + ": " + e.what());
    }
}

std::string constraints_digest(const ArcConstraints& c) {
    std::uint64_t h = 14695981039346656037ull;
    auto feed = [&](std::string_view s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    feed("black");
    for (const auto& [from, to] : c.blacklist) {
        feed(from);
        feed(to);
    }
    feed("white");
    for (const auto& [from, to] : c.whitelist) {
        feed(from);
        feed(to);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

MoveKind parse_move_kind(const std::string& s) {
    if (s == "add") return MoveKind::Add;
    if (s == "delete") return MoveKind::Delete;
    if (s == "reverse") return MoveKind::Reverse;
    throw FormatError("unknown move kind '" + s + "'");
}

}  // namespace

std::string network_to_json(const NetworkDocument& doc) {
    const auto& net = doc.network;
    json vars = json::array();
    for (const auto& s : net.schemas()) vars.push_back({{"code", s.code}, {"name", s.name}, {"levels", s.levels}});
    json arcs = json::array();
    for (const auto& a : net.dag().arcs()) arcs.push_back({a.from, a.to});
    json cpts = json::array();
    for (const auto& c : net.cpts()) {
        json rows = json::array();
        for (std::size_t j = 0; j < c.q(); ++j) {
            auto row = c.row(j);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        cpts.push_back({{"child", c.child}, {"parents", c.parents}, {"table", rows}});
    }
    json diagnostics = json::array();
    for (const auto& e : net.diagnostics()) diagnostics.push_back({{"child", e.child}, {"row", e.row}});

    const auto& p = doc.provenance;
    json out{
        {"format", "bnkit-network"},
        {"version", 1},
        {"variables", vars},
        {"arcs", arcs},
        {"cpts", cpts},
        {"empty_configurations", diagnostics},
        {"provenance",
         {{"score", p.score},
          {"iss", p.iss},
          {"n", p.n},
          {"constraints_digest", p.constraints_digest},
          {"tool_version", p.tool_version},
          {"fit", p.fit},
          {"fit_iss", p.fit_iss}}},
    };
    if (doc.search) {
        const auto& s = *doc.search;
        json trace = json::array();
        for (const auto& t : s.trace)
            trace.push_back({{"move", to_string(t.move.kind)}, {"from", t.move.from}, {"to", t.move.to},
                             {"delta", t.delta}});
        out["search"] = {{"score", s.score},           {"iterations", s.iterations},
                         {"score_calls", s.score_calls}, {"cache_hits", s.cache_hits},
                         {"cache_misses", s.cache_misses}, {"trace", trace}};
    }
    return out.dump(2) + "\n";
}

NetworkDocument network_from_json(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("network document is not valid JSON: ") + e.what());
    }
    try {
        if (doc.value("format", std::string{}) != "bnkit-network")
            throw FormatError("not a network document (missing \"format\": \"bnkit-network\")");
        std::vector<VariableSchema> schemas;
        std::vector<NodeId> nodes;
        for (const auto& v : doc.at("variables")) {
            VariableSchema s{v.at("code").get<std::string>(), v.value("name", std::string{}),
                             v.at("levels").get<std::vector<std::string>>()};
            if (s.name.empty()) s.name = s.code;
            nodes.push_back(s.code);
            schemas.push_back(std::move(s));
        }
        std::vector<Arc> arcs;
        for (const auto& a : doc.at("arcs")) {
            if (!a.is_array() || a.size() != 2) throw FormatError("arc entries must be [from, to] pairs");
            arcs.push_back({a[0].get<std::string>(), a[1].get<std::string>()});
        }
        Dag dag(nodes, arcs);

        std::vector<Cpt> cpts;
        for (const auto& c : doc.at("cpts")) {
            Cpt cpt;
            cpt.child = c.at("child").get<std::string>();
            cpt.parents = c.at("parents").get<std::vector<std::string>>();
            for (const auto& row : c.at("table")) {
                auto values = row.get<std::vector<double>>();
                if (cpt.r == 0) cpt.r = values.size();
                if (values.size() != cpt.r) throw FormatError("CPT of '" + cpt.child + "' has ragged rows");
                cpt.table.insert(cpt.table.end(), values.begin(), values.end());
            }
            cpts.push_back(std::move(cpt));
        }
        std::vector<EmptyConfiguration> diagnostics;
        if (doc.contains("empty_configurations"))
            for (const auto& e : doc["empty_configurations"])
                diagnostics.push_back({e.at("child").get<std::string>(), e.at("row").get<std::size_t>()});

        NetworkDocument out{Network(std::move(dag), std::move(schemas), std::move(cpts), std::move(diagnostics)),
                            {}, std::nullopt};
        if (doc.contains("provenance")) {
            const auto& p = doc["provenance"];
            out.provenance.score = p.value("score", std::string{});
            out.provenance.iss = p.value("iss", 0.0);
            out.provenance.n = p.value("n", std::size_t{0});
            out.provenance.constraints_digest = p.value("constraints_digest", std::string{});
            out.provenance.tool_version = p.value("tool_version", std::string{});
            out.provenance.fit = p.value("fit", std::string{});
            out.provenance.fit_iss = p.value("fit_iss", 0.0);
        }
        if (doc.contains("search")) {
            const auto& s = doc["search"];
            SearchRecord rec;
            rec.score = s.value("score", 0.0);
            rec.iterations = s.value("iterations", std::size_t{0});
            rec.score_calls = s.value("score_calls", std::uint64_t{0});
            rec.cache_hits = s.value("cache_hits", std::uint64_t{0});
            rec.cache_misses = s.value("cache_misses", std::uint64_t{0});
            for (const auto& t : s.value("trace", json::array()))
                rec.trace.push_back({{parse_move_kind(t.at("move").get<std::string>()), t.at("from").get<std::string>(),
                                      t.at("to").get<std::string>()},
                                     t.at("delta").get<double>()});
            out.search = std::move(rec);
        }
        return out;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed network document: ") + e.what());
    }
}

void save_network(const std::filesystem::path& path, const NetworkDocument& doc) {
    write_text_file(path, network_to_json(doc));
}

NetworkDocument load_network(const std::filesystem::path& path) {
    try {
        return network_from_json(read_text_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace bnkit
