#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bnkit/error.hpp"
#include "bnkit/format.hpp"
#include "bnkit/graph.hpp"
#include "bnkit/inference.hpp"
#include "bnkit/io.hpp"
#include "bnkit/params.hpp"
#include "bnkit/pipeline.hpp"
#include "bnkit/posterior.hpp"
#include "bnkit/scoring.hpp"
#include "bnkit/search.hpp"

#ifndef BNKIT_VERSION
#define BNKIT_VERSION "0.0.0"
#endif

namespace bnkit::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
        throw FormatError("expected VAR=LABEL, got '" + text + "'");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

// "A=x,B=y" against the given schemas.
Evidence parse_evidence(const std::string& text, const std::function<const VariableSchema&(const std::string&)>& schema_of) {
    Evidence ev;
    for (const auto& item : split(text, ',')) {
        auto [var, label] = split_assignment(item);
        const auto& s = schema_of(var);
        auto level = s.find_level(label);
        if (!level) throw FormatError("'" + label + "' is not a level of '" + var + "'");
        if (ev.count(var)) throw OverlapError("'" + var + "' given twice");
        ev[var] = static_cast<std::size_t>(*level);
    }
    return ev;
}

// Lines "FROM,TO"; FROM may be "*" for every other node. '#' starts a comment.
std::vector<std::pair<NodeId, NodeId>> read_arc_list(const fs::path& path, const std::vector<NodeId>& nodes,
                                                     bool allow_wildcard) {
    std::vector<std::pair<NodeId, NodeId>> arcs;
    std::istringstream in(read_text_file(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto fields = split(line, ',');
        if (fields.empty()) continue;
        if (fields.size() != 2)
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected FROM,TO");
        if (fields[0] == "*") {
            if (!allow_wildcard) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": '*' not allowed here");
            for (const auto& n : nodes)
                if (n != fields[1]) arcs.emplace_back(n, fields[1]);
        } else {
            arcs.emplace_back(fields[0], fields[1]);
        }
    }
    return arcs;
}

Dag graph_from(const std::string& net_path, const std::string& model, const std::string& model_file) {
    const int given = !net_path.empty() + !model.empty() + !model_file.empty();
    if (given != 1) throw FormatError("give exactly one of --net, --model, --model-file");
    if (!net_path.empty()) return load_network(net_path).network.dag();
    if (!model.empty()) return parse_model_string(model);
    return parse_model_string(read_text_file(model_file));
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

struct Options {
    std::string data, schema, pipeline, out, schema_out, missing = "NA";

    std::string score = "bic", blacklist, whitelist, roots, dot, report_path, fit = "mle";
    std::vector<std::string> only_parent;
    double iss = 10.0, fit_iss = 10.0;
    std::size_t max_iter = 0;

    std::string net, model, model_file;
    std::string targets, given;
    bool json = false;
    std::string x, y, z, node;

    std::string filter, vars, alpha_mode = "iss-cells";
    std::optional<double> alpha;
    std::size_t chains = 4, samples = 10000;
    std::uint64_t seed = 1;
    double hpd = 0.95;
};

int cmd_preprocess(const Options& o, std::ostream& out) {
    const auto schema = load_schema(o.schema);
    const auto table = read_csv_file(o.data);
    const auto steps = o.pipeline.empty() ? std::vector<PipelineStep>{} : parse_pipeline(read_text_file(o.pipeline));
    const auto bench = make_workbench(table, schema, o.missing);
    const auto result = run_pipeline(bench, steps);

    fs::path schema_out = o.schema_out;
    if (schema_out.empty()) schema_out = fs::path(o.out).replace_extension(".schema.json");
    write_csv_file(o.out, dataset_to_csv(result.data, o.missing));
    std::vector<SchemaEntry> entries;
    for (const auto& s : result.data.schemas()) entries.push_back({s, false});
    save_schema(schema_out, entries);

    out << "rows before: " << bench.data.rows() << "\n";
    for (const auto& line : result.log) out << line << "\n";
    out << "rows after: " << result.data.rows() << "\n";
    out << "variables: " << result.data.variables() << "\n";
    return kOk;
}

int cmd_learn(const Options& o, std::ostream& out) {
    const auto d = load_dataset(o.data, o.schema, o.missing);
    auto nodes = d.codes();
    std::sort(nodes.begin(), nodes.end());

    ScoreSpec spec{parse_score_kind(o.score), o.iss};
    validate(spec);

    ArcConstraints c;
    if (!o.blacklist.empty())
        for (auto& a : read_arc_list(o.blacklist, nodes, true)) c.blacklist.insert(a);
    if (!o.whitelist.empty())
        for (auto& a : read_arc_list(o.whitelist, nodes, false)) c.whitelist.insert(a);
    for (const auto& r : split(o.roots, ',')) c.forbid_parents(nodes, r);
    std::map<NodeId, std::vector<NodeId>> allowed;
    for (const auto& item : o.only_parent) {
        auto [child, parent] = split_assignment(item);
        auto& list = allowed[child];
        for (const auto& p : split(parent, ':')) list.push_back(p);
    }
    for (const auto& [child, parents] : allowed) c.forbid_parents(nodes, child, parents);
    c.validate(nodes);

    SearchOptions opts;
    if (o.max_iter > 0) opts.max_iter = o.max_iter;
    const auto result = hill_climb(d, spec, c, opts);
    const auto text = report(result, spec);
    out << text;
    if (!o.report_path.empty()) write_text_file(o.report_path, text);

    if (o.fit != "mle" && o.fit != "bayes") throw FormatError("--fit must be mle or bayes");
    NetworkDocument doc{o.fit == "mle" ? fit_mle(d, result.final) : fit_bayes(d, result.final, o.fit_iss), {}, {}};
    doc.provenance = {to_string(spec.kind),
                      spec.kind == ScoreKind::BDEU ? spec.iss : 0.0,
                      d.rows(),
                      constraints_digest(c),
                      std::string("bnkit ") + BNKIT_VERSION,
                      o.fit,
                      o.fit == "bayes" ? o.fit_iss : 0.0};
    doc.search = SearchRecord{result.score,       result.iterations,   result.score_calls,
                              result.cache_hits, result.cache_misses, result.trace};
    if (!o.out.empty()) save_network(o.out, doc);
    if (!o.dot.empty()) write_text_file(o.dot, to_dot(result.final));
    return kOk;
}

int cmd_summarize(const Options& o, std::ostream& out) {
    const auto g = graph_from(o.net, o.model, o.model_file);
    const auto s = summarize_graph(g);
    out << "model:\n  " << format_model_string(g) << "\n";
    out << "nodes: " << s.node_count << "\n";
    out << "arcs: " << s.arc_count << "\n";
    out << "  undirected arcs: 0\n";
    out << "  directed arcs: " << s.arc_count << "\n";
    out << "average markov blanket size: " << format_fixed(s.avg_markov_blanket, 2) << "\n";
    out << "average neighbourhood size: " << format_fixed(s.avg_neighbourhood, 2) << "\n";
    out << "average branching factor: " << format_fixed(s.avg_branching_factor, 2) << "\n";
    return kOk;
}

int cmd_query(const Options& o, std::ostream& out) {
    const auto doc = load_network(o.net);
    const auto& net = doc.network;
    const auto targets = split(o.targets, ',');
    const auto ev = parse_evidence(o.given, [&](const std::string& v) -> const VariableSchema& { return net.schema(v); });
    const auto f = query(net, targets, ev);

    if (o.json) {
        nlohmann::json cells = nlohmann::json::array();
        std::vector<std::size_t> idx(f.scope().size(), 0);
        for (std::size_t i = 0; i < f.size(); ++i) {
            nlohmann::json cell;
            for (std::size_t k = 0; k < idx.size(); ++k) cell[f.scope()[k]] = net.schema(f.scope()[k]).levels[idx[k]];
            cell["p"] = f.values()[i];
            cells.push_back(cell);
            for (std::size_t k = idx.size(); k-- > 0;) {
                if (++idx[k] < f.cards()[k]) break;
                idx[k] = 0;
            }
        }
        nlohmann::json given = nlohmann::json::object();
        for (const auto& [var, level] : ev) given[var] = net.schema(var).levels[level];
        out << nlohmann::json{{"targets", targets}, {"given", given}, {"cells", cells}}.dump(2) << "\n";
    } else {
        out << format_factor(net, f);
    }
    return kOk;
}

int cmd_dsep(const Options& o, std::ostream& out) {
    const auto g = graph_from(o.net, o.model, o.model_file);
    const auto x = split(o.x, ','), y = split(o.y, ','), z = split(o.z, ',');
    out << (d_separated(g, x, y, z) ? "TRUE" : "FALSE") << "\n";
    return kOk;
}

int cmd_mb(const Options& o, std::ostream& out) {
    const auto g = graph_from(o.net, o.model, o.model_file);
    out << join(markov_blanket(g, o.node), " ") << "\n";
    return kOk;
}

int cmd_cpt(const Options& o, std::ostream& out) {
    const auto doc = load_network(o.net);
    out << format_cpt(doc.network, o.node);
    return kOk;
}

int cmd_export(const Options& o, std::ostream& out) {
    const auto g = graph_from(o.net, o.model, o.model_file);
    const auto dot = to_dot(g);
    if (o.dot.empty())
        out << dot;
    else
        write_text_file(o.dot, dot);
    return kOk;
}

int cmd_posterior(const Options& o, std::ostream& out) {
    const auto d = load_dataset(o.data, o.schema, o.missing);
    const auto vars = split(o.vars, ',');
    if (vars.size() != 2) throw FormatError("--vars needs exactly two codes");
    const std::pair<NodeId, NodeId> pair{vars[0], vars[1]};
    const auto ev = parse_evidence(o.filter, [&](const std::string& v) -> const VariableSchema& {
        auto j = d.find(v);
        if (!j) throw UnknownNode("unknown variable '" + v + "'");
        return d.schema(*j);
    });

    double alpha = 0.0;
    if (o.alpha) {
        alpha = *o.alpha;
    } else if (o.alpha_mode == "iss-cells") {
        for (const auto& v : vars)
            if (!d.find(v)) throw UnknownNode("unknown variable '" + v + "'");
        alpha = alpha_iss_cells(o.iss, d.schema(d.index_of(vars[0])).cardinality() *
                                           d.schema(d.index_of(vars[1])).cardinality());
    } else if (o.alpha_mode == "parent-product") {
        if (o.net.empty()) throw FormatError("--alpha-mode parent-product needs --net");
        alpha = alpha_parent_product(o.iss, load_network(o.net).network, pair);
    } else {
        throw FormatError("unknown --alpha-mode '" + o.alpha_mode + "'");
    }

    const auto post = posterior_from_query(d, ev, pair, alpha);
    McConfig cfg{o.chains, o.samples, o.seed, o.hpd};
    const auto summary = summarize(sample(post, cfg), cfg);
    std::uint64_t n = 0;
    for (auto c : post.counts) n += c;
    out << "rows in subset: " << n << "\n";
    out << "prior per cell: " << format_trimmed(alpha, 7) << "\n";
    out << format_summary(summary, post.cells);
    return kOk;
}

void add_graph_source(CLI::App* sub, Options& o) {
    sub->add_option("--net", o.net, "network document (JSON)");
    sub->add_option("--model", o.model, "model string, e.g. \"[A][B|A]\"");
    sub->add_option("--model-file", o.model_file, "file holding a model string");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Discrete Bayesian network toolkit", "bnkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("bnkit ") + BNKIT_VERSION);

    auto* pre = app.add_subcommand("preprocess", "apply a pipeline file to a CSV");
    pre->add_option("--data", o.data)->required();
    pre->add_option("--schema", o.schema)->required();
    pre->add_option("--pipeline", o.pipeline);
    pre->add_option("--out", o.out)->required();
    pre->add_option("--schema-out", o.schema_out, "default: OUT with extension .schema.json");
    pre->add_option("--missing", o.missing, "missing-value marker")->capture_default_str();

    auto* learn = app.add_subcommand("learn", "hill-climbing structure learning and CPT fit");
    learn->add_option("--data", o.data)->required();
    learn->add_option("--schema", o.schema)->required();
    learn->add_option("--score", o.score, "bic | aic | bdeu")->capture_default_str();
    learn->add_option("--iss", o.iss, "imaginary sample size for bdeu")->capture_default_str();
    learn->add_option("--blacklist", o.blacklist, "file of FROM,TO lines (FROM may be *)");
    learn->add_option("--whitelist", o.whitelist, "file of FROM,TO lines");
    learn->add_option("--roots", o.roots, "comma-separated codes that get no parents");
    learn->add_option("--only-parent", o.only_parent, "CHILD=P1:P2 restricts CHILD's parents");
    learn->add_option("--max-iter", o.max_iter);
    learn->add_option("--out", o.out, "network document to write");
    learn->add_option("--dot", o.dot, "DOT file to write");
    learn->add_option("--report", o.report_path, "also write the report here");
    learn->add_option("--fit", o.fit, "mle | bayes")->capture_default_str();
    learn->add_option("--fit-iss", o.fit_iss)->capture_default_str();
    learn->add_option("--missing", o.missing)->capture_default_str();

    auto* sum = app.add_subcommand("summarize", "model string and graph statistics");
    add_graph_source(sum, o);

    auto* q = app.add_subcommand("query", "exact conditional probability table");
    q->add_option("--net", o.net)->required();
    q->add_option("--targets", o.targets, "comma-separated codes")->required();
    q->add_option("--given", o.given, "VAR=LABEL,...");
    q->add_flag("--json", o.json);

    auto* dsep = app.add_subcommand("dsep", "d-separation test");
    add_graph_source(dsep, o);
    dsep->add_option("--x", o.x)->required();
    dsep->add_option("--y", o.y)->required();
    dsep->add_option("--z", o.z);

    auto* mb = app.add_subcommand("mb", "Markov blanket of a node");
    add_graph_source(mb, o);
    mb->add_option("--node", o.node)->required();

    auto* cpt = app.add_subcommand("cpt", "print one conditional probability table");
    cpt->add_option("--net", o.net)->required();
    cpt->add_option("--node", o.node)->required();

    auto* exp = app.add_subcommand("export", "graph as DOT");
    add_graph_source(exp, o);
    exp->add_option("--dot", o.dot, "output file (default stdout)");

    auto* post = app.add_subcommand("posterior", "Dirichlet posterior Monte Carlo for a two-way table");
    post->add_option("--data", o.data)->required();
    post->add_option("--schema", o.schema)->required();
    post->add_option("--filter", o.filter, "VAR=LABEL,... row filter");
    post->add_option("--vars", o.vars, "two codes, e.g. BB,AK")->required();
    auto* alpha_opt = post->add_option("--alpha", o.alpha, "prior per cell");
    post->add_option("--alpha-mode", o.alpha_mode, "iss-cells | parent-product")->excludes(alpha_opt)->capture_default_str();
    post->add_option("--iss", o.iss)->capture_default_str();
    post->add_option("--net", o.net, "network document, for parent-product");
    post->add_option("--chains", o.chains)->capture_default_str();
    post->add_option("--samples", o.samples)->capture_default_str();
    post->add_option("--seed", o.seed)->capture_default_str();
    post->add_option("--hpd", o.hpd)->capture_default_str();
    post->add_option("--missing", o.missing)->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*pre) return cmd_preprocess(o, out);
        if (*learn) return cmd_learn(o, out);
        if (*sum) return cmd_summarize(o, out);
        if (*q) return cmd_query(o, out);
        if (*dsep) return cmd_dsep(o, out);
        if (*mb) return cmd_mb(o, out);
        if (*cpt) return cmd_cpt(o, out);
        if (*exp) return cmd_export(o, out);
        if (*post) return cmd_posterior(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        switch (e.error_class()) {
            case ErrorClass::Usage: return kUsage;
            case ErrorClass::Data: return kData;
            case ErrorClass::Internal: return kInternal;
        }
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}

}  // namespace bnkit::cli
