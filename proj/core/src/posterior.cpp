#include "bnkit/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

#include "bnkit/error.hpp"
#include "bnkit/format.hpp"

namespace bnkit {

void validate(const DirichletPosterior& p) {
    if (p.cells.size() < 2) throw FormatError("a Dirichlet posterior needs at least two cells");
    if (p.counts.size() != p.cells.size() || p.alpha.size() != p.cells.size())
        throw FormatError("cells, counts and alpha differ in length");
    for (double a : p.alpha)
        if (!(a > 0.0) || !std::isfinite(a)) throw FormatError("Dirichlet prior parameters must be positive");
}

DirichletPosterior posterior_from_query(const Dataset& d, const Evidence& rows_filter,
                                        const std::pair<NodeId, NodeId>& vars, double alpha_scalar) {
    if (!(alpha_scalar > 0.0) || !std::isfinite(alpha_scalar))
        throw ConstraintViolation("prior parameter must be positive");
    if (vars.first == vars.second) throw OverlapError("posterior needs two distinct variables");

    auto column_of = [&](const NodeId& code) {
        auto j = d.find(code);
        if (!j) throw UnknownNode("unknown variable '" + code + "'");
        return *j;
    };
    const auto a = column_of(vars.first);
    const auto b = column_of(vars.second);
    std::vector<std::pair<std::size_t, Level>> filter;
    for (const auto& [code, level] : rows_filter) {
        const auto j = column_of(code);
        if (level >= d.schema(j).cardinality()) throw FormatError("level index out of range for '" + code + "'");
        filter.emplace_back(j, static_cast<Level>(level));
    }

    std::vector<NodeId> missing;
    for (auto j : {a, b}) {
        const auto& col = d.column(j);
        if (std::find(col.begin(), col.end(), kMissing) != col.end()) missing.push_back(d.schema(j).code);
    }
    if (!missing.empty()) {
        std::string names;
        for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
        throw MissingData("missing values in " + names);
    }

    const auto ra = d.schema(a).cardinality();
    const auto rb = d.schema(b).cardinality();
    DirichletPosterior p;
    p.counts.assign(ra * rb, 0);
    std::uint64_t kept = 0;
    for (std::size_t row = 0; row < d.rows(); ++row) {
        bool match = true;
        for (const auto& [j, level] : filter) match = match && d.at(row, j) == level;
        if (!match) continue;
        const auto ka = static_cast<std::size_t>(d.at(row, a));
        const auto kb = static_cast<std::size_t>(d.at(row, b));
        ++p.counts[kb * ra + ka];
        ++kept;
    }
    if (kept == 0) throw EmptySubset("no rows match the filter");

    for (std::size_t kb = 0; kb < rb; ++kb)
        for (std::size_t ka = 0; ka < ra; ++ka)
            p.cells.push_back(vars.first + "=" + d.schema(a).levels[ka] + "," + vars.second + "=" +
                              d.schema(b).levels[kb]);
    p.alpha.assign(p.cells.size(), alpha_scalar);
    validate(p);
    return p;
}

double alpha_iss_cells(double iss, std::size_t cells) {
    if (!(iss > 0.0) || cells == 0) throw ConstraintViolation("imaginary sample size and cell count must be positive");
    return iss / static_cast<double>(cells);
}

double alpha_parent_product(double iss, const Network& net, const std::pair<NodeId, NodeId>& vars) {
    if (!(iss > 0.0)) throw ConstraintViolation("imaginary sample size must be positive");
    const auto& g = net.dag();
    double denom = static_cast<double>(net.cardinality(g.index_of(vars.first)));
    for (auto p : g.parents(g.index_of(vars.second))) denom *= static_cast<double>(net.cardinality(p));
    return iss / denom;
}

void validate(const McConfig& cfg) {
    if (cfg.chains == 0 || cfg.samples_per_chain == 0)
        throw ConstraintViolation("chains and samples per chain must be positive");
    if (!(cfg.hpd_prob > 0.0 && cfg.hpd_prob < 1.0)) throw ConstraintViolation("HPD probability must lie in (0,1)");
}

Draws sample(const DirichletPosterior& p, const McConfig& cfg) {
    validate(p);
    validate(cfg);
    Draws out{cfg.chains, cfg.samples_per_chain, p.cells.size(), {}};
    out.values.resize(out.chains * out.samples * out.cells);

    auto run_chain = [&](std::size_t chain) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(chain)};
        std::mt19937_64 rng(seq);
        std::vector<std::gamma_distribution<double>> gammas;
        for (std::size_t k = 0; k < out.cells; ++k)
            gammas.emplace_back(static_cast<double>(p.counts[k]) + p.alpha[k], 1.0);
        double* base = out.values.data() + chain * out.samples * out.cells;
        for (std::size_t s = 0; s < out.samples; ++s) {
            double* row = base + s * out.cells;
            double total = 0.0;
            // redraw on a zero total
            do {
                total = 0.0;
                for (std::size_t k = 0; k < out.cells; ++k) total += row[k] = gammas[k](rng);
            } while (!(total > 0.0));
            for (std::size_t k = 0; k < out.cells; ++k) row[k] /= total;
        }
    };

    if (cfg.chains == 1) {
        run_chain(0);
    } else {
        std::vector<std::thread> workers;
        for (std::size_t c = 0; c < cfg.chains; ++c) workers.emplace_back(run_chain, c);
        for (auto& w : workers) w.join();
    }
    return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ConstraintViolation("quantile of an empty sample");
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::pair<double, double> hpd_sorted(const std::vector<double>& sorted, double prob) {
    if (sorted.empty()) throw ConstraintViolation("HPD of an empty sample");
    const auto n = sorted.size();
    auto m = static_cast<std::size_t>(std::ceil(prob * static_cast<double>(n)));
    m = std::clamp<std::size_t>(m, 1, n);
    std::size_t best = 0;
    double width = sorted[m - 1] - sorted[0];
    for (std::size_t i = 1; i + m <= n; ++i) {
        const double w = sorted[i + m - 1] - sorted[i];
        if (w < width) {
            width = w;
            best = i;
        }
    }
    return {sorted[best], sorted[best + m - 1]};
}

PosteriorSummary summarize(const Draws& draws, const McConfig& cfg) {
    if (draws.values.empty()) throw ConstraintViolation("no draws to summarize");
    PosteriorSummary s{draws.chains, draws.samples, cfg.hpd_prob, {}};
    const auto total = draws.chains * draws.samples;
    const auto batches = std::min<std::size_t>(100, draws.samples);
    const auto batch_size = draws.samples / batches;

    for (std::size_t k = 0; k < draws.cells; ++k) {
        CellSummary cs;
        std::vector<double> pooled;
        pooled.reserve(total);
        for (std::size_t c = 0; c < draws.chains; ++c)
            for (std::size_t i = 0; i < draws.samples; ++i) pooled.push_back(draws.at(c, i, k));

        double sum = 0.0;
        for (double v : pooled) sum += v;
        cs.mean = sum / static_cast<double>(total);
        double ss = 0.0;
        for (double v : pooled) ss += (v - cs.mean) * (v - cs.mean);
        cs.sd = total > 1 ? std::sqrt(ss / static_cast<double>(total - 1)) : 0.0;
        cs.naive_se = cs.sd / std::sqrt(static_cast<double>(total));

        // batch means: per-chain estimate of the variance of the mean, averaged over chains
        double var_sum = 0.0;
        for (std::size_t c = 0; c < draws.chains; ++c) {
            std::vector<double> means(batches, 0.0);
            for (std::size_t b = 0; b < batches; ++b) {
                for (std::size_t i = 0; i < batch_size; ++i) means[b] += draws.at(c, b * batch_size + i, k);
                means[b] /= static_cast<double>(batch_size);
            }
            double m = 0.0;
            for (double v : means) m += v;
            m /= static_cast<double>(batches);
            double v = 0.0;
            for (double x : means) v += (x - m) * (x - m);
            if (batches > 1) v /= static_cast<double>(batches - 1);
            var_sum += v * static_cast<double>(batch_size);
        }
        cs.ts_se = std::sqrt(var_sum / static_cast<double>(draws.chains) / static_cast<double>(total));

        std::sort(pooled.begin(), pooled.end());
        for (std::size_t q = 0; q < kQuantileProbs.size(); ++q) cs.quantiles[q] = quantile_sorted(pooled, kQuantileProbs[q]);

        for (std::size_t c = 0; c < draws.chains; ++c) {
            std::vector<double> chain(draws.samples);
            for (std::size_t i = 0; i < draws.samples; ++i) chain[i] = draws.at(c, i, k);
            std::sort(chain.begin(), chain.end());
            cs.hpd.push_back(hpd_sorted(chain, cfg.hpd_prob));
        }
        s.cells.push_back(std::move(cs));
    }
    return s;
}

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// Row names plus right-aligned columns, one header per column.
void print_table(std::ostringstream& os, const std::vector<std::string>& rows, const std::vector<std::string>& headers,
                 const std::vector<std::vector<std::string>>& columns) {
    std::size_t name_width = 0;
    for (const auto& r : rows) name_width = std::max(name_width, r.size());
    std::vector<std::size_t> widths;
    for (std::size_t c = 0; c < headers.size(); ++c) {
        std::size_t w = headers[c].size();
        for (const auto& cell : columns[c]) w = std::max(w, cell.size());
        widths.push_back(w);
    }
    os << std::string(name_width, ' ');
    for (std::size_t c = 0; c < headers.size(); ++c) os << " " << pad_left(headers[c], widths[c]);
    os << "\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        os << pad_right(rows[r], name_width);
        for (std::size_t c = 0; c < headers.size(); ++c) os << " " << pad_left(columns[c][r], widths[c]);
        os << "\n";
    }
}

std::vector<std::string> column_fixed(const std::vector<double>& values, int digits) {
    const int decimals = common_decimals(values, digits);
    std::vector<std::string> out;
    for (double v : values) out.push_back(format_fixed(v, decimals));
    return out;
}

}  // namespace

std::string format_summary(const PosteriorSummary& s, const std::vector<std::string>& cell_labels) {
    std::ostringstream os;
    std::vector<std::string> names;
    for (std::size_t k = 0; k < s.cells.size(); ++k) names.push_back("pi." + std::to_string(k + 1));

    os << "\nIterations = 1:" << s.samples << "\n";
    os << "Thinning interval = 1\n";
    os << "Number of chains = " << s.chains << "\n";
    os << "Sample size per chain = " << s.samples << "\n\n";

    os << "1. Empirical mean and standard deviation for each variable,\n";
    os << "   plus standard error of the mean:\n\n";
    std::vector<double> mean, sd;
    std::vector<std::string> naive, ts;
    for (const auto& c : s.cells) {
        mean.push_back(c.mean);
        sd.push_back(c.sd);
        naive.push_back(sci(c.naive_se));
        ts.push_back(sci(c.ts_se));
    }
    print_table(os, names, {"Mean", "SD", "Naive SE", "Time-series SE"},
                {column_fixed(mean, 4), column_fixed(sd, 4), naive, ts});

    os << "\n2. Quantiles for each variable:\n\n";
    std::vector<std::vector<std::string>> qcols;
    for (std::size_t q = 0; q < kQuantileProbs.size(); ++q) {
        std::vector<double> col;
        for (const auto& c : s.cells) col.push_back(c.quantiles[q]);
        qcols.push_back(column_fixed(col, 4));
    }
    print_table(os, names, {"2.5%", "25%", "50%", "75%", "97.5%"}, qcols);

    for (std::size_t chain = 0; chain < s.chains; ++chain) {
        os << "\n[[" << chain + 1 << "]]\n";
        std::vector<double> lower, upper;
        for (const auto& c : s.cells) {
            lower.push_back(c.hpd[chain].first);
            upper.push_back(c.hpd[chain].second);
        }
        print_table(os, names, {"lower", "upper"}, {column_fixed(lower, 7), column_fixed(upper, 7)});
        os << "attr(,\"Probability\")\n[1] " << format_trimmed(s.hpd_prob, 5) << "\n";
    }

    if (!cell_labels.empty()) {
        os << "\ncells:\n";
        for (std::size_t k = 0; k < cell_labels.size() && k < names.size(); ++k)
            os << pad_right(names[k], 6) << cell_labels[k] << "\n";
    }
    return os.str();
}

}  // namespace bnkit
