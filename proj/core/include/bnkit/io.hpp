#ifndef BNKIT_IO_HPP
#define BNKIT_IO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bnkit/dataset.hpp"
#include "bnkit/params.hpp"
#include "bnkit/search.hpp"

namespace bnkit {

// Raw comma-separated text: a header plus string cells (RFC 4180 quoting).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(std::string_view name) const;
};

// Errors: RaggedRow (with the line number), FormatError for an unterminated quote.
CsvTable parse_csv(std::istream& in);
void write_csv(std::ostream& out, const CsvTable& t);
CsvTable read_csv_file(const std::filesystem::path& path);
void write_csv_file(const std::filesystem::path& path, const CsvTable& t);

/// A schema file entry. Numeric entries have no levels; their CSV column
/// holds raw numbers awaiting a discretize step.
struct SchemaEntry {
    VariableSchema schema;
    bool numeric = false;

    friend bool operator==(const SchemaEntry&, const SchemaEntry&) = default;
};

// {"variables": [{"code": .., "name": .., "levels": [..]}, {"code": .., "numeric": true}]}
std::vector<SchemaEntry> parse_schema(std::string_view json_text);
std::string schema_to_json(const std::vector<SchemaEntry>& entries);
std::vector<SchemaEntry> load_schema(const std::filesystem::path& path);
void save_schema(const std::filesystem::path& path, const std::vector<SchemaEntry>& entries);

/// Builds a Dataset from the columns named by `schemas` (other columns are
/// ignored). Cells equal to `missing` or empty become kMissing.
/// Errors: MissingColumn, UnknownLabel (with line and column).
Dataset dataset_from_csv(const CsvTable& t, const std::vector<VariableSchema>& schemas,
                         const std::string& missing = "NA");
CsvTable dataset_to_csv(const Dataset& d, const std::string& missing = "NA");
Dataset load_dataset(const std::filesystem::path& csv, const std::filesystem::path& schema,
                     const std::string& missing = "NA");

struct Provenance {
    std::string score;  // "BIC", "AIC", "BDEU" or empty
    double iss = 0.0;
    std::size_t n = 0;
    std::string constraints_digest;
    std::string tool_version;
    std::string fit;  // "mle" or "bayes"
    double fit_iss = 0.0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct SearchRecord {
    double score = 0.0;
    std::size_t iterations = 0;
    std::uint64_t score_calls = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t cache_misses = 0;
    std::vector<TraceStep> trace;
};

struct NetworkDocument {
    Network network;
    Provenance provenance;
    std::optional<SearchRecord> search;
};

// FNV-1a over the sorted blacklist and whitelist, as 16 hex digits.
std::string constraints_digest(const ArcConstraints& c);

std::string network_to_json(const NetworkDocument& doc);
// Errors: FormatError (with the offending field), plus Network validation errors.
NetworkDocument network_from_json(std::string_view json_text);
void save_network(const std::filesystem::path& path, const NetworkDocument& doc);
NetworkDocument load_network(const std::filesystem::path& path);

// Whole file as a string. Errors: FormatError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace bnkit

#endif  // BNKIT_IO_HPP
