#include "bnkit/format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace bnkit {

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string format_trimmed(double value, int decimals) {
    auto s = format_fixed(value, decimals);
    if (s.find('.') != std::string::npos) {
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

namespace {

// Decimals needed to show `v` with at most `digits` significant digits,
// dropping digits that are zero after rounding.
int decimals_needed(double v, int digits) {
    if (v == 0.0 || !std::isfinite(v)) return 0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
    // buf = "d.ddddde[+-]xx"
    std::string s(buf);
    auto epos = s.find('e');
    const int exponent = std::atoi(s.c_str() + epos + 1);
    std::string mantissa = s.substr(0, epos);
    mantissa.erase(std::remove(mantissa.begin(), mantissa.end(), '.'), mantissa.end());
    if (!mantissa.empty() && mantissa.front() == '-') mantissa.erase(0, 1);
    while (mantissa.size() > 1 && mantissa.back() == '0') mantissa.pop_back();
    const int sig = static_cast<int>(mantissa.size());
    return std::max(0, sig - 1 - exponent);
}

}  // namespace

int common_decimals(std::span<const double> values, int digits) {
    int decimals = 0;
    for (double v : values) decimals = std::max(decimals, decimals_needed(v, digits));
    return std::min(decimals, 15);
}

std::vector<std::string> format_common(std::span<const double> values, int digits) {
    const int decimals = common_decimals(values, digits);
    std::vector<std::string> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(format_fixed(v, decimals));
    return out;
}

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

namespace {

// cells[row][col] already formatted.
void print_matrix(std::ostringstream& os, const ArrayDim& rows, const ArrayDim& cols,
                  const std::vector<std::vector<std::string>>& cells) {
    std::size_t row_width = rows.name.size();
    for (const auto& l : rows.labels) row_width = std::max(row_width, l.size());
    std::vector<std::size_t> col_width(cols.labels.size());
    for (std::size_t c = 0; c < cols.labels.size(); ++c) {
        col_width[c] = cols.labels[c].size();
        for (const auto& row : cells) col_width[c] = std::max(col_width[c], row[c].size());
    }
    os << std::string(row_width, ' ') << " " << cols.name << "\n";
    os << pad_right(rows.name, row_width);
    for (std::size_t c = 0; c < cols.labels.size(); ++c) os << " " << pad_left(cols.labels[c], col_width[c]);
    os << "\n";
    for (std::size_t r = 0; r < rows.labels.size(); ++r) {
        os << pad_right(rows.labels[r], row_width);
        for (std::size_t c = 0; c < cols.labels.size(); ++c) os << " " << pad_left(cells[r][c], col_width[c]);
        os << "\n";
    }
}

}  // namespace

std::string format_array(const std::vector<ArrayDim>& dims, std::span<const double> values, int digits) {
    std::ostringstream os;
    if (dims.empty()) {
        for (auto& s : format_common(values, digits)) os << s << "\n";
        return os.str();
    }
    if (dims.size() == 1) {
        const auto cells = format_common(values, digits);
        const auto& labels = dims[0].labels;
        os << dims[0].name << "\n";
        std::string head, body;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const auto w = std::max(labels[i].size(), cells[i].size());
            head += (i ? " " : "") + pad_left(labels[i], w);
            body += (i ? " " : "") + pad_left(cells[i], w);
        }
        os << head << "\n" << body << "\n";
        return os.str();
    }

    const std::size_t nrow = dims[0].labels.size();
    const std::size_t ncol = dims[1].labels.size();
    std::size_t inner = 1;  // stride of the column dimension
    for (std::size_t d = 2; d < dims.size(); ++d) inner *= dims[d].labels.size();
    auto value_at = [&](std::size_t r, std::size_t c, std::size_t block) {
        return values[(r * ncol + c) * inner + block];
    };

    if (dims.size() == 2) {
        std::vector<std::vector<std::string>> cells(nrow, std::vector<std::string>(ncol));
        for (std::size_t c = 0; c < ncol; ++c) {
            std::vector<double> column;
            for (std::size_t r = 0; r < nrow; ++r) column.push_back(value_at(r, c, 0));
            const int decimals = common_decimals(column, digits);
            for (std::size_t r = 0; r < nrow; ++r) cells[r][c] = format_fixed(column[r], decimals);
        }
        print_matrix(os, dims[0], dims[1], cells);
        return os.str();
    }

    const int decimals = common_decimals(values, digits);
    // Blocks enumerate dims[2..] with dims[2] varying fastest.
    std::vector<std::size_t> idx(dims.size() - 2, 0);
    for (std::size_t b = 0; b < inner; ++b) {
        std::size_t block = 0;
        for (std::size_t d = 2; d < dims.size(); ++d) block = block * dims[d].labels.size() + idx[d - 2];
        os << ", , ";
        for (std::size_t d = 2; d < dims.size(); ++d)
            os << (d > 2 ? ", " : "") << dims[d].name << " = " << dims[d].labels[idx[d - 2]];
        os << "\n\n";
        std::vector<std::vector<std::string>> cells(nrow, std::vector<std::string>(ncol));
        for (std::size_t r = 0; r < nrow; ++r)
            for (std::size_t c = 0; c < ncol; ++c) cells[r][c] = format_fixed(value_at(r, c, block), decimals);
        print_matrix(os, dims[0], dims[1], cells);
        os << "\n";
        for (std::size_t d = 0; d < idx.size(); ++d) {
            if (++idx[d] < dims[d + 2].labels.size()) break;
            idx[d] = 0;
        }
    }
    return os.str();
}

}  // namespace bnkit
