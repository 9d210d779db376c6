#ifndef BNKIT_FORMAT_HPP
#define BNKIT_FORMAT_HPP

#include <span>
#include <string>
#include <vector>

namespace bnkit {

// Fixed notation with `decimals` digits, trailing zeros (and a bare '.') removed: 1.00000 -> "1".
std::string format_trimmed(double value, int decimals);

// Fixed notation with exactly `decimals` digits.
std::string format_fixed(double value, int decimals);

/// Smallest number of decimals that shows every value with `digits`
/// significant digits (fewer when a value is exact at lower precision),
/// i.e. the shared column width R uses when printing numeric vectors.
int common_decimals(std::span<const double> values, int digits = 7);

// Each value printed with common_decimals(values, digits).
std::vector<std::string> format_common(std::span<const double> values, int digits = 7);

struct ArrayDim {
    std::string name;
    std::vector<std::string> labels;
};

/// Prints a labelled array the way R prints tables: one dimension as a
/// named vector, two as a matrix (rows = first dimension, decimals chosen
/// per column), more as a sequence of ", , X = v" matrix slices with the
/// third dimension varying fastest and decimals shared by the whole array.
/// `values` are indexed mixed-radix with the first dimension most significant.
std::string format_array(const std::vector<ArrayDim>& dims, std::span<const double> values, int digits = 7);

std::string pad_left(const std::string& s, std::size_t width);
std::string pad_right(const std::string& s, std::size_t width);

}  // namespace bnkit

#endif  // BNKIT_FORMAT_HPP
