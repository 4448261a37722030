#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace gfou {

/// Shortest round-trip-safe text for a double: 17 significant digits, '.'
/// as the decimal separator regardless of locale.
std::string format_double(double v);

/// Writes a comment line, a header row and data rows.
class CsvWriter {
public:
    /// `comment` is emitted as "# comment" when non-empty.
    CsvWriter(std::ostream& out, std::string_view comment, std::vector<std::string> columns);

    /// Throws std::invalid_argument when the cell count differs from the
    /// header.
    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& values);

    std::size_t columns() const { return columns_; }

private:
    std::ostream& out_;
    std::size_t columns_;
};

/// 64-bit FNV-1a hash, used to tag outputs with their configuration.
std::uint64_t fnv1a64(std::string_view data);

std::string hex64(std::uint64_t v);

}  // namespace gfou
