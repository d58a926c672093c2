#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace polariton::io {

// 12 significant digits, '.' decimal separator, independent of the locale.
std::string format_number(double value);
// Rounds to the same 12 significant digits used by format_number.
double round_significant(double value);

double parse_number(std::string_view text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column, or -1.
    int find(std::string_view name) const;
    // Index of a header column; throws StructureError when absent.
    std::size_t column(std::string_view name) const;
    std::vector<double> numeric_column(std::string_view name) const;
};

// Comma-separated with a header line.  Blank lines and lines starting with
// '#' are skipped; fields are whitespace-trimmed.
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::filesystem::path& path);

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace polariton::io
