#include "polariton/io.hpp"

#include "polariton/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace polariton::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_number(double value) {
    if (value == 0.0) return "0";  // folds -0
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 12);
    return std::string(buf.data(), res.ptr);
}

double round_significant(double value) {
    if (!std::isfinite(value)) return value;
    return parse_number(format_number(value));
}

double parse_number(std::string_view text) {
    const auto t = trim(text);
    if (t == "nan") return std::nan("");
    if (t == "inf") return INFINITY;
    if (t == "-inf") return -INFINITY;
    std::string_view body = t;
    if (!body.empty() && body.front() == '+') body.remove_prefix(1);
    double value{};
    const auto res = std::from_chars(body.data(), body.data() + body.size(), value);
    if (res.ec != std::errc{} || res.ptr != body.data() + body.size() || body.empty()) {
        throw StructureError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

int CsvTable::find(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::size_t CsvTable::column(std::string_view name) const {
    const int idx = find(name);
    if (idx < 0) throw StructureError("CSV column '" + std::string(name) + "' not found");
    return static_cast<std::size_t>(idx);
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const {
    const auto idx = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(parse_number(row.at(idx)));
    return out;
}

CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = t.find(',', start);
            fields.emplace_back(trim(t.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != table.header.size()) {
                throw StructureError("CSV line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(table.header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
            }
            table.rows.push_back(std::move(fields));
        }
    }
    if (!have_header) throw StructureError("CSV input has no header line");
    return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StructureError("cannot open '" + path.string() + "'");
    return read_csv(in);
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << fields[i];
    }
    os << '\n';
}

}  // namespace polariton::io
