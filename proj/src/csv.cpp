#include "bellflow/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace bellflow::csv {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[48];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 12);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("Table: no columns");
}

void Table::add_comment(std::string line) { comments_.push_back(std::move(line)); }

void Table::add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size())
        throw std::invalid_argument("Table: row width mismatch");
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows_.push_back(std::move(row));
}

void Table::add_row_strings(const std::vector<std::string>& values) {
    if (values.size() != columns_.size())
        throw std::invalid_argument("Table: row width mismatch");
    rows_.push_back(values);
}

std::string Table::to_string() const {
    std::string out;
    for (const auto& c : comments_) out += "# " + c + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ",";
        out += columns_[i];
    }
    out += "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += row[i];
        }
        out += "\n";
    }
    return out;
}

void Table::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("Table::write: cannot open " + path);
    f << to_string();
}

}  // namespace bellflow::csv
