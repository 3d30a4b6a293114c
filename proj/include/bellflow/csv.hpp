// Locale-independent CSV emission: '#' metadata lines, one header row, then
// data. The data section (header row onward) is byte-stable for fixed inputs.

#pragma once

#include <string>
#include <vector>

namespace bellflow::csv {

std::string format_double(double v);

class Table {
public:
    explicit Table(std::vector<std::string> columns);

    /// Metadata emitted as '#'-prefixed lines above the header.
    void add_comment(std::string line);

    void add_row(const std::vector<double>& values);
    void add_row_strings(const std::vector<std::string>& values);

    std::size_t rows() const { return rows_.size(); }

    std::string to_string() const;
    void write(const std::string& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::string> comments_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace bellflow::csv
