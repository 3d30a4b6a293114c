// Self-contained SVG emission for sweep figures: line plots with optional
// reference lines, and value-grid heat maps. Plots are conveniences; the CSVs
// remain the data contract.

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bellflow::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color;       // CSS color
    bool dashed = false;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::optional<double> hline;   // horizontal reference
    std::optional<double> vline;   // vertical reference
    bool log_x = false;

    void write(const std::string& path) const;
    std::string to_string() const;
};

struct HeatMap {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;                    // cell centers, size nx
    std::vector<double> y;                    // cell centers, size ny
    std::vector<std::vector<double>> values;  // [iy][ix]

    void write(const std::string& path) const;
    std::string to_string() const;
};

}  // namespace bellflow::svg
