#include "bellflow/svg.hpp"

#include "bellflow/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bellflow::svg {

namespace {

constexpr double kW = 640, kH = 440;
constexpr double kL = 70, kR = 20, kT = 40, kB = 55;

std::string num(double v) { return csv::format_double(v); }

void axis_ticks(std::ostringstream& s, double lo, double hi, bool horizontal,
                double plot_w, double plot_h, bool log_scale) {
    int nticks = 5;
    for (int i = 0; i <= nticks; ++i) {
        double f = double(i) / nticks;
        double v = log_scale ? std::pow(10.0, std::log10(lo) +
                                                  f * (std::log10(hi) - std::log10(lo)))
                             : lo + f * (hi - lo);
        std::ostringstream label;
        label.precision(3);
        label << v;
        if (horizontal) {
            double x = kL + f * plot_w;
            s << "<line x1='" << x << "' y1='" << kT + plot_h << "' x2='" << x
              << "' y2='" << kT + plot_h + 5 << "' stroke='black'/>\n";
            s << "<text x='" << x << "' y='" << kT + plot_h + 20
              << "' text-anchor='middle' font-size='11'>" << label.str()
              << "</text>\n";
        } else {
            double y = kT + plot_h - f * plot_h;
            s << "<line x1='" << kL - 5 << "' y1='" << y << "' x2='" << kL
              << "' y2='" << y << "' stroke='black'/>\n";
            s << "<text x='" << kL - 8 << "' y='" << y + 4
              << "' text-anchor='end' font-size='11'>" << label.str()
              << "</text>\n";
        }
    }
}

}  // namespace

std::string LinePlot::to_string() const {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& ser : series) {
        for (double v : ser.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : ser.y) {
            if (!std::isfinite(v)) continue;
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (hline) {
        ymin = std::min(ymin, *hline);
        ymax = std::max(ymax, *hline);
    }
    if (vline) {
        xmin = std::min(xmin, *vline);
        xmax = std::max(xmax, *vline);
    }
    if (!(xmax > xmin)) xmax = xmin + 1;
    if (!(ymax > ymin)) ymax = ymin + 1;
    double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double pw = kW - kL - kR, ph = kH - kT - kB;
    auto px = [&](double x) {
        double f = log_x ? (std::log10(x) - std::log10(xmin)) /
                               (std::log10(xmax) - std::log10(xmin))
                         : (x - xmin) / (xmax - xmin);
        return kL + f * pw;
    };
    auto py = [&](double y) { return kT + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream s;
    s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='"
      << kH << "' viewBox='0 0 " << kW << " " << kH << "'>\n";
    s << "<rect width='100%' height='100%' fill='white'/>\n";
    s << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' font-size='14'>"
      << title << "</text>\n";
    s << "<rect x='" << kL << "' y='" << kT << "' width='" << pw << "' height='"
      << ph << "' fill='none' stroke='black'/>\n";
    axis_ticks(s, xmin, xmax, true, pw, ph, log_x);
    axis_ticks(s, ymin, ymax, false, pw, ph, false);
    s << "<text x='" << kL + pw / 2 << "' y='" << kH - 12
      << "' text-anchor='middle' font-size='12'>" << x_label << "</text>\n";
    s << "<text x='16' y='" << kT + ph / 2
      << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
      << kT + ph / 2 << ")'>" << y_label << "</text>\n";

    if (hline && *hline >= ymin && *hline <= ymax)
        s << "<line x1='" << kL << "' y1='" << py(*hline) << "' x2='" << kL + pw
          << "' y2='" << py(*hline)
          << "' stroke='black' stroke-width='1.2' stroke-dasharray='2,2'/>\n";
    if (vline && *vline >= xmin && *vline <= xmax)
        s << "<line x1='" << px(*vline) << "' y1='" << kT << "' x2='"
          << px(*vline) << "' y2='" << kT + ph
          << "' stroke='gray' stroke-dasharray='5,3'/>\n";

    double ly = kT + 14;
    for (const auto& ser : series) {
        std::ostringstream pts;
        bool pen_up = true;
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            if (!std::isfinite(ser.y[i])) {
                pen_up = true;
                continue;
            }
            pts << (pen_up ? "M" : "L") << num(px(ser.x[i])) << " "
                << num(py(ser.y[i])) << " ";
            pen_up = false;
        }
        s << "<path d='" << pts.str() << "' fill='none' stroke='" << ser.color
          << "' stroke-width='1.6'"
          << (ser.dashed ? " stroke-dasharray='6,3'" : "") << "/>\n";
        s << "<line x1='" << kL + pw - 150 << "' y1='" << ly << "' x2='"
          << kL + pw - 130 << "' y2='" << ly << "' stroke='" << ser.color
          << "' stroke-width='2'" << (ser.dashed ? " stroke-dasharray='6,3'" : "")
          << "/>\n";
        s << "<text x='" << kL + pw - 125 << "' y='" << ly + 4
          << "' font-size='11'>" << ser.name << "</text>\n";
        ly += 16;
    }
    s << "</svg>\n";
    return s.str();
}

std::string HeatMap::to_string() const {
    if (values.size() != y.size())
        throw std::invalid_argument("HeatMap: values/y size mismatch");
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (const auto& row : values)
        for (double v : row)
            if (std::isfinite(v)) {
                vmin = std::min(vmin, v);
                vmax = std::max(vmax, v);
            }
    if (!(vmax > vmin)) vmax = vmin + 1;

    const double pw = kW - kL - kR - 50, ph = kH - kT - kB;
    const double cw = pw / double(x.size()), chh = ph / double(y.size());

    auto color = [&](double v) {
        if (!std::isfinite(v)) return std::string("rgb(210,210,210)");
        double f = (v - vmin) / (vmax - vmin);
        // dark blue -> yellow
        int r = int(40 + 215 * f);
        int g = int(40 + 190 * f);
        int b = int(120 - 90 * f + 60 * (1 - f));
        return "rgb(" + std::to_string(r) + "," + std::to_string(g) + "," +
               std::to_string(b) + ")";
    };

    std::ostringstream s;
    s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='"
      << kH << "' viewBox='0 0 " << kW << " " << kH << "'>\n";
    s << "<rect width='100%' height='100%' fill='white'/>\n";
    s << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' font-size='14'>"
      << title << "</text>\n";
    for (std::size_t iy = 0; iy < y.size(); ++iy)
        for (std::size_t ix = 0; ix < x.size(); ++ix)
            s << "<rect x='" << kL + ix * cw << "' y='" << kT + (y.size() - 1 - iy) * chh
              << "' width='" << cw + 0.5 << "' height='" << chh + 0.5 << "' fill='"
              << color(values[iy][ix]) << "'/>\n";
    s << "<rect x='" << kL << "' y='" << kT << "' width='" << pw << "' height='"
      << ph << "' fill='none' stroke='black'/>\n";
    // min/max labels on the edges
    s << "<text x='" << kL << "' y='" << kH - 28 << "' font-size='11'>" << x_label
      << ": " << num(x.front()) << " .. " << num(x.back()) << "</text>\n";
    s << "<text x='" << kL << "' y='" << kH - 12 << "' font-size='11'>" << y_label
      << ": " << num(y.front()) << " .. " << num(y.back()) << "</text>\n";
    // colorbar
    for (int i = 0; i < 60; ++i) {
        double f = double(i) / 59.0;
        s << "<rect x='" << kL + pw + 18 << "' y='" << kT + ph - (i + 1) * ph / 60
          << "' width='14' height='" << ph / 60 + 0.5 << "' fill='"
          << color(vmin + f * (vmax - vmin)) << "'/>\n";
    }
    s << "<text x='" << kL + pw + 18 << "' y='" << kT - 6 << "' font-size='10'>"
      << num(vmax) << "</text>\n";
    s << "<text x='" << kL + pw + 18 << "' y='" << kT + ph + 12
      << "' font-size='10'>" << num(vmin) << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

void LinePlot::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("LinePlot::write: cannot open " + path);
    f << to_string();
}

void HeatMap::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("HeatMap::write: cannot open " + path);
    f << to_string();
}

}  // namespace bellflow::svg
