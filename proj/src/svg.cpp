#include "dheac/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace dheac {

namespace {

constexpr int kCell = 64;
constexpr int kLeft = 90;
constexpr int kTop = 50;
constexpr int kBottom = 60;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string rgb(double t) {
    // t in [-1, 1]: -1 blue, 0 white, 1 red.
    t = std::clamp(t, -1.0, 1.0);
    const auto channel = [](double v) { return static_cast<int>(std::lround(255.0 * v)); };
    double r = 1.0, g = 1.0, b = 1.0;
    if (t < 0) {
        r = 1.0 + 0.8 * t;
        g = 1.0 + 0.5 * t;
    } else {
        g = 1.0 - 0.6 * t;
        b = 1.0 - 0.8 * t;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "rgb(%d,%d,%d)", channel(r), channel(g), channel(b));
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

void write_heatmap_svg(std::ostream& out, const Heatmap& map) {
    const std::size_t rows = map.y_ticks.size();
    const std::size_t cols = map.x_ticks.size();
    if (map.values.size() != rows) throw std::invalid_argument("heatmap: row count mismatch");
    for (const auto& row : map.values)
        if (row.size() != cols) throw std::invalid_argument("heatmap: column count mismatch");

    // Symmetric log scale around the pivot so ratios 0.5 and 2 get equal weight.
    double span = 0.0;
    for (const auto& row : map.values)
        for (double v : row)
            if (std::isfinite(v) && v > 0 && map.pivot > 0) span = std::max(span, std::abs(std::log(v / map.pivot)));
    if (span == 0.0) span = 1.0;

    const int width = kLeft + static_cast<int>(cols) * kCell + 20;
    const int height = kTop + static_cast<int>(rows) * kCell + kBottom;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(map.title)
        << "</text>\n";
    for (std::size_t r = 0; r < rows; ++r) {
        const int y = kTop + static_cast<int>(r) * kCell;
        out << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + kCell / 2 + 4 << "\" text-anchor=\"end\">"
            << escape(map.y_ticks[r]) << "</text>\n";
        for (std::size_t c = 0; c < cols; ++c) {
            const int x = kLeft + static_cast<int>(c) * kCell;
            const double v = map.values[r][c];
            const bool ok = std::isfinite(v) && v > 0 && map.pivot > 0;
            const std::string fill = ok ? rgb(std::log(v / map.pivot) / span) : "rgb(200,200,200)";
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\"" << kCell
                << "\" fill=\"" << fill << "\" stroke=\"white\"/>\n";
            out << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4 << "\" text-anchor=\"middle\">"
                << (ok || std::isfinite(v) ? label(v) : "n/a") << "</text>\n";
        }
    }
    const int base = kTop + static_cast<int>(rows) * kCell;
    for (std::size_t c = 0; c < cols; ++c)
        out << "<text x=\"" << kLeft + static_cast<int>(c) * kCell + kCell / 2 << "\" y=\"" << base + 16
            << "\" text-anchor=\"middle\">" << escape(map.x_ticks[c]) << "</text>\n";
    out << "<text x=\"" << kLeft + static_cast<int>(cols) * kCell / 2 << "\" y=\"" << base + 40
        << "\" text-anchor=\"middle\">" << escape(map.x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << kTop + static_cast<int>(rows) * kCell / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << kTop + static_cast<int>(rows) * kCell / 2 << ")\">" << escape(map.y_label) << "</text>\n";
    out << "</svg>\n";
}

}  // namespace dheac
