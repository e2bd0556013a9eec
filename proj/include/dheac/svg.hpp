#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dheac {

// A labelled matrix; values[row][col], rows drawn top to bottom.
struct Heatmap {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> x_ticks;
    std::vector<std::string> y_ticks;
    std::vector<std::vector<double>> values;
    // Colours diverge around this value (blue below, red above).
    double pivot = 1.0;
};

// Cells with non-finite values are drawn grey and labelled "n/a".
void write_heatmap_svg(std::ostream& out, const Heatmap& map);

}  // namespace dheac
