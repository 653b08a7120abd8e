#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ekdiff {

struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f6fb2";
    std::string label;
};

// Self-contained line plot: fixed canvas, linear axes spanning the data with
// a small margin, min/max tick labels, one polyline per series.  No external
// renderer is involved, so a given input always produces identical bytes.
void write_svg_plot(std::ostream& os, const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label);

}  // namespace ekdiff
