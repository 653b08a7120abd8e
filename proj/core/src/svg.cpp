#include "ekdiff/svg.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ekdiff/csv.hpp"
#include "ekdiff/errors.hpp"

namespace ekdiff {
namespace {

constexpr int kWidth = 860;
constexpr int kHeight = 540;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 25;
constexpr int kMarginTop = 45;
constexpr int kMarginBottom = 55;

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range padded(double lo, double hi) {
    if (!(hi > lo)) {
        const double c = lo;
        return {c - 1.0, c + 1.0};
    }
    const double pad = 0.04 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace

void write_svg_plot(std::ostream& os, const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label) {
    double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
    bool seen = false;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw DomainError("write_svg_plot: series length mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!seen) {
                xlo = xhi = s.x[i];
                ylo = yhi = s.y[i];
                seen = true;
            } else {
                xlo = std::min(xlo, s.x[i]);
                xhi = std::max(xhi, s.x[i]);
                ylo = std::min(ylo, s.y[i]);
                yhi = std::max(yhi, s.y[i]);
            }
        }
    }
    const Range xr = padded(xlo, xhi);
    const Range yr = padded(ylo, yhi);
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) { return kMarginLeft + plot_w * (x - xr.lo) / (xr.hi - xr.lo); };
    auto py = [&](double y) { return kMarginTop + plot_h * (yr.hi - y) / (yr.hi - yr.lo); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"26\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"17\">"
       << title << "</text>\n";

    // frame and min/max tick labels
    os << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
       << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << kMarginLeft << "\" y=\"" << kHeight - kMarginBottom + 20
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << format_double(xr.lo)
       << "</text>\n";
    os << "<text x=\"" << kWidth - kMarginRight << "\" y=\"" << kHeight - kMarginBottom + 20
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
       << format_double(xr.hi) << "</text>\n";
    os << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << kHeight - kMarginBottom
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
       << format_double(yr.lo) << "</text>\n";
    os << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << kMarginTop + 12
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
       << format_double(yr.hi) << "</text>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
       << "</text>\n";
    os << "<text x=\"18\" y=\"" << kHeight / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
          "transform=\"rotate(-90 18 "
       << kHeight / 2 << ")\">" << y_label << "</text>\n";

    int legend_y = kMarginTop + 16;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!first) os << ' ';
            os << format_double(px(s.x[i])) << ',' << format_double(py(s.y[i]));
            first = false;
        }
        os << "\"/>\n";
        if (!s.label.empty()) {
            os << "<text x=\"" << kWidth - kMarginRight - 8 << "\" y=\"" << legend_y
               << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
               << s.color << "\">" << s.label << "</text>\n";
            legend_y += 16;
        }
    }
    os << "</svg>\n";
}

}  // namespace ekdiff
