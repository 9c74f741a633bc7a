#include "growthlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace growthlab::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(5);
    os << v;
    return os.str();
}

}  // namespace

std::string render(const LinePlot& plot, int width, int height) {
    const double ml = 60, mr = 20, mt = 36, mb = 46;
    const double pw = width - ml - mr, ph = height - mt - mb;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : plot.series) {
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    const auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
       << "' viewBox='0 0 " << width << " " << height << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << width / 2 << "' y='20' text-anchor='middle' font-size='14'>"
       << plot.title << "</text>\n";
    // Axes with four ticks per side.
    os << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='" << mt + ph
       << "' stroke='black'/>\n";
    os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << mt + ph
       << "' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x='" << px(fx) << "' y='" << mt + ph + 18
           << "' text-anchor='middle' font-size='11'>" << fmt(fx) << "</text>\n";
        os << "<text x='" << ml - 6 << "' y='" << py(fy) + 4
           << "' text-anchor='end' font-size='11'>" << fmt(fy) << "</text>\n";
        os << "<line x1='" << px(fx) << "' y1='" << mt + ph << "' x2='" << px(fx) << "' y2='"
           << mt + ph + 4 << "' stroke='black'/>\n";
        os << "<line x1='" << ml - 4 << "' y1='" << py(fy) << "' x2='" << ml << "' y2='" << py(fy)
           << "' stroke='black'/>\n";
    }
    os << "<text x='" << ml + pw / 2 << "' y='" << height - 8
       << "' text-anchor='middle' font-size='12'>" << plot.x_label << "</text>\n";
    os << "<text x='14' y='" << mt + ph / 2 << "' text-anchor='middle' font-size='12' transform='rotate(-90 14 "
       << mt + ph / 2 << ")'>" << plot.y_label << "</text>\n";

    int color = 0;
    double legend_y = mt + 12;
    for (const auto& s : plot.series) {
        const char* stroke = kPalette[color % 6];
        os << "<polyline fill='none' stroke='" << stroke << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : s.points) os << fmt(px(x)) << "," << fmt(py(y)) << " ";
        os << "'/>\n";
        for (const auto& [x, y] : s.points)
            os << "<circle cx='" << fmt(px(x)) << "' cy='" << fmt(py(y)) << "' r='2.5' fill='"
               << stroke << "'/>\n";
        if (!s.name.empty()) {
            os << "<text x='" << ml + pw - 4 << "' y='" << legend_y
               << "' text-anchor='end' font-size='11' fill='" << stroke << "'>" << s.name
               << "</text>\n";
            legend_y += 14;
        }
        ++color;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace growthlab::svg
