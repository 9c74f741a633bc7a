#pragma once

#include <string>
#include <utility>
#include <vector>

// Minimal SVG line plots for report emission (width-vs-n, tail curves).
// Data-only output; no interactive surface.

namespace growthlab::svg {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

std::string render(const LinePlot& plot, int width = 640, int height = 420);

}  // namespace growthlab::svg
