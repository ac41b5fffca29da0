#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <span>
#include <string>

#include "fission/error.hpp"
#include "fission/metric_space.hpp"

namespace fission {

inline constexpr std::array<const char*, 12> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
};

/// Scatter plot of 2-D points, one palette color per cluster id (cycling past
/// 12 clusters). Axes share one scale. Output bytes depend only on the inputs.
inline std::string render_svg(const Dataset& ds, std::span<const int> labels, double size = 640.0) {
    if (ds.dims() != 2) throw ValidationError("plot requires 2-D data");
    if (labels.size() != ds.size()) throw ValidationError("label count does not match point count");
    double xmin = ds.point(0)[0], xmax = xmin, ymin = ds.point(0)[1], ymax = ymin;
    for (Index i = 1; i < ds.size(); ++i) {
        xmin = std::min(xmin, ds.point(i)[0]);
        xmax = std::max(xmax, ds.point(i)[0]);
        ymin = std::min(ymin, ds.point(i)[1]);
        ymax = std::max(ymax, ds.point(i)[1]);
    }
    const double margin = 20.0;
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double scale = (size - 2 * margin) / span;

    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  size, size, size, size);
    out += buf;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (Index i = 0; i < ds.size(); ++i) {
        const double x = margin + (ds.point(i)[0] - xmin) * scale;
        const double y = size - margin - (ds.point(i)[1] - ymin) * scale;
        const int label = labels[i];
        const char* color = label < 0 ? "#000000" : kPalette[static_cast<std::size_t>(label) % kPalette.size()];
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>\n", x, y, color);
        out += buf;
    }
    out += "</svg>\n";
    return out;
}

} // namespace fission
