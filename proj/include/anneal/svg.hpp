#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace anneal {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 760;
    int height = 480;
    // Rendered in the footer when nonempty; stays empty by default so
    // repeated runs emit byte-identical files.
    std::string stamp;
};

// Renders series as polylines with axes, ticks and a legend. Non-finite
// points are skipped (breaking the polyline). Output is self-contained SVG.
std::string render_line_plot(std::span<const PlotSeries> series,
                             const PlotOptions& options);

void write_line_plot(const std::filesystem::path& file,
                     std::span<const PlotSeries> series,
                     const PlotOptions& options);

}  // namespace anneal
