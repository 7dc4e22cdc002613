#include "anneal/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace anneal {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double to_unit(double v) const {
        double a = log ? std::log10(lo) : lo;
        double b = log ? std::log10(hi) : hi;
        double x = log ? std::log10(v) : v;
        return b > a ? (x - a) / (b - a) : 0.5;
    }
};

// Tick positions: decades for log axes, otherwise a 1/2/5 ladder chosen to
// give about five ticks.
std::vector<double> ticks_for(const Axis& axis) {
    std::vector<double> ticks;
    if (axis.log) {
        int d0 = int(std::floor(std::log10(axis.lo) + 1e-9));
        int d1 = int(std::ceil(std::log10(axis.hi) - 1e-9));
        for (int d = d0; d <= d1; ++d) {
            double v = std::pow(10.0, d);
            if (v >= axis.lo * (1 - 1e-12) && v <= axis.hi * (1 + 1e-12))
                ticks.push_back(v);
        }
        if (ticks.size() < 2) {
            ticks = {axis.lo, axis.hi};
        }
        return ticks;
    }
    double span = axis.hi - axis.lo;
    if (!(span > 0.0)) return {axis.lo};
    double raw = span / 5.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double norm = raw / mag;
    double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
    step *= mag;
    double first = std::ceil(axis.lo / step) * step;
    for (double v = first; v <= axis.hi + 0.5 * step; v += step)
        ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return ticks;
}

}  // namespace

std::string render_line_plot(std::span<const PlotSeries> series,
                             const PlotOptions& options) {
    const double margin_l = 64, margin_r = 16, margin_t = 34, margin_b = 46;
    const double w = options.width, h = options.height;
    const double plot_w = w - margin_l - margin_r;
    const double plot_h = h - margin_t - margin_b;

    Axis xaxis{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(), options.log_x};
    Axis yaxis{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(), options.log_y};
    bool any = false;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            double x = s.x[i], y = s.y[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (options.log_x && !(x > 0.0)) continue;
            if (options.log_y && !(y > 0.0)) continue;
            xaxis.lo = std::min(xaxis.lo, x);
            xaxis.hi = std::max(xaxis.hi, x);
            yaxis.lo = std::min(yaxis.lo, y);
            yaxis.hi = std::max(yaxis.hi, y);
            any = true;
        }
    }
    if (!any) {
        xaxis.lo = 0.0;
        xaxis.hi = 1.0;
        yaxis.lo = 0.0;
        yaxis.hi = 1.0;
    }
    if (xaxis.lo == xaxis.hi) {
        xaxis.lo -= 0.5;
        xaxis.hi += 0.5;
        if (options.log_x) {
            xaxis.lo = std::max(xaxis.lo + 0.5, 1e-12) / 2.0;
            xaxis.hi = (xaxis.hi - 0.5) * 2.0;
        }
    }
    if (yaxis.lo == yaxis.hi) {
        double pad = std::max(std::abs(yaxis.lo) * 0.1, 0.5);
        if (options.log_y) {
            yaxis.lo /= 2.0;
            yaxis.hi *= 2.0;
        } else {
            yaxis.lo -= pad;
            yaxis.hi += pad;
        }
    } else if (!options.log_y) {
        double pad = 0.05 * (yaxis.hi - yaxis.lo);
        yaxis.lo -= pad;
        yaxis.hi += pad;
    }

    auto px = [&](double v) { return margin_l + xaxis.to_unit(v) * plot_w; };
    auto py = [&](double v) {
        return margin_t + (1.0 - yaxis.to_unit(v)) * plot_h;
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
        << "\" height=\"" << options.height << "\" viewBox=\"0 0 "
        << options.width << ' ' << options.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<g font-family=\"Helvetica,Arial,sans-serif\" font-size=\"12\">\n";

    if (!options.title.empty())
        out << "<text x=\"" << fmt(w / 2) << "\" y=\"20\" "
               "text-anchor=\"middle\" font-size=\"14\">"
            << options.title << "</text>\n";

    // frame
    out << "<rect x=\"" << fmt(margin_l) << "\" y=\"" << fmt(margin_t)
        << "\" width=\"" << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
        << "\" fill=\"none\" stroke=\"#444\"/>\n";

    for (double t : ticks_for(xaxis)) {
        double x = px(t);
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(margin_t + plot_h)
            << "\" x2=\"" << fmt(x) << "\" y2=\""
            << fmt(margin_t + plot_h + 5) << "\" stroke=\"#444\"/>\n";
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(margin_t)
            << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(margin_t + plot_h)
            << "\" stroke=\"#eee\"/>\n";
        out << "<text x=\"" << fmt(x) << "\" y=\""
            << fmt(margin_t + plot_h + 18)
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    for (double t : ticks_for(yaxis)) {
        double y = py(t);
        out << "<line x1=\"" << fmt(margin_l - 5) << "\" y1=\"" << fmt(y)
            << "\" x2=\"" << fmt(margin_l) << "\" y2=\"" << fmt(y)
            << "\" stroke=\"#444\"/>\n";
        out << "<line x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(y)
            << "\" x2=\"" << fmt(margin_l + plot_w) << "\" y2=\"" << fmt(y)
            << "\" stroke=\"#eee\"/>\n";
        out << "<text x=\"" << fmt(margin_l - 8) << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }

    if (!options.x_label.empty())
        out << "<text x=\"" << fmt(margin_l + plot_w / 2) << "\" y=\""
            << fmt(h - 8) << "\" text-anchor=\"middle\">" << options.x_label
            << "</text>\n";
    if (!options.y_label.empty())
        out << "<text x=\"14\" y=\"" << fmt(margin_t + plot_h / 2)
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
            << fmt(margin_t + plot_h / 2) << ")\">" << options.y_label
            << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) /
                                           sizeof(kPalette[0]))];
        std::string points;
        auto flush = [&]() {
            if (points.empty()) return;
            out << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.6\" points=\"" << points << "\"/>\n";
            points.clear();
        };
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            double x = s.x[i], y = s.y[i];
            bool ok = std::isfinite(x) && std::isfinite(y) &&
                      (!options.log_x || x > 0.0) &&
                      (!options.log_y || y > 0.0);
            if (!ok) {
                flush();
                continue;
            }
            if (!points.empty()) points += ' ';
            points += fmt(px(x), "%.2f");
            points += ',';
            points += fmt(py(y), "%.2f");
        }
        flush();
    }

    // legend, top-right inside the frame
    double lx = margin_l + plot_w - 170, ly = margin_t + 10;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % (sizeof(kPalette) /
                                           sizeof(kPalette[0]))];
        double y = ly + 16.0 * double(si);
        out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(y + 4)
            << "\" x2=\"" << fmt(lx + 22) << "\" y2=\"" << fmt(y + 4)
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(y + 8)
            << "\">" << series[si].label << "</text>\n";
    }

    if (!options.stamp.empty())
        out << "<text x=\"" << fmt(w - 6) << "\" y=\"" << fmt(h - 4)
            << "\" text-anchor=\"end\" font-size=\"9\" fill=\"#999\">"
            << options.stamp << "</text>\n";
    out << "</g>\n</svg>\n";
    return out.str();
}

void write_line_plot(const std::filesystem::path& file,
                     std::span<const PlotSeries> series,
                     const PlotOptions& options) {
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + file.string() +
                                 " for writing");
    out << render_line_plot(series, options);
}

}  // namespace anneal
