#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "levysde/csv.hpp"
#include "levysde/errors.hpp"

namespace levysde {

struct SvgSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal line chart, enough for the diagnostic plots the CLI emits.
// log_y plots log10 of the values; nonpositive points are skipped there.
inline void write_svg_chart(const std::filesystem::path& file,
                            const std::string& title,
                            const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<SvgSeries>& series,
                            bool log_y = false) {
    constexpr double kW = 640, kH = 420, kMargin = 56;
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};

    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool any = false;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (log_y) {
                if (!(y > 0.0)) continue;
                y = std::log10(y);
            }
            if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
            if (!any) {
                x_min = x_max = s.x[i];
                y_min = y_max = y;
                any = true;
            } else {
                x_min = std::min(x_min, s.x[i]);
                x_max = std::max(x_max, s.x[i]);
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
        }
    if (x_max <= x_min) x_max = x_min + 1;
    if (y_max <= y_min) y_max = y_min + 1;

    auto px = [&](double x) {
        return kMargin + (x - x_min) / (x_max - x_min) * (kW - 2 * kMargin);
    };
    auto py = [&](double y) {
        return kH - kMargin - (y - y_min) / (y_max - y_min) * (kH - 2 * kMargin);
    };

    std::ofstream out(file);
    if (!out) throw UsageError("cannot open output file: " + file.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
        << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title
        << "</text>\n";
    // Axes
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\""
        << kW - kMargin << "\" y2=\"" << kH - kMargin
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\""
        << kMargin << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << kH / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\" transform=\"rotate(-90 16 "
        << kH / 2 << ")\">" << (log_y ? "log10 " + y_label : y_label)
        << "</text>\n";
    // Ticks
    for (int i = 0; i <= 4; ++i) {
        const double xv = x_min + (x_max - x_min) * i / 4.0;
        const double yv = y_min + (y_max - y_min) * i / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << kH - kMargin + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"10\">"
            << format_double(std::round(xv * 1e3) / 1e3) << "</text>\n";
        out << "<text x=\"" << kMargin - 6 << "\" y=\"" << py(yv) + 3
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"10\">"
            << format_double(std::round(yv * 1e3) / 1e3) << "</text>\n";
    }
    // Series
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            double y = series[s].y[i];
            if (log_y) {
                if (!(y > 0.0)) continue;
                y = std::log10(y);
            }
            out << px(series[s].x[i]) << "," << py(y) << " ";
        }
        out << "\"/>\n";
        out << "<text x=\"" << kW - kMargin + 4 << "\" y=\""
            << kMargin + 14 * static_cast<double>(s)
            << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" << color
            << "\">" << series[s].name << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace levysde
