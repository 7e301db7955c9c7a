#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "fkpp/errors.hpp"

namespace fkpp {

/// Minimal hand-rolled SVG line plot: axes, tick labels, one polyline per
/// series. Enough to eyeball final-state curves; nothing interactive.
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add_series(std::string name, std::vector<double> x, std::vector<double> y) {
        require(x.size() == y.size() && !x.empty(), "series needs matching nonempty x/y");
        series_.push_back({std::move(name), std::move(x), std::move(y)});
    }

    void write(const std::string& path) const {
        require(!series_.empty(), "plot needs at least one series");
        double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
        double y0 = x0, y1 = -x0;
        for (const auto& s : series_) {
            for (double v : s.x) { x0 = std::min(x0, v); x1 = std::max(x1, v); }
            for (double v : s.y) { y0 = std::min(y0, v); y1 = std::max(y1, v); }
        }
        if (x1 == x0) x1 = x0 + 1;
        if (y1 == y0) y1 = y0 + 1;
        y1 += 0.05 * (y1 - y0);  // headroom

        const double W = 760, H = 480, L = 70, R = 20, T = 40, B = 50;
        auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
        auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

        std::ofstream out(path);
        if (!out) throw Error("cannot open " + path + " for writing");
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
            << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
            << title_ << "</text>\n";
        // axes
        out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
            << H - B << "\" stroke=\"black\"/>\n"
            << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
            << "\" stroke=\"black\"/>\n";
        for (int k = 0; k <= 4; ++k) {
            const double xv = x0 + k * (x1 - x0) / 4;
            const double yv = y0 + k * (y1 - y0) / 4;
            out << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18
                << "\" text-anchor=\"middle\" font-size=\"11\">" << short_num(xv) << "</text>\n"
                << "<text x=\"" << L - 8 << "\" y=\"" << py(yv) + 4
                << "\" text-anchor=\"end\" font-size=\"11\">" << short_num(yv) << "</text>\n";
        }
        out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
            << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel_ << "</text>\n"
            << "<text x=\"16\" y=\"" << (T + H - B) / 2
            << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
            << (T + H - B) / 2 << ")\">" << ylabel_ << "</text>\n";

        static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
        for (std::size_t si = 0; si < series_.size(); ++si) {
            const auto& s = series_[si];
            out << "<polyline fill=\"none\" stroke=\"" << colors[si % 5]
                << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            out << "\"/>\n";
            out << "<text x=\"" << W - R - 6 << "\" y=\"" << T + 16 + 16 * si
                << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << colors[si % 5] << "\">"
                << s.name << "</text>\n";
        }
        out << "</svg>\n";
    }

  private:
    struct Series {
        std::string name;
        std::vector<double> x, y;
    };

    static std::string short_num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return buf;
    }

    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
};

}  // namespace fkpp
