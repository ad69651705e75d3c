// ----------------------------------------------------------------------------
// Copyright 2026 The wtdcast Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ----------------------------------------------------------------------------

#include "wtd/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wtd {

double depth_to_y(double depth, double depth_min, double depth_max,
                  double y_top, double y_bottom) {
    if (!(depth_max > depth_min)) {
        throw std::invalid_argument("depth_to_y: depth_max must exceed depth_min");
    }
    const double f = (depth - depth_min) / (depth_max - depth_min);
    return y_top + f * (y_bottom - y_top);
}

namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
}

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += ch;
        }
    }
    return out;
}

// Largest of {1,2,5}*10^k not exceeding the raw step keeps tick labels round.
double nice_step(double raw) {
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {5.0, 2.0, 1.0}) {
        if (mag * m <= raw) return mag * m;
    }
    return mag;
}

}  // namespace

void write_prediction_svg(const PredictionPlot& plot, const std::string& path) {
    const std::size_t n = plot.dates.size();
    if (n == 0) throw std::invalid_argument("write_prediction_svg: no dates");
    if (plot.mean.size() != n || plot.stddev.size() != n) {
        throw std::invalid_argument(
            "write_prediction_svg: mean/stddev length mismatch");
    }
    if (!plot.observed.empty() && plot.observed.size() != n) {
        throw std::invalid_argument(
            "write_prediction_svg: observed length mismatch");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(plot.dates[i] <= plot.dates[i + 1])) {
            throw std::invalid_argument(
                "write_prediction_svg: dates must be ascending");
        }
    }

    double dmin = plot.mean[0], dmax = plot.mean[0];
    auto widen = [&](double v) {
        dmin = std::min(dmin, v);
        dmax = std::max(dmax, v);
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (!(plot.stddev[i] >= 0.0)) {
            throw std::invalid_argument(
                "write_prediction_svg: negative stddev at row " +
                std::to_string(i));
        }
        widen(plot.mean[i] - 2.0 * plot.stddev[i]);
        widen(plot.mean[i] + 2.0 * plot.stddev[i]);
        if (!plot.observed.empty()) widen(plot.observed[i]);
    }
    if (dmax == dmin) {
        dmin -= 0.5;
        dmax += 0.5;
    } else {
        const double pad = 0.05 * (dmax - dmin);
        dmin -= pad;
        dmax += pad;
    }

    const double width = 900, height = 420;
    const double left = 70, right = width - 20, top = 42, bottom = height - 50;

    const long span_days = std::max<long>(1, plot.dates.front().days_until(plot.dates.back()));
    auto x_of = [&](std::size_t i) {
        const long d = plot.dates.front().days_until(plot.dates[i]);
        return left + (right - left) * double(d) / double(span_days);
    };
    auto y_of = [&](double depth) {
        return depth_to_y(depth, dmin, dmax, top, bottom);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    if (!plot.title.empty()) {
        svg << "<text x=\"" << num((left + right) / 2) << "\" y=\"24\" "
               "font-family=\"sans-serif\" font-size=\"15\" font-weight=\"bold\" "
               "text-anchor=\"middle\">"
            << escape_xml(plot.title) << "</text>\n";
    }

    // Depth ticks (axis reversed: smallest depth on top).
    const double step = nice_step((dmax - dmin) / 6.0);
    const double first_tick = std::ceil(dmin / step) * step;
    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
    for (double v = first_tick; v <= dmax + 1e-9; v += step) {
        const double y = y_of(v);
        svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\""
            << num(right) << "\" y2=\"" << num(y)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
    // Date ticks: up to 6, evenly spread over the rows.
    const std::size_t n_xticks = std::min<std::size_t>(6, n);
    for (std::size_t k = 0; k < n_xticks; ++k) {
        const std::size_t i =
            (n_xticks == 1) ? 0 : k * (n - 1) / (n_xticks - 1);
        const double x = x_of(i);
        svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(bottom)
            << "\" x2=\"" << num(x) << "\" y2=\"" << num(bottom + 5)
            << "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << num(x) << "\" y=\"" << num(bottom + 18)
            << "\" text-anchor=\"middle\">" << plot.dates[i].to_iso()
            << "</text>\n";
    }
    svg << "</g>\n";

    // +-2 std band: shallow edge forward, deep edge back.
    svg << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.55\" stroke=\"none\" "
           "points=\"";
    for (std::size_t i = 0; i < n; ++i) {
        svg << num(x_of(i)) << ',' << num(y_of(plot.mean[i] - 2.0 * plot.stddev[i]))
            << ' ';
    }
    for (std::size_t i = n; i-- > 0;) {
        svg << num(x_of(i)) << ',' << num(y_of(plot.mean[i] + 2.0 * plot.stddev[i]))
            << ' ';
    }
    svg << "\"/>\n";

    auto polyline = [&](const std::vector<double>& vals, const char* color,
                        double stroke_w) {
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"" << stroke_w << "\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            svg << num(x_of(i)) << ',' << num(y_of(vals[i])) << ' ';
        }
        svg << "\"/>\n";
    };
    polyline(plot.mean, "#1f77b4", 1.8);
    if (!plot.observed.empty()) polyline(plot.observed, "#333333", 1.4);

    // Frame and axis label.
    svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
        << num(right - left) << "\" height=\"" << num(bottom - top)
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"18\" y=\"" << num((top + bottom) / 2)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#444\" "
           "text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << num((top + bottom) / 2)
        << ")\">Water-table depth [m] (reversed)</text>\n";

    // Legend, top-right inside the frame.
    {
        const double lx = right - 190, ly = top + 10;
        svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
        svg << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" width=\"14\" "
               "height=\"10\" fill=\"#9ecae1\" fill-opacity=\"0.55\"/>"
            << "<text x=\"" << num(lx + 20) << "\" y=\"" << num(ly + 9)
            << "\">mean &#177; 2 std</text>\n";
        svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly + 22) << "\" x2=\""
            << num(lx + 14) << "\" y2=\"" << num(ly + 22)
            << "\" stroke=\"#1f77b4\" stroke-width=\"1.8\"/>"
            << "<text x=\"" << num(lx + 20) << "\" y=\"" << num(ly + 26)
            << "\">ensemble mean</text>\n";
        if (!plot.observed.empty()) {
            svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly + 38)
                << "\" x2=\"" << num(lx + 14) << "\" y2=\"" << num(ly + 38)
                << "\" stroke=\"#333333\" stroke-width=\"1.4\"/>"
                << "<text x=\"" << num(lx + 20) << "\" y=\"" << num(ly + 42)
                << "\">observed</text>\n";
        }
        svg << "</g>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << svg.str();
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace wtd
