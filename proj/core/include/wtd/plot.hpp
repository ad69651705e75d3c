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

#pragma once

#include <string>
#include <vector>

#include "wtd/dataio.hpp"

namespace wtd {

/// One hydrograph figure: observations, ensemble mean, and a +-2 std band.
struct PredictionPlot {
    std::string title;
    std::vector<Date> dates;       // shared x axis, ascending
    std::vector<double> observed;  // meters; empty when unavailable
    std::vector<double> mean;      // meters, same length as dates
    std::vector<double> stddev;    // meters, >= 0, same length as dates
};

/// Maps a depth in meters to a vertical pixel. The depth axis is reversed:
/// the smallest depth sits at y_top and depth grows downward, so a deeper
/// water table is drawn lower on the figure.
double depth_to_y(double depth, double depth_min, double depth_max,
                  double y_top, double y_bottom);

/// Writes a self-contained SVG: shaded mean+-2std band, mean line, observed
/// line, axes with date and depth ticks (depth axis reversed). Throws on
/// length mismatches, empty input, or IO failure.
void write_prediction_svg(const PredictionPlot& plot, const std::string& path);

}  // namespace wtd
