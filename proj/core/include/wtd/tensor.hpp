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

#include <cassert>
#include <cstddef>
#include <vector>

namespace wtd {

/// Time-major sequence of channel vectors, channel index fastest. The channel
/// axis is contiguous so per-step dot products vectorize.
struct SeqTensor {
    int steps = 0;
    int channels = 0;
    std::vector<double> data;  // steps * channels

    SeqTensor() = default;
    SeqTensor(int t, int c) : steps(t), channels(c), data(std::size_t(t) * c, 0.0) {}

    double* at(int t) {
        assert(t >= 0 && t < steps);
        return data.data() + std::size_t(t) * channels;
    }
    const double* at(int t) const {
        assert(t >= 0 && t < steps);
        return data.data() + std::size_t(t) * channels;
    }
    double& at(int t, int c) {
        assert(c >= 0 && c < channels);
        return data[std::size_t(t) * channels + c];
    }
    double at(int t, int c) const {
        assert(c >= 0 && c < channels);
        return data[std::size_t(t) * channels + c];
    }

    void zero() { data.assign(data.size(), 0.0); }
};

/// Image stack: rows x cols spatial grid with a contiguous channel vector per
/// cell (channel index fastest).
struct Frame {
    int rows = 0;
    int cols = 0;
    int channels = 0;
    std::vector<double> data;  // rows * cols * channels

    Frame() = default;
    Frame(int r, int c, int ch)
        : rows(r), cols(c), channels(ch), data(std::size_t(r) * c * ch, 0.0) {}

    double* at(int r, int c) {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return data.data() + (std::size_t(r) * cols + c) * channels;
    }
    const double* at(int r, int c) const {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return data.data() + (std::size_t(r) * cols + c) * channels;
    }
    double& at(int r, int c, int ch) {
        assert(ch >= 0 && ch < channels);
        return data[(std::size_t(r) * cols + c) * channels + ch];
    }
    double at(int r, int c, int ch) const {
        assert(ch >= 0 && ch < channels);
        return data[(std::size_t(r) * cols + c) * channels + ch];
    }

    void zero() { data.assign(data.size(), 0.0); }
};

}  // namespace wtd
