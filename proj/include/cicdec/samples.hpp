// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace cicdec {

// Contiguous integer samples at one rate. width tags the two's-complement
// bit width every sample must fit in; rate_hz of 0 means "unspecified".
struct SampleBlock {
    std::vector<std::int64_t> samples;
    double rate_hz = 0.0;
    int width = 0;

    std::size_t size() const { return samples.size(); }
};

// Real-valued samples on a unit-amplitude scale (|x| <= 1 by convention).
struct RealBlock {
    std::vector<double> samples;
    double rate_hz = 0.0;

    std::size_t size() const { return samples.size(); }
};

} // namespace cicdec
