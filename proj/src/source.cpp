// SPDX-License-Identifier: Apache-2.0

#include "cicdec/source.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cicdec {

void ToneSpec::validate() const {
    if (!(sample_rate_hz > 0))
        throw config_error("tone: sample rate must be positive");
    if (!(freq_hz > 0 && freq_hz < sample_rate_hz / 2))
        throw config_error("tone: frequency must satisfy 0 < f < rate/2");
    if (!(amplitude >= 0.0 && amplitude <= 1.0))
        throw config_error("tone: amplitude must be in [0, 1]");
}

RealBlock gen_tone(const ToneSpec& spec) {
    spec.validate();
    RealBlock out;
    out.rate_hz = spec.sample_rate_hz;
    out.samples.resize(spec.length);
    const double w = 2.0 * std::numbers::pi * spec.freq_hz / spec.sample_rate_hz;
    for (std::size_t n = 0; n < spec.length; ++n)
        out.samples[n] = spec.amplitude * std::sin(w * static_cast<double>(n) + spec.phase);
    return out;
}

SampleBlock SigmaDeltaModulator::modulate(const RealBlock& in) {
    SampleBlock out;
    out.rate_hz = in.rate_hz;
    out.width = 2;
    out.samples.reserve(in.samples.size());
    for (const double x : in.samples) {
        if (!(x >= -1.0 && x <= 1.0))
            throw input_error("modulator: input " + std::to_string(x) + " outside [-1, 1]");
        i1_ += x - prev_v_;
        i2_ += i1_ - prev_v_;
        const double v = i2_ >= 0.0 ? 1.0 : -1.0;
        out.samples.push_back(static_cast<std::int64_t>(v));
        prev_v_ = v;
    }
    return out;
}

void SigmaDeltaModulator::reset() {
    i1_ = 0.0;
    i2_ = 0.0;
    prev_v_ = 0.0;
}

} // namespace cicdec
