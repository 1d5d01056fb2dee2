// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "cicdec/errors.hpp"
#include "cicdec/samples.hpp"

namespace cicdec {

struct ToneSpec {
    double freq_hz = 0.0;
    double amplitude = 1.0;        // fraction of full scale
    double sample_rate_hz = 0.0;
    std::size_t length = 0;
    double phase = 0.0;            // radians

    void validate() const;
};

// s[n] = amplitude * sin(2 pi freq n / rate + phase)
RealBlock gen_tone(const ToneSpec& spec);

// Second-order single-bit modulator: the classic double loop. Both
// integrators see the quantizer decision fed back with weight one:
//   i1[n] = i1[n-1] + x[n] - v[n-1]
//   i2[n] = i2[n-1] + i1[n] - v[n-1]
//   v[n]  = sign(i2[n])          (sign(0) = +1)
// which realizes V = X + (1 - z^-1)^2 E: unity signal transfer and
// second-order noise shaping. Deterministic; output values are +/-1.
class SigmaDeltaModulator {
public:
    // Streaming; |x| <= 1 required. Output block width is 2 bits (the
    // narrowest two's-complement width that holds +1 and -1).
    SampleBlock modulate(const RealBlock& in);

    void reset();

    double integrator1() const { return i1_; }
    double integrator2() const { return i2_; }

private:
    double i1_ = 0.0;
    double i2_ = 0.0;
    double prev_v_ = 0.0;
};

} // namespace cicdec
