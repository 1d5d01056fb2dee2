// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cicdec/cic.hpp"
#include "cicdec/errors.hpp"
#include "cicdec/fir.hpp"
#include "cicdec/samples.hpp"

namespace cicdec {

// Four-stage decimator: CIC /16, half-band /2, droop corrector /2,
// half-band /2. 6.144 MHz in, 48 kHz out, total decimation 128.
struct ChainConfig {
    double input_rate_hz = 6'144'000.0;
    CicConfig cic;
    FirFilter hb1, droop, hb2;    // quantized
    int data_width = 16;          // FIR-stage sample width
    int output_width = 16;
    // Output scaling by an arithmetic right shift only (power of two),
    // applied after the last stage. 0 leaves the raw gain in place.
    int normalize_shift = 0;

    void validate() const;
    int total_decimation() const;
    double output_rate_hz() const { return input_rate_hz / total_decimation(); }

    // Nominal DC gain: CIC growth over dropped LSBs times the quantized
    // DC gains of the three FIR stages, over the normalize shift. Floor
    // truncation makes the measured value sit within an LSB of this.
    double dc_gain() const;

    // Sum of per-stage group delays referred to the 48 kHz output.
    double group_delay_output_samples() const;
};

// Default-preset CIC (widths 25,22,20,18,16) and the three stage filters
// designed at their stage rates, Q1.15 coefficients, 16-bit datapath.
ChainConfig build_default_chain();

// Same filters on a no-loss datapath: CIC wide enough to never truncate
// or wrap, FIR stages at the same wide width. For measurements that must
// not be limited by datapath quantization.
ChainConfig build_lossless_chain();

class Chain {
public:
    explicit Chain(ChainConfig cfg);

    // Streaming; concatenation-invariant. Input block width (if tagged)
    // must not exceed the CIC input width; modulator blocks (width 2)
    // sign-extend into it.
    SampleBlock run(const SampleBlock& in);

    void reset();
    const ChainConfig& config() const { return cfg_; }

private:
    ChainConfig cfg_;
    Cic cic_;
    Decimator2 hb1_, droop_, hb2_;
};

} // namespace cicdec
