// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cicdec/adder.hpp"
#include "cicdec/errors.hpp"
#include "cicdec/samples.hpp"
#include "cicdec/word.hpp"

namespace cicdec {

// Hogenauer decimator: N integrators at the input rate, decimate by R,
// N differentiators (combs) of delay M at the output rate.
struct CicConfig {
    int n_stages = 1;      // N
    int diff_delay = 1;    // M
    int decimation = 2;    // R
    int input_width = 1;   // B_in

    // N+1 entries: width entering each integrator, then the comb-section
    // width. Register widths decrease left to right; LSBs dropped at each
    // boundary are an arithmetic right shift.
    std::vector<int> stage_widths;

    bool pipelined = false;
    AdderKind adder_kind = AdderKind::mcla;

    // Which input phase the downsampler retains (n mod R). Defaults to
    // R-1: the integrator output after R accumulations per output sample.
    std::optional<int> retain_phase;

    // N=5, M=1, R=16, 6-bit input, register widths 25,22,20,18,16 with the
    // comb section at the final 16-bit width.
    static CicConfig default_preset();

    // All stages wide enough that no value ever truncates or wraps.
    static CicConfig lossless(int n_stages, int decimation, int diff_delay, int input_width);

    void validate() const;   // throws config_error
    int output_width() const { return stage_widths.back(); }
    int resolved_phase() const { return retain_phase.value_or(decimation - 1); }
};

// Register width by the growth formula: ceil(N*log2(R*M)) + B_in - 1.
// Computed in exact integer arithmetic (no floating log).
int b_max(int n_stages, int decimation, int diff_delay, int input_width);

// Smallest width that holds every reachable output exactly:
// [-G*2^(B_in-1), G*(2^(B_in-1)-1)] with G = (R*M)^N. One more bit than
// b_max() at the top of the worst-case range.
int lossless_width(int n_stages, int decimation, int diff_delay, int input_width);

// (R*M)^N, which can exceed 64 bits; decimal carries the exact value.
struct RegisterGrowth {
    bool fits_u64 = true;
    std::uint64_t value = 0;   // valid when fits_u64
    std::string decimal;       // always the exact value
};
RegisterGrowth g_max(int n_stages, int decimation, int diff_delay);

// |H(f)| = |sin(pi*f*R*M) / sin(pi*f)|^N at f cycles per input sample,
// 0 <= f <= 0.5; the f=0 limit is (R*M)^N.
double reference_magnitude(const CicConfig& cfg, double f_norm);

// Lossless undecimated h[n]: the length N*(R*M-1)+1 kernel the decimator
// convolves by (all-ones kernel of length R*M convolved N times), obtained
// by running the structural integrator/comb machine without downsampling.
std::vector<std::int64_t> undecimated_impulse_response(const CicConfig& cfg);

class Cic {
public:
    explicit Cic(CicConfig cfg);

    // Streaming: state persists across calls, any block sizes. When
    // cfg.pipelined is set, registers sit between integrator stages, before
    // the downsampler and between comb stages; the output equals the flat
    // model delayed by pipeline_latency() output samples.
    SampleBlock process(const SampleBlock& in);

    // Output-sample delay of the pipelined model relative to flat (N-1);
    // 0 when not pipelined.
    int pipeline_latency() const;

    void reset();
    const CicConfig& config() const { return cfg_; }

private:
    Word comb_stage(int stage, Word x);

    CicConfig cfg_;
    std::vector<Word> int_regs_;
    std::vector<Word> pipe_regs_;                 // trunc(integrator i) at width[i+1]
    std::vector<std::vector<Word>> comb_lines_;   // per-stage last M inputs
    std::vector<int> comb_pos_;
    std::vector<Word> comb_pipes_;                // between comb stages
    std::vector<Word> comb_in_, comb_out_;        // per-call scratch
    std::int64_t n_in_ = 0;
};

struct TruncationErrorReport {
    double max_abs_lsb = 0.0;   // in output LSBs of the truncated schedule
    double rms_lsb = 0.0;
    std::size_t samples = 0;
    int scale_shift = 0;        // extra LSBs the truncated schedule drops
};

// Run both schedules over the same block and compare outputs with the
// lossless result rescaled onto the truncated output grid.
TruncationErrorReport truncation_error_report(const CicConfig& truncated,
                                              const CicConfig& lossless,
                                              const SampleBlock& block);

} // namespace cicdec
