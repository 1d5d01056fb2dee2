// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cicdec/cic.hpp"
#include "cicdec/errors.hpp"
#include "cicdec/samples.hpp"
#include "cicdec/word.hpp"

namespace cicdec {

struct FilterSpec {
    double pass_edge_hz = 0.0;
    double stop_edge_hz = 0.0;
    double input_rate_hz = 0.0;
    double min_stop_atten_db = 90.0;
    double max_pass_ripple_db = 0.05;

    void validate() const;   // 0 < pass < stop < rate/2
};

// Signed fixed point with an explicit sign bit: Qx.y spans
// [-2^x, 2^x - 2^-y] in steps of 2^-y and occupies 1+x+y bits.
// Q1.15 is 17 bits wide so that +1.0 is representable as 32768.
struct QFormat {
    int int_bits = 1;
    int frac_bits = 15;

    int width() const { return 1 + int_bits + frac_bits; }
    std::int64_t scale() const { return std::int64_t(1) << frac_bits; }
    static QFormat parse(std::string_view text);   // "Q1.15"
    std::string str() const;
};

enum class FirKind { halfband, droop };
FirKind parse_fir_kind(std::string_view name);
std::string_view fir_kind_name(FirKind kind);

struct FirFilter {
    FirKind kind = FirKind::halfband;
    int decimation = 2;
    std::vector<double> coeffs;              // odd length, symmetric
    std::vector<Word> quantized_coeffs;      // filled by quantize_coeffs
    QFormat format{};

    // Design record, used for re-verification after quantization.
    std::optional<FilterSpec> spec;
    std::vector<std::pair<double, double>> pass_targets;   // f_hz -> desired |A|

    double achieved_stop_atten_db = 0.0;
    double achieved_pass_err_db = 0.0;       // max passband deviation from target, dB
    bool spec_met = false;

    int taps() const { return static_cast<int>(coeffs.size()); }
    int group_delay() const { return (taps() - 1) / 2; }
    bool is_quantized() const { return !quantized_coeffs.empty(); }
    std::vector<double> dequantized() const;
};

// Zero-phase amplitude of a symmetric odd-length filter at f cycles per
// input sample: A(f) = h[c] + 2*sum h[c+k] cos(2 pi f k). Signed.
double fir_amplitude_at(std::span<const double> coeffs, double f_norm);

// |sum h[k] e^{-2 pi i f k}|; the response verifier. Shares no code with
// the design routines.
double fir_magnitude_at(std::span<const double> coeffs, double f_norm);

struct FirVerification {
    double stop_atten_db = 0.0;
    double pass_err_db = 0.0;
    bool met = false;
};

// Sweep the response against a spec: dense stopband grid plus the recorded
// passband target points.
FirVerification verify_response(std::span<const double> coeffs, const FilterSpec& spec,
                                std::span<const std::pair<double, double>> pass_targets);

// Kaiser windowed-sinc half-band decimator design. The transition is
// centered on input_rate/4 (which must lie strictly between the spec
// edges); the narrower of the two half-transitions sets the width, so the
// result meets or beats both requested edges. Grows the length until an
// independent sweep meets the spec; lengths are capped at 255 taps.
FirFilter design_halfband(const FilterSpec& spec);

// Weighted least-squares fit of a symmetric FIR to the inverse of the CIC
// passband magnitude (normalized to 1 at DC). cic_rate_hz maps this
// stage's frequencies onto the CIC's input-rate axis. Decimates by 2.
FirFilter design_droop_correction(const CicConfig& cic, double cic_rate_hz,
                                  const FilterSpec& spec);

// Round-to-nearest-even onto the format grid; half-band zeros stay exactly
// zero. Re-verifies the design record against the quantized response and
// updates the achieved numbers and spec_met.
FirFilter quantize_coeffs(const FirFilter& filter, QFormat format);

// Streaming polyphase decimate-by-2 over quantized coefficients. Products
// accumulate in a 64-bit accumulator (coeff bits + data bits + log2(taps)
// must fit); outputs drop the fraction bits with an arithmetic shift and
// wrap to the data width. Outputs are produced on even input indices.
class Decimator2 {
public:
    Decimator2(FirFilter filter, int data_width);

    SampleBlock process(const SampleBlock& in);
    void reset();

    const FirFilter& filter() const { return fir_; }
    int data_width() const { return data_width_; }

private:
    FirFilter fir_;
    int data_width_ = 0;
    std::vector<std::int64_t> h_even_, h_odd_;   // polyphase halves, newest-first order
    std::vector<std::int64_t> buf_even_, buf_odd_;
    std::size_t pos_even_ = 0, pos_odd_ = 0;
    bool next_is_even_ = true;
};

} // namespace cicdec
