// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "cicdec/errors.hpp"
#include "cicdec/samples.hpp"

namespace cicdec {

inline constexpr double kDbFloor = -400.0;
inline constexpr double kDbCeil = 400.0;

enum class Window { rectangular, blackman_harris4 };
Window parse_window(std::string_view name);
std::string_view window_name(Window w);

// Bins treated as part of the signal around the peak, and low bins
// excluded as DC leakage. Rectangular assumes coherent capture.
int signal_guard_bins(Window w);
int dc_guard_bins(Window w);

// In-place iterative radix-2 DIT transform, own implementation.
// Size must be a power of two. No normalization.
void fft_inplace(std::vector<std::complex<double>>& data);
std::vector<std::complex<double>> fft(std::vector<std::complex<double>> data);

struct SpectrumReport {
    double bin_hz = 0.0;
    std::vector<double> magnitudes_db;   // one-sided, fft/2+1 entries, floored
    std::vector<double> power;           // linear amplitude^2 per bin, not floored
    std::size_t signal_bin = 0;          // peak bin outside the DC guard
    double snr_db = 0.0;                 // full-band figure; snr() refines per band
    Window window = Window::rectangular;
    bool coherent = true;

    double bin_freq(std::size_t k) const { return bin_hz * static_cast<double>(k); }
};

// Magnitude spectrum of the first fft_size samples. Amplitudes are
// normalized by the window's coherent gain, so a full-scale sine reads
// 0 dB at its bin. rate_hz of 0 is treated as a 1 Hz (normalized) axis.
SpectrumReport spectrum(std::span<const double> x, double rate_hz, std::size_t fft_size,
                        Window window);
SpectrumReport spectrum(const RealBlock& block, std::size_t fft_size, Window window);
SpectrumReport spectrum(const SampleBlock& block, std::size_t fft_size, Window window);

// Signal power in signal_bin +/- guard over noise power across the rest of
// [lo_hz, hi_hz], DC guard excluded. Updates report.snr_db and returns it.
// The signal bin must lie inside the band.
double snr(SpectrumReport& report, double lo_hz, double hi_hz);

struct SweepPoint {
    double f_hz = 0.0;     // actual (coherently snapped) probe frequency
    double gain_db = 0.0;
};

// Adapter for sweeping any streaming stage. run() must process one whole
// probe block through a fresh instance of the stage.
struct SweepTarget {
    std::function<SampleBlock(const SampleBlock&)> run;
    double input_rate_hz = 0.0;
    int input_width = 0;
    int out_decimation = 1;        // input samples per output sample
    double amplitude = 0.5;        // probe amplitude, fraction of full scale
    int settle_outputs = 0;        // transient discard, >= group delay
    int measure_outputs = 1024;    // coherent measurement window
};

// Drive a quantized cosine per frequency, fit the fundamental on input and
// output over the same aligned window, report 20*log10(out/in). Probe
// frequencies snap to the coherent grid of the measurement window; f = 0
// measures the DC gain. Frequencies at or above the output Nyquist throw.
std::vector<SweepPoint> response_sweep(const SweepTarget& target,
                                       std::span<const double> freqs_hz);

} // namespace cicdec
