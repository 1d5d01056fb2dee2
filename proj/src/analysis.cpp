// SPDX-License-Identifier: Apache-2.0

#include "cicdec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cicdec/word.hpp"

namespace cicdec {

namespace {
constexpr double kPi = std::numbers::pi;

double window_value(Window w, std::size_t n, std::size_t size) {
    if (w == Window::rectangular) return 1.0;
    // 4-term Blackman-Harris, periodic form.
    constexpr double a0 = 0.35875, a1 = 0.48829, a2 = 0.14128, a3 = 0.01168;
    const double t = 2.0 * kPi * static_cast<double>(n) / static_cast<double>(size);
    return a0 - a1 * std::cos(t) + a2 * std::cos(2.0 * t) - a3 * std::cos(3.0 * t);
}

double to_db(double amplitude) {
    if (!(amplitude > 0.0)) return kDbFloor;
    return std::max(kDbFloor, 20.0 * std::log10(amplitude));
}
} // namespace

Window parse_window(std::string_view name) {
    if (name == "rect" || name == "rectangular") return Window::rectangular;
    if (name == "bh4" || name == "blackman-harris") return Window::blackman_harris4;
    throw config_error("unknown window '" + std::string(name) + "' (rect, bh4)");
}

std::string_view window_name(Window w) {
    return w == Window::rectangular ? "rect" : "bh4";
}

int signal_guard_bins(Window w) { return w == Window::rectangular ? 1 : 4; }
int dc_guard_bins(Window w) { return w == Window::rectangular ? 1 : 4; }

void fft_inplace(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (n < 2 || (n & (n - 1)) != 0)
        throw config_error("fft: size must be a power of two >= 2");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::complex<double> wlen = std::polar(1.0, -2.0 * kPi / static_cast<double>(len));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w = 1.0;
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = data[i + j];
                const std::complex<double> v = data[i + j + len / 2] * w;
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::vector<std::complex<double>> fft(std::vector<std::complex<double>> data) {
    fft_inplace(data);
    return data;
}

SpectrumReport spectrum(std::span<const double> x, double rate_hz, std::size_t fft_size,
                        Window window) {
    if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0)
        throw config_error("spectrum: fft size must be a power of two >= 2");
    if (x.size() < fft_size)
        throw config_error("spectrum: block length " + std::to_string(x.size()) +
                           " shorter than fft size " + std::to_string(fft_size));

    std::vector<std::complex<double>> buf(fft_size);
    double wsum = 0.0;
    for (std::size_t n = 0; n < fft_size; ++n) {
        const double w = window_value(window, n, fft_size);
        wsum += w;
        buf[n] = x[n] * w;
    }
    fft_inplace(buf);

    SpectrumReport rep;
    rep.window = window;
    rep.coherent = window == Window::rectangular;
    rep.bin_hz = (rate_hz > 0 ? rate_hz : 1.0) / static_cast<double>(fft_size);

    const std::size_t half = fft_size / 2;
    rep.power.resize(half + 1);
    rep.magnitudes_db.resize(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        const double one_sided = (k == 0 || k == half) ? 1.0 : 2.0;
        const double amp = std::abs(buf[k]) * one_sided / wsum;
        rep.power[k] = amp * amp;
        rep.magnitudes_db[k] = to_db(amp);
    }

    const std::size_t first = static_cast<std::size_t>(dc_guard_bins(window)) + 1;
    rep.signal_bin = std::min(first, half);
    for (std::size_t k = first; k <= half; ++k)
        if (rep.power[k] > rep.power[rep.signal_bin]) rep.signal_bin = k;

    snr(rep, 0.0, rep.bin_freq(half));
    return rep;
}

SpectrumReport spectrum(const RealBlock& block, std::size_t fft_size, Window window) {
    return spectrum(std::span<const double>(block.samples), block.rate_hz, fft_size, window);
}

SpectrumReport spectrum(const SampleBlock& block, std::size_t fft_size, Window window) {
    std::vector<double> x(block.samples.begin(), block.samples.end());
    return spectrum(std::span<const double>(x), block.rate_hz, fft_size, window);
}

double snr(SpectrumReport& report, double lo_hz, double hi_hz) {
    if (!(hi_hz > lo_hz)) throw config_error("snr: empty band");
    if (report.power.empty()) throw config_error("snr: empty report");
    const std::size_t half = report.power.size() - 1;

    const auto k_lo = static_cast<std::size_t>(
        std::max(1.0, std::ceil(lo_hz / report.bin_hz - 1e-9)));
    const auto k_hi_d = std::floor(hi_hz / report.bin_hz + 1e-9);
    const std::size_t k_hi = std::min(half, static_cast<std::size_t>(std::max(0.0, k_hi_d)));
    if (k_lo > k_hi) throw config_error("snr: band contains no bins");
    if (report.signal_bin < k_lo || report.signal_bin > k_hi)
        throw config_error("snr: signal bin outside the requested band");

    const std::size_t guard = static_cast<std::size_t>(signal_guard_bins(report.window));
    const std::size_t dcg = static_cast<std::size_t>(dc_guard_bins(report.window));
    const std::size_t sb = report.signal_bin;

    double signal = 0.0, noise = 0.0;
    const std::size_t s_lo = sb > guard ? sb - guard : 1;
    const std::size_t s_hi = std::min(half, sb + guard);
    for (std::size_t k = s_lo; k <= s_hi; ++k) signal += report.power[k];
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        if (k <= dcg || (k >= s_lo && k <= s_hi)) continue;
        noise += report.power[k];
    }

    double value;
    if (noise <= 0.0)
        value = signal > 0.0 ? kDbCeil : kDbFloor;
    else
        value = std::clamp(10.0 * std::log10(signal / noise), kDbFloor, kDbCeil);
    report.snr_db = value;
    return value;
}

namespace {

double fit_amplitude(std::span<const std::int64_t> y, double f_hz, double rate_hz) {
    if (y.empty()) throw config_error("sweep: empty measurement window");
    if (f_hz == 0.0) {
        double mean = 0.0;
        for (const auto v : y) mean += static_cast<double>(v);
        return std::abs(mean) / static_cast<double>(y.size());
    }
    // Coherent window, so the quadrature projections are exact.
    double c = 0.0, s = 0.0;
    const double w = 2.0 * kPi * f_hz / rate_hz;
    for (std::size_t m = 0; m < y.size(); ++m) {
        const double v = static_cast<double>(y[m]);
        c += v * std::cos(w * static_cast<double>(m));
        s += v * std::sin(w * static_cast<double>(m));
    }
    return 2.0 * std::hypot(c, s) / static_cast<double>(y.size());
}

} // namespace

std::vector<SweepPoint> response_sweep(const SweepTarget& target,
                                       std::span<const double> freqs_hz) {
    if (!target.run) throw config_error("sweep: no target to run");
    if (!(target.input_rate_hz > 0)) throw config_error("sweep: input rate must be positive");
    if (target.input_width < 2 || target.input_width > 62)
        throw config_error("sweep: input width out of range");
    if (target.out_decimation < 1) throw config_error("sweep: bad decimation");
    if (target.measure_outputs < 4 || target.measure_outputs % 2 != 0)
        throw config_error("sweep: measurement window must be even and >= 4");
    if (target.settle_outputs < 0) throw config_error("sweep: negative settle");
    if (!(target.amplitude > 0.0 && target.amplitude <= 1.0))
        throw config_error("sweep: amplitude must be in (0, 1]");

    const double rate = target.input_rate_hz;
    const std::size_t d = static_cast<std::size_t>(target.out_decimation);
    const double out_nyq = rate / static_cast<double>(2 * d);
    const std::size_t win_in = static_cast<std::size_t>(target.measure_outputs) * d;
    const std::size_t total_out =
        static_cast<std::size_t>(target.settle_outputs + target.measure_outputs);
    const std::size_t total_in = total_out * d;
    const double full_scale =
        static_cast<double>((std::int64_t(1) << (target.input_width - 1)) - 1);

    std::vector<SweepPoint> points;
    points.reserve(freqs_hz.size());
    for (const double f : freqs_hz) {
        if (!(f >= 0.0) || f >= out_nyq)
            throw config_error("sweep: frequency " + std::to_string(f) +
                               " at or above output Nyquist " + std::to_string(out_nyq));
        // Snap onto the coherent grid of the measurement window.
        std::int64_t k = std::llround(f * static_cast<double>(win_in) / rate);
        const std::int64_t k_max = static_cast<std::int64_t>(win_in / (2 * d)) - 1;
        if (f > 0.0) k = std::clamp<std::int64_t>(k, 1, k_max);
        const double fr = static_cast<double>(k) * rate / static_cast<double>(win_in);

        SampleBlock probe;
        probe.rate_hz = rate;
        probe.width = target.input_width;
        probe.samples.resize(total_in);
        // Truncate toward zero so peaks stay at floor(amplitude*full_scale):
        // a rounded-up peak would cost the headroom that keeps high-gain
        // targets off their wrap ceiling.
        const double w = 2.0 * kPi * fr / rate;
        for (std::size_t n = 0; n < total_in; ++n)
            probe.samples[n] = static_cast<std::int64_t>(
                target.amplitude * full_scale * std::cos(w * static_cast<double>(n)));

        const SampleBlock response = target.run(probe);
        if (response.samples.size() < total_out)
            throw config_error("sweep: target produced " +
                               std::to_string(response.samples.size()) + " of " +
                               std::to_string(total_out) + " samples");

        const std::size_t settle = static_cast<std::size_t>(target.settle_outputs);
        const double out_rate = rate / static_cast<double>(d);
        const double out_amp = fit_amplitude(
            std::span(response.samples).subspan(settle, static_cast<std::size_t>(target.measure_outputs)),
            fr, out_rate);
        const double in_amp = fit_amplitude(
            std::span(probe.samples).subspan(settle * d, win_in), fr, rate);

        double gain_db = kDbFloor;
        if (in_amp > 0.0 && out_amp > 0.0)
            gain_db = std::clamp(20.0 * std::log10(out_amp / in_amp), kDbFloor, kDbCeil);
        points.push_back({fr, gain_db});
    }
    return points;
}

} // namespace cicdec
