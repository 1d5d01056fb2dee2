// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "cicdec/analysis.hpp"
#include "cicdec/errors.hpp"
#include "cicdec/fir.hpp"
#include "cicdec/source.hpp"

using namespace cicdec;

namespace {

std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t m = 0; m < n; ++m) {
            const double ph = -2.0 * std::numbers::pi * double(k) * double(m) / double(n);
            acc += x[m] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        out[k] = acc;
    }
    return out;
}

RealBlock sine(double freq, double amp, double rate, std::size_t n) {
    ToneSpec s;
    s.freq_hz = freq;
    s.amplitude = amp;
    s.sample_rate_hz = rate;
    s.length = n;
    return gen_tone(s);
}

} // namespace

TEST_CASE("fft matches a naive DFT") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t n : {std::size_t(2), std::size_t(8), std::size_t(64), std::size_t(256)}) {
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {dist(rng), dist(rng)};
        const auto got = fft(x);
        const auto want = naive_dft(x);
        REQUIRE(got.size() == n);
        for (std::size_t k = 0; k < n; ++k)
            CHECK(std::abs(got[k] - want[k]) <= 1e-9 * std::max(1.0, std::abs(want[k])));
    }
}

TEST_CASE("fft rejects non-power-of-two sizes") {
    std::vector<std::complex<double>> x(12);
    CHECK_THROWS_AS(fft_inplace(x), config_error);
}

TEST_CASE("fft energy is conserved") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::complex<double>> x(1024);
    double te = 0.0;
    for (auto& v : x) {
        v = {dist(rng), dist(rng)};
        te += std::norm(v);
    }
    const auto y = fft(x);
    double fe = 0.0;
    for (const auto& v : y) fe += std::norm(v);
    CHECK(fe / double(x.size()) == doctest::Approx(te).epsilon(1e-12));
}

TEST_CASE("coherent full-scale sine reads 0 dB at its bin") {
    const double rate = 48000.0;
    const std::size_t n = 4096;
    // Bin 93 exactly: f = 93 * rate / n.
    const auto x = sine(93.0 * rate / double(n), 1.0, rate, n);

    for (Window w : {Window::rectangular, Window::blackman_harris4}) {
        auto rep = spectrum(x, n, w);
        CHECK(rep.signal_bin == 93u);
        CHECK(rep.bin_hz == doctest::Approx(rate / double(n)));
        CHECK(rep.magnitudes_db[93] == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
        CHECK(rep.bin_freq(93) == doctest::Approx(93.0 * rate / double(n)));
    }

    const auto half = sine(93.0 * rate / double(n), 0.5, rate, n);
    auto rep = spectrum(half, n, Window::blackman_harris4);
    CHECK(rep.magnitudes_db[93] == doctest::Approx(-6.0206).epsilon(1e-4));
}

TEST_CASE("all-zero input floors at kDbFloor") {
    RealBlock x;
    x.rate_hz = 1000.0;
    x.samples.assign(512, 0.0);
    auto rep = spectrum(x, 512, Window::rectangular);
    for (const double db : rep.magnitudes_db) CHECK(db == kDbFloor);
}

TEST_CASE("snr matches an analytic two-tone construction") {
    // Signal at bin 128, one interferer at bin 300, rectangular window so
    // both stay in their own bins exactly.
    const double rate = 8192.0;
    const std::size_t n = 8192;
    RealBlock x;
    x.rate_hz = rate;
    x.samples.resize(n);
    const double a_sig = 0.5, a_noise = 0.005;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = double(i);
        x.samples[i] = a_sig * std::sin(2.0 * std::numbers::pi * 128.0 * t / double(n)) +
                       a_noise * std::sin(2.0 * std::numbers::pi * 300.0 * t / double(n));
    }
    auto rep = spectrum(x, n, Window::rectangular);
    CHECK(rep.signal_bin == 128u);
    const double got = snr(rep, 0.0, rate / 2.0);
    const double want = 20.0 * std::log10(a_sig / a_noise);
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
    CHECK(rep.snr_db == got);

    // Narrowing the band to exclude the interferer leaves only FFT
    // round-off as noise.
    const double clean = snr(rep, 64.0, 256.0);
    CHECK(clean > 100.0);
    CHECK(clean <= kDbCeil);

    // Band that excludes the signal bin is an error.
    CHECK_THROWS_AS(snr(rep, 400.0, 1000.0), config_error);
}

TEST_CASE("blackman-harris window spreads the signal over guard bins") {
    const double rate = 48000.0;
    const std::size_t n = 4096;
    // Off-grid tone: rectangular would leak everywhere, bh4 keeps it local.
    const auto x = sine(1000.7, 0.5, rate, n);
    auto rep = spectrum(x, n, Window::blackman_harris4);
    const auto sb = rep.signal_bin;
    CHECK(double(sb) == doctest::Approx(1000.7 / rate * double(n)).epsilon(0.01));
    const double s = snr(rep, 0.0, rate / 2.0);
    CHECK(s > 80.0);   // integrated leakage beyond +/-4 bins sits near -87 dB

    CHECK(signal_guard_bins(Window::blackman_harris4) == 4);
    CHECK(dc_guard_bins(Window::blackman_harris4) == 4);
    CHECK(signal_guard_bins(Window::rectangular) == 1);
}

TEST_CASE("window names parse") {
    CHECK(parse_window("rect") == Window::rectangular);
    CHECK(parse_window("bh4") == Window::blackman_harris4);
    CHECK(window_name(Window::blackman_harris4) == "bh4");
    CHECK_THROWS_AS(parse_window("hann"), config_error);
}

TEST_CASE("spectrum validates sizes") {
    RealBlock x;
    x.rate_hz = 1000.0;
    x.samples.assign(100, 0.1);
    CHECK_THROWS_AS(spectrum(x, 128, Window::rectangular), config_error);   // too few samples
    CHECK_THROWS_AS(spectrum(x, 96, Window::rectangular), config_error);    // not a power of 2
}

TEST_CASE("response sweep recovers a known FIR gain curve") {
    FilterSpec s;
    s.pass_edge_hz = 2000.0;
    s.stop_edge_hz = 22000.0;
    s.input_rate_hz = 48000.0;
    s.min_stop_atten_db = 60.0;
    FirFilter f = design_halfband(s);
    f = quantize_coeffs(f, QFormat{});

    SweepTarget target;
    target.input_rate_hz = 48000.0;
    target.input_width = 16;
    target.out_decimation = 2;
    target.settle_outputs = f.taps();
    target.measure_outputs = 512;
    target.run = [&](const SampleBlock& in) {
        Decimator2 dec(f, 16);
        return dec.process(in);
    };

    const std::vector<double> freqs{0.0, 1000.0, 2000.0, 6000.0};
    const auto pts = response_sweep(target, freqs);
    REQUIRE(pts.size() == freqs.size());
    for (const auto& p : pts) {
        const double want =
            20.0 * std::log10(fir_magnitude_at(f.dequantized(), p.f_hz / 48000.0));
        // 16-bit probe quantization limits agreement to ~1e-3 dB.
        CHECK(p.gain_db == doctest::Approx(want).scale(1.0).epsilon(5e-3));
    }

    // DC probe measures the DC gain exactly.
    CHECK(pts[0].f_hz == 0.0);
    CHECK(pts[0].gain_db ==
          doctest::Approx(20.0 * std::log10(fir_amplitude_at(f.dequantized(), 0.0)))
              .epsilon(1e-3));

    // At or above output Nyquist: rejected.
    const std::vector<double> bad{13000.0};
    CHECK_THROWS_AS(response_sweep(target, bad), config_error);
}
