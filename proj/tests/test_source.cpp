// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cicdec/analysis.hpp"
#include "cicdec/errors.hpp"
#include "cicdec/source.hpp"

using namespace cicdec;

namespace {

RealBlock tone(double freq, double amp, double rate, std::size_t n, double phase = 0.0) {
    ToneSpec s;
    s.freq_hz = freq;
    s.amplitude = amp;
    s.sample_rate_hz = rate;
    s.length = n;
    s.phase = phase;
    return gen_tone(s);
}

} // namespace

TEST_CASE("tone generation") {
    const auto b = tone(1000.0, 0.5, 48000.0, 48);
    REQUIRE(b.size() == 48u);
    CHECK(b.rate_hz == 48000.0);
    CHECK(b.samples[0] == 0.0);
    CHECK(b.samples[12] == doctest::Approx(0.5).epsilon(1e-12));   // quarter period
    for (const double v : b.samples) CHECK(std::abs(v) <= 0.5 + 1e-15);

    const auto c = tone(1000.0, 0.25, 48000.0, 16, std::numbers::pi / 2);
    CHECK(c.samples[0] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("tone spec validation") {
    CHECK_NOTHROW(tone(100.0, 1.0, 1000.0, 4));
    CHECK_THROWS_AS(tone(600.0, 0.5, 1000.0, 4), config_error);    // past Nyquist
    CHECK_THROWS_AS(tone(100.0, 1.5, 1000.0, 4), config_error);    // overdrive
    CHECK_THROWS_AS(tone(100.0, -0.1, 1000.0, 4), config_error);
    CHECK_THROWS_AS(tone(100.0, 0.5, 0.0, 4), config_error);
    CHECK_THROWS_AS(tone(-1.0, 0.5, 1000.0, 4), config_error);
}

TEST_CASE("modulator output is binary, width 2, deterministic") {
    const auto x = tone(1001.0, 0.5, 48000.0, 4096);
    SigmaDeltaModulator m1, m2;
    const auto a = m1.modulate(x);
    const auto b = m2.modulate(x);
    CHECK(a.width == 2);
    CHECK(a.rate_hz == 48000.0);
    REQUIRE(a.size() == x.size());
    for (const auto v : a.samples) CHECK((v == 1 || v == -1));
    CHECK(a.samples == b.samples);

    // Streaming in two halves equals one shot.
    SigmaDeltaModulator m3;
    RealBlock h1 = x, h2 = x;
    h1.samples.assign(x.samples.begin(), x.samples.begin() + 2048);
    h2.samples.assign(x.samples.begin() + 2048, x.samples.end());
    auto c = m3.modulate(h1);
    const auto c2 = m3.modulate(h2);
    c.samples.insert(c.samples.end(), c2.samples.begin(), c2.samples.end());
    CHECK(c.samples == a.samples);

    m3.reset();
    CHECK(m3.integrator1() == 0.0);
    CHECK(m3.integrator2() == 0.0);
    CHECK(m3.modulate(x).samples == a.samples);
}

TEST_CASE("modulator tracks DC in the average") {
    for (double level : {0.0, 0.25, 0.5, -0.375}) {
        RealBlock x;
        x.rate_hz = 1.0;
        x.samples.assign(1 << 16, level);
        SigmaDeltaModulator m;
        const auto y = m.modulate(x);
        double mean = 0.0;
        for (const auto v : y.samples) mean += double(v);
        mean /= double(y.size());
        CHECK(mean == doctest::Approx(level).scale(1.0).epsilon(1e-3));
    }
}

TEST_CASE("modulator rejects overdrive") {
    RealBlock x;
    x.samples = {0.0, 1.5};
    SigmaDeltaModulator m;
    CHECK_THROWS_AS(m.modulate(x), input_error);
}

TEST_CASE("integrator state stays bounded over long runs") {
    const auto x = tone(997.0, 0.5, 6144000.0, 1 << 20);
    SigmaDeltaModulator m;
    const auto y = m.modulate(x);
    CHECK(y.size() == x.size());
    CHECK(std::abs(m.integrator1()) < 8.0);
    CHECK(std::abs(m.integrator2()) < 16.0);
}

TEST_CASE("noise shaping rises about 40 dB per decade") {
    // Second-order shaping: quantization noise density follows
    // |2 sin(pi f)|^2 in amplitude, so band power around 10x the frequency
    // sits ~40 dB higher. The Blackman-Harris spectrum keeps the stimulus
    // tone's leakage skirts far below the shaped floor.
    const double rate = 6144000.0;
    const auto x = tone(1001.953125, 0.5, rate, 1 << 18);
    SigmaDeltaModulator m;
    const auto y = m.modulate(x);
    const auto rep = spectrum(y, std::size_t(1) << 18, Window::blackman_harris4);

    auto band_power = [&](double lo_hz, double hi_hz) {
        const auto k_lo = static_cast<std::size_t>(std::ceil(lo_hz / rep.bin_hz));
        const auto k_hi = static_cast<std::size_t>(std::floor(hi_hz / rep.bin_hz));
        double p = 0.0;
        for (std::size_t k = k_lo; k <= k_hi; ++k) p += rep.power[k];
        return p / static_cast<double>(k_hi - k_lo + 1);
    };

    const double slope_db =
        10.0 * std::log10(band_power(400000.0, 600000.0) / band_power(40000.0, 60000.0));
    CHECK(slope_db > 34.0);
    CHECK(slope_db < 46.0);
}

TEST_CASE("first eight decisions for a quarter-rate tone") {
    // Hand-steppable case: x = 0.5 sin(2 pi n / 4) = [0, .5, 0, -.5, ...].
    const auto x = tone(12000.0, 0.5, 48000.0, 8);
    SigmaDeltaModulator m;
    const auto y = m.modulate(x);
    CHECK(y.samples == std::vector<std::int64_t>{1, -1, 1, -1, -1, 1, 1, -1});
}
