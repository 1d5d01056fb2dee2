// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "cicdec/cic.hpp"
#include "cicdec/errors.hpp"
#include "cicdec/verify.hpp"
#include "cicdec/word.hpp"

using namespace cicdec;

namespace {

SampleBlock random_block(const CicConfig& cfg, std::size_t len, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> dist(Word::min_value(cfg.input_width),
                                                     Word::max_value(cfg.input_width));
    SampleBlock b;
    b.width = cfg.input_width;
    b.samples.reserve(len);
    for (std::size_t i = 0; i < len; ++i) b.samples.push_back(dist(rng));
    return b;
}

SampleBlock constant_block(std::size_t len, std::int64_t value, int width) {
    SampleBlock b;
    b.width = width;
    b.samples.assign(len, value);
    return b;
}

double dft_magnitude(const std::vector<std::int64_t>& h, double f_norm) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t n = 0; n < h.size(); ++n) {
        const double ph = -2.0 * std::numbers::pi * f_norm * static_cast<double>(n);
        acc += static_cast<double>(h[n]) * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return std::abs(acc);
}

} // namespace

TEST_CASE("register growth bound") {
    CHECK(b_max(5, 16, 1, 6) == 25);
    CHECK(b_max(1, 2, 1, 1) == 1);
    CHECK(b_max(4, 16, 1, 5) == 20);
    CHECK(b_max(2, 3, 2, 4) == 9);   // ceil(2*log2(6)) = 6
    CHECK(b_max(3, 5, 1, 2) == 8);   // ceil(3*log2(5)) = 7
}

TEST_CASE("lossless width is one more bit at the negative extreme") {
    CHECK(lossless_width(5, 16, 1, 6) == 26);
    CHECK(lossless_width(1, 2, 1, 1) == 2);
    CHECK(lossless_width(2, 2, 1, 2) == 4);   // G=4, range [-8, 4]
    CHECK(lossless_width(5, 16, 1, 6) == b_max(5, 16, 1, 6) + 1);
}

TEST_CASE("total growth factor, including past 64 bits") {
    const auto g = g_max(5, 16, 1);
    CHECK(g.fits_u64);
    CHECK(g.value == 1048576u);
    CHECK(g.decimal == "1048576");

    CHECK(g_max(1, 2, 1).value == 2u);
    CHECK(g_max(3, 4, 2).value == 512u);

    const auto big = g_max(13, 32, 1);   // 2^65
    CHECK_FALSE(big.fits_u64);
    CHECK(big.decimal == "36893488147419103232");
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(CicConfig::default_preset().validate());
    CHECK_NOTHROW(CicConfig::lossless(5, 16, 1, 6).validate());

    auto cfg = CicConfig::default_preset();
    cfg.stage_widths.pop_back();
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg = CicConfig::default_preset();
    cfg.stage_widths = {25, 22, 23, 18, 16, 16};   // widths grow mid-cascade
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg = CicConfig::default_preset();
    cfg.retain_phase = 16;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg.retain_phase = -1;
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg = CicConfig::default_preset();
    cfg.decimation = 1;
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg = CicConfig::default_preset();
    cfg.stage_widths = {5, 5, 5, 5, 5, 5};   // narrower than the 6-bit input
    CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("default register schedule") {
    const auto cfg = CicConfig::default_preset();
    CHECK(cfg.n_stages == 5);
    CHECK(cfg.diff_delay == 1);
    CHECK(cfg.decimation == 16);
    CHECK(cfg.input_width == 6);
    CHECK(cfg.stage_widths == std::vector<int>{25, 22, 20, 18, 16, 16});
    CHECK(cfg.output_width() == 16);
    CHECK(cfg.resolved_phase() == 15);
    CHECK(cfg.stage_widths[0] == b_max(5, 16, 1, 6));
}

TEST_CASE("undecimated impulse response equals the iterated boxcar") {
    const auto h22 = undecimated_impulse_response(CicConfig::lossless(2, 2, 1, 2));
    CHECK(h22 == std::vector<std::int64_t>{1, 2, 1});
    CHECK(h22 == oracle::cic_impulse(2, 2, 1));

    const auto h = undecimated_impulse_response(CicConfig::default_preset());
    CHECK(h == oracle::cic_impulse(5, 16, 1));
    CHECK(h.size() == 76u);   // N*(R*M-1)+1

    std::int64_t sum = 0, peak = 0;
    double sumsq = 0.0;
    for (const auto v : h) {
        sum += v;
        peak = std::max(peak, v);
        sumsq += double(v) * double(v);
    }
    CHECK(sum == 1048576);
    CHECK(peak == 39280);
    CHECK(sumsq == doctest::Approx(29632604816.0).epsilon(1e-12));
}

TEST_CASE("closed-form magnitude") {
    const auto cfg = CicConfig::default_preset();
    CHECK(reference_magnitude(cfg, 0.0) == 1048576.0);
    // Nulls at multiples of 1/(R*M).
    for (int k = 1; k <= 8; ++k) CHECK(reference_magnitude(cfg, k / 16.0) <= 1e-40);
    CHECK(reference_magnitude(cfg, 7000.0 / 6144000.0) / 1048576.0 ==
          doctest::Approx(0.997281001775).epsilon(1e-9));
    CHECK(reference_magnitude(cfg, 21770.0 / 6144000.0) / 1048576.0 ==
          doctest::Approx(0.973985017962).epsilon(1e-9));
    CHECK_THROWS_AS(reference_magnitude(cfg, 0.6), config_error);
}

TEST_CASE("impulse-response DFT matches the closed form") {
    const auto cfg = CicConfig::default_preset();
    const auto h = undecimated_impulse_response(cfg);
    const double dc = reference_magnitude(cfg, 0.0);
    for (double f : {0.0, 7000.0 / 6144000.0, 21770.0 / 6144000.0, 1.0 / 32.0, 0.1,
                     3.0 / 16.0, 0.3, 0.4375, 0.5}) {
        const double got = dft_magnitude(h, f);
        const double want = reference_magnitude(cfg, f);
        CHECK(std::abs(got - want) <= 1e-9 * std::max(want, dc * 1e-3));
    }
    // The structural nulls: essentially zero relative to the DC gain.
    for (int k = 1; k <= 7; ++k)
        CHECK(dft_magnitude(h, k / 16.0) <= 1e-9 * dc);
}

TEST_CASE("lossless decimator matches the convolution reference") {
    for (int phase : {-1, 0, 3}) {
        auto cfg = CicConfig::lossless(3, 4, 2, 4);
        if (phase >= 0) cfg.retain_phase = phase;
        const auto x = random_block(cfg, 1024, 0x5EED + std::uint64_t(phase + 1));
        Cic cic(cfg);
        CHECK(cic.process(x).samples == oracle::cic_reference(cfg, x.samples));
    }
}

TEST_CASE("wrapping schedule matches the modular reference") {
    // All registers at 16 bits: far below the 25-bit growth bound, so the
    // integrators wrap constantly. Output must still equal convolution
    // reduced modulo 2^16.
    auto cfg = CicConfig::default_preset();
    cfg.stage_widths = {16, 16, 16, 16, 16, 16};
    auto x = constant_block(4096, 31, 6);   // worst-case DC drives the fastest wrapping
    const auto tail = random_block(cfg, 4096, 99);
    x.samples.insert(x.samples.end(), tail.samples.begin(), tail.samples.end());
    Cic cic(cfg);
    CHECK(cic.process(x).samples == oracle::cic_reference(cfg, x.samples));
}

TEST_CASE("constant input settles to the exact DC gain when lossless") {
    const auto cfg = CicConfig::lossless(5, 16, 1, 6);
    Cic cic(cfg);
    const auto y = cic.process(constant_block(16 * 64, 1, 6));
    REQUIRE(y.size() == 64u);
    for (std::size_t k = 16; k < y.size(); ++k) CHECK(y.samples[k] == 1048576);
}

TEST_CASE("output length is input/R for divisible lengths, any phase") {
    for (int phase : {0, 5, 15}) {
        auto cfg = CicConfig::default_preset();
        cfg.retain_phase = phase;
        Cic cic(cfg);
        CHECK(cic.process(constant_block(16 * 37, 0, 6)).size() == 37u);
        cic.reset();
        CHECK(cic.process(constant_block(16, 0, 6)).size() == 1u);
    }
}

TEST_CASE("streaming is chunk-size invariant") {
    const auto cfg = CicConfig::default_preset();
    const auto x = random_block(cfg, 3000, 0xABCD);

    Cic one(cfg);
    const auto whole = one.process(x).samples;

    Cic chunked(cfg);
    std::vector<std::int64_t> got;
    std::mt19937_64 rng(1);
    std::size_t at = 0;
    while (at < x.size()) {
        const std::size_t n = std::min<std::size_t>(1 + rng() % 97, x.size() - at);
        SampleBlock part;
        part.width = cfg.input_width;
        part.samples.assign(x.samples.begin() + long(at), x.samples.begin() + long(at + n));
        const auto y = chunked.process(part).samples;
        got.insert(got.end(), y.begin(), y.end());
        at += n;
    }
    CHECK(got == whole);

    chunked.reset();
    CHECK(chunked.process(x).samples == whole);
}

TEST_CASE("adder kind never changes the numbers") {
    for (auto base : {CicConfig::default_preset(), CicConfig::lossless(4, 8, 1, 5)}) {
        auto a = base, b = base;
        a.adder_kind = AdderKind::mcla;
        b.adder_kind = AdderKind::ripple;
        const auto x = random_block(base, 2048, 0xFEED);
        Cic ca(a), cb(b);
        CHECK(ca.process(x).samples == cb.process(x).samples);
    }
}

TEST_CASE("pipelined output is the flat output delayed N-1 samples") {
    auto flat_cfg = CicConfig::default_preset();
    auto pipe_cfg = flat_cfg;
    pipe_cfg.pipelined = true;

    Cic flat(flat_cfg), pipe(pipe_cfg);
    CHECK(flat.pipeline_latency() == 0);
    CHECK(pipe.pipeline_latency() == 4);

    const auto x = random_block(flat_cfg, 8000, 0x17);
    const auto yf = flat.process(x).samples;
    const auto yp = pipe.process(x).samples;

    // The pipelined machine fires N input clocks later, so it may emit one
    // fewer output before the stream ends.
    REQUIRE(yp.size() <= yf.size());
    REQUIRE(yf.size() - yp.size() <= 1u);
    const std::size_t lat = 4;
    for (std::size_t k = 0; k < yp.size(); ++k) {
        const std::int64_t want = k < lat ? 0 : yf[k - lat];
        CHECK(yp[k] == want);
    }
}

TEST_CASE("output block carries rate and width") {
    auto x = constant_block(160, 1, 6);
    x.rate_hz = 6144000.0;
    Cic cic(CicConfig::default_preset());
    const auto y = cic.process(x);
    CHECK(y.rate_hz == doctest::Approx(384000.0));
    CHECK(y.width == 16);
}

TEST_CASE("truncation report is zero for identical schedules") {
    const auto cfg = CicConfig::lossless(5, 16, 1, 6);
    const auto x = random_block(cfg, 8192, 3);
    const auto rep = truncation_error_report(cfg, cfg, x);
    CHECK(rep.samples == 512u);
    CHECK(rep.scale_shift == 0);
    CHECK(rep.max_abs_lsb == 0.0);
    CHECK(rep.rms_lsb == 0.0);
}

TEST_CASE("truncation error regression for the default schedule") {
    // Frozen measurement: 200000 uniform full-scale samples, seed 0xC1CDEC.
    // The error floor sits near the design-time prediction of ~59 LSB rms
    // for this register schedule.
    const auto trunc = CicConfig::default_preset();
    const auto lossless = CicConfig::lossless(5, 16, 1, 6);
    const auto x = random_block(trunc, 200000, 0xC1CDEC);
    const auto rep = truncation_error_report(trunc, lossless, x);
    CHECK(rep.samples == 12500u);
    CHECK(rep.scale_shift == 9);
    CHECK(rep.rms_lsb == doctest::Approx(58.203152).epsilon(1e-6));
    CHECK(rep.max_abs_lsb == doctest::Approx(291.611).epsilon(1e-3));
}
