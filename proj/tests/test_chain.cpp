// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cicdec/analysis.hpp"
#include "cicdec/chain.hpp"
#include "cicdec/errors.hpp"
#include "cicdec/source.hpp"

using namespace cicdec;

namespace {

SampleBlock bitstream(std::size_t len, std::uint64_t seed) {
    // Modulated single-bit data, the chain's natural diet.
    ToneSpec t;
    t.freq_hz = 997.0;
    t.amplitude = 0.5;
    t.sample_rate_hz = 6144000.0;
    t.length = len;
    SigmaDeltaModulator m;
    auto b = m.modulate(gen_tone(t));
    if (seed != 0) {   // decorrelate variants without touching the modulator
        std::mt19937_64 rng(seed);
        for (auto& v : b.samples)
            if ((rng() & 0xFF) == 0) v = -v;
    }
    return b;
}

} // namespace

TEST_CASE("default chain geometry") {
    const ChainConfig cfg = build_default_chain();
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.total_decimation() == 128);
    CHECK(cfg.output_rate_hz() == doctest::Approx(48000.0));
    CHECK(cfg.input_rate_hz == 6144000.0);
    CHECK(cfg.data_width == 16);
    CHECK(cfg.output_width == 16);

    CHECK(cfg.cic.stage_widths == std::vector<int>{25, 22, 20, 18, 16, 16});
    CHECK(cfg.hb1.taps() == 19);
    CHECK(cfg.droop.taps() == 31);
    CHECK(cfg.hb2.taps() == 127);
    for (const FirFilter* f : {&cfg.hb1, &cfg.droop, &cfg.hb2}) {
        CHECK(f->is_quantized());
        CHECK(f->format.str() == "Q1.15");
    }

    // 2^20 of CIC growth over 9 dropped LSBs, times three near-unity FIR
    // stages: nominal gain right around 2^11.
    CHECK(cfg.dc_gain() == doctest::Approx(2048.0).epsilon(2e-3));
    // 37.5/128 + 9/8 + 15/4 + 63/2 of stage delays on the output axis.
    CHECK(cfg.group_delay_output_samples() == doctest::Approx(36.668).epsilon(0.001));
}

TEST_CASE("lossless chain geometry") {
    const ChainConfig cfg = build_lossless_chain();
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.total_decimation() == 128);
    CHECK(cfg.cic.stage_widths == std::vector<int>(6, 26));
    CHECK(cfg.data_width == 26);
    CHECK(cfg.output_width == 26);
    // No dropped LSBs: the full 2^20 growth reaches the output.
    CHECK(cfg.dc_gain() == doctest::Approx(1048576.0).epsilon(2e-3));
}

TEST_CASE("config validation rejects bad setups") {
    ChainConfig cfg = build_default_chain();
    cfg.normalize_shift = -1;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg.normalize_shift = 16;
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg = build_default_chain();
    cfg.output_width = 17;   // wider than the datapath
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg = build_default_chain();
    cfg.hb1.quantized_coeffs.clear();
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg = build_default_chain();
    cfg.data_width = 24;   // CIC hands over 16 bits; 24 is fine
    cfg.output_width = 24;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("zeros in, zeros out, 48 kHz tag") {
    Chain chain(build_default_chain());
    SampleBlock x;
    x.rate_hz = 6144000.0;
    x.width = 2;
    x.samples.assign(128 * 100, 0);
    const auto y = chain.run(x);
    CHECK(y.size() == 100u);
    CHECK(y.rate_hz == doctest::Approx(48000.0));
    CHECK(y.width == 16);
    for (const auto v : y.samples) CHECK(v == 0);
}

TEST_CASE("output length is input length over 128") {
    Chain chain(build_default_chain());
    const auto x = bitstream(128 * 375, 0);
    CHECK(chain.run(x).size() == 375u);

    chain.reset();
    SampleBlock one;
    one.width = 2;
    one.samples.assign(128, 1);
    CHECK(chain.run(one).size() == 1u);
}

TEST_CASE("constant full-scale-ish input settles to dc_gain times the input") {
    const ChainConfig cfg = build_default_chain();
    Chain chain(cfg);
    SampleBlock x;
    x.width = 6;
    x.samples.assign(128 * 160, 15);
    const auto y = chain.run(x).samples;
    REQUIRE(y.size() == 160u);
    const double nominal = 15.0 * cfg.dc_gain();
    for (std::size_t k = 100; k < y.size(); ++k)
        CHECK(std::abs(double(y[k]) - nominal) <= 3.0);
}

TEST_CASE("chain equals its stages composed by hand") {
    const ChainConfig cfg = build_default_chain();
    const auto x = bitstream(128 * 200, 5);

    Chain chain(cfg);
    const auto got = chain.run(x).samples;

    Cic cic(cfg.cic);
    Decimator2 hb1(cfg.hb1, cfg.data_width);
    Decimator2 droop(cfg.droop, cfg.data_width);
    Decimator2 hb2(cfg.hb2, cfg.data_width);
    const auto want = hb2.process(droop.process(hb1.process(cic.process(x)))).samples;

    CHECK(got == want);
}

TEST_CASE("streaming is chunk-size invariant") {
    const auto x = bitstream(128 * 150, 7);
    Chain whole(build_default_chain());
    const auto want = whole.run(x).samples;

    Chain chunked(build_default_chain());
    std::vector<std::int64_t> got;
    std::mt19937_64 rng(21);
    std::size_t at = 0;
    while (at < x.size()) {
        const std::size_t n = std::min<std::size_t>(1 + rng() % 1023, x.size() - at);
        SampleBlock part;
        part.width = x.width;
        part.rate_hz = x.rate_hz;
        part.samples.assign(x.samples.begin() + long(at), x.samples.begin() + long(at + n));
        const auto y = chunked.run(part).samples;
        got.insert(got.end(), y.begin(), y.end());
        at += n;
    }
    CHECK(got == want);

    chunked.reset();
    CHECK(chunked.run(x).samples == want);
}

TEST_CASE("input wider than the CIC front end is rejected") {
    Chain chain(build_default_chain());
    SampleBlock x;
    x.width = 6;
    x.samples.assign(128, 40);   // does not fit 6 bits
    CHECK_THROWS_AS(chain.run(x), input_error);
}

TEST_CASE("measured frequency response equals the product of stage responses") {
    const ChainConfig cfg = build_default_chain();

    SweepTarget target;
    target.input_rate_hz = cfg.input_rate_hz;
    target.input_width = cfg.cic.input_width;
    target.out_decimation = cfg.total_decimation();
    target.settle_outputs = int(std::ceil(cfg.group_delay_output_samples())) + 16;
    target.measure_outputs = 256;
    target.run = [&](const SampleBlock& in) {
        Chain chain(cfg);
        return chain.run(in);
    };

    const std::vector<double> freqs{0.0,     1000.0,  3000.0,  7000.0,
                                    12000.0, 18000.0, 21000.0};
    const auto pts = response_sweep(target, freqs);
    REQUIRE(pts.size() == freqs.size());

    const double cic_dc = reference_magnitude(cfg.cic, 0.0);
    const double dc_gain = cfg.dc_gain();
    for (const auto& p : pts) {
        const double cic_rel = reference_magnitude(cfg.cic, p.f_hz / cfg.input_rate_hz) / cic_dc;
        const double a1 = fir_magnitude_at(cfg.hb1.dequantized(), p.f_hz / 384000.0) /
                          fir_magnitude_at(cfg.hb1.dequantized(), 0.0);
        const double a2 = fir_magnitude_at(cfg.droop.dequantized(), p.f_hz / 192000.0) /
                          fir_magnitude_at(cfg.droop.dequantized(), 0.0);
        const double a3 = fir_magnitude_at(cfg.hb2.dequantized(), p.f_hz / 96000.0) /
                          fir_magnitude_at(cfg.hb2.dequantized(), 0.0);
        const double want_db = 20.0 * std::log10(dc_gain * cic_rel * a1 * a2 * a3);
        CHECK(p.gain_db == doctest::Approx(want_db).scale(1.0).epsilon(0.05));
    }
}
