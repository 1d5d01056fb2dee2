// SPDX-License-Identifier: Apache-2.0

#include "cicdec/chain.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace cicdec {

namespace {

double quantized_dc_gain(const FirFilter& f) {
    double sum = 0.0;
    for (const Word& w : f.quantized_coeffs) sum += static_cast<double>(w.value());
    return sum / static_cast<double>(f.format.scale());
}

template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const input_error& e) {
        throw input_error(std::string(stage) + ": " + e.what());
    } catch (const design_error& e) {
        throw design_error(std::string(stage) + ": " + e.what());
    }
}

} // namespace

void ChainConfig::validate() const {
    cic.validate();
    if (!(input_rate_hz > 0)) throw config_error("chain: input rate must be positive");
    for (const FirFilter* f : {&hb1, &droop, &hb2}) {
        if (!f->is_quantized()) throw config_error("chain: stage filters must be quantized");
        if (f->decimation != 2) throw config_error("chain: stage filters must decimate by 2");
    }
    if (output_width < 2 || output_width > data_width)
        throw config_error("chain: output width out of range");
    if (normalize_shift < 0 || normalize_shift >= data_width)
        throw config_error("chain: normalize shift out of range");
    if (cic.output_width() > data_width)
        throw config_error("chain: CIC output wider than the FIR datapath");
}

int ChainConfig::total_decimation() const {
    return cic.decimation * hb1.decimation * droop.decimation * hb2.decimation;
}

double ChainConfig::dc_gain() const {
    int dropped = 0;
    for (std::size_t i = 0; i + 1 < cic.stage_widths.size(); ++i)
        dropped += cic.stage_widths[i] - cic.stage_widths[i + 1];
    const RegisterGrowth g = g_max(cic.n_stages, cic.decimation, cic.diff_delay);
    const double cic_gain = static_cast<double>(g.value) * std::pow(2.0, -dropped);
    return cic_gain * quantized_dc_gain(hb1) * quantized_dc_gain(droop) *
           quantized_dc_gain(hb2) * std::pow(2.0, -normalize_shift);
}

double ChainConfig::group_delay_output_samples() const {
    const double r1 = cic.decimation, r2 = hb1.decimation, r3 = droop.decimation,
                 r4 = hb2.decimation;
    const double cic_delay =
        cic.n_stages * (cic.decimation * cic.diff_delay - 1) / 2.0;
    return cic_delay / (r1 * r2 * r3 * r4) + hb1.group_delay() / (r2 * r3 * r4) +
           droop.group_delay() / (r3 * r4) + hb2.group_delay() / r4;
}

ChainConfig build_default_chain() {
    ChainConfig cfg;
    cfg.cic = CicConfig::default_preset();

    const double cic_out = cfg.input_rate_hz / cfg.cic.decimation;   // 384 kHz

    FilterSpec hb1_spec;
    hb1_spec.pass_edge_hz = 32'000.0;
    hb1_spec.stop_edge_hz = 170'000.0;
    hb1_spec.input_rate_hz = cic_out;

    FilterSpec droop_spec;
    droop_spec.pass_edge_hz = 32'000.0;
    droop_spec.stop_edge_hz = 70'000.0;
    droop_spec.input_rate_hz = cic_out / 2.0;                        // 192 kHz

    FilterSpec hb2_spec;
    hb2_spec.pass_edge_hz = 21'770.0;
    hb2_spec.stop_edge_hz = 26'530.0;
    hb2_spec.input_rate_hz = cic_out / 4.0;                          // 96 kHz

    const QFormat q15;   // Q1.15
    cfg.hb1 = with_stage("hb1", [&] { return quantize_coeffs(design_halfband(hb1_spec), q15); });
    cfg.droop = with_stage("droop", [&] {
        return quantize_coeffs(design_droop_correction(cfg.cic, cfg.input_rate_hz, droop_spec), q15);
    });
    cfg.hb2 = with_stage("hb2", [&] { return quantize_coeffs(design_halfband(hb2_spec), q15); });

    cfg.data_width = 16;
    cfg.output_width = 16;
    return cfg;
}

ChainConfig build_lossless_chain() {
    ChainConfig cfg = build_default_chain();
    cfg.cic = CicConfig::lossless(cfg.cic.n_stages, cfg.cic.decimation, cfg.cic.diff_delay,
                                  cfg.cic.input_width);
    cfg.data_width = cfg.cic.output_width();
    cfg.output_width = cfg.data_width;
    return cfg;
}

namespace {
ChainConfig validated(ChainConfig cfg) {
    cfg.validate();
    return cfg;
}
} // namespace

Chain::Chain(ChainConfig cfg)
    : cfg_(validated(std::move(cfg))),
      cic_(cfg_.cic),
      hb1_(cfg_.hb1, cfg_.data_width),
      droop_(cfg_.droop, cfg_.data_width),
      hb2_(cfg_.hb2, cfg_.data_width) {}

void Chain::reset() {
    cic_.reset();
    hb1_.reset();
    droop_.reset();
    hb2_.reset();
}

SampleBlock Chain::run(const SampleBlock& in) {
    if (in.width > cfg_.cic.input_width)
        throw input_error("chain: input width " + std::to_string(in.width) +
                          " exceeds CIC input width " + std::to_string(cfg_.cic.input_width));

    SampleBlock x = with_stage("cic", [&] { return cic_.process(in); });
    x = with_stage("hb1", [&] { return hb1_.process(x); });
    x = with_stage("droop", [&] { return droop_.process(x); });
    x = with_stage("hb2", [&] { return hb2_.process(x); });

    if (cfg_.normalize_shift > 0 || cfg_.output_width != cfg_.data_width) {
        for (auto& s : x.samples)
            s = Word::wrap(s >> cfg_.normalize_shift, cfg_.output_width).value();
        x.width = cfg_.output_width;
    }
    return x;
}

} // namespace cicdec
