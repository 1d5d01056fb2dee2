// SPDX-License-Identifier: Apache-2.0

#include "cicdec/cic.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numbers>

namespace cicdec {

using boost::multiprecision::cpp_int;

namespace {

cpp_int growth(int n_stages, int decimation, int diff_delay) {
    if (n_stages < 1 || diff_delay < 1 || decimation < 2)
        throw config_error("cic: need N >= 1, M >= 1, R >= 2");
    cpp_int g = 1;
    for (int i = 0; i < n_stages; ++i) g *= decimation * diff_delay;
    return g;
}

int ceil_log2(const cpp_int& v) {
    const unsigned k = boost::multiprecision::msb(v);
    const bool pow2 = (v == cpp_int(1) << k);
    return static_cast<int>(k) + (pow2 ? 0 : 1);
}

} // namespace

CicConfig CicConfig::default_preset() {
    CicConfig cfg;
    cfg.n_stages = 5;
    cfg.diff_delay = 1;
    cfg.decimation = 16;
    cfg.input_width = 6;
    cfg.stage_widths = {25, 22, 20, 18, 16, 16};
    return cfg;
}

CicConfig CicConfig::lossless(int n_stages, int decimation, int diff_delay, int input_width) {
    CicConfig cfg;
    cfg.n_stages = n_stages;
    cfg.diff_delay = diff_delay;
    cfg.decimation = decimation;
    cfg.input_width = input_width;
    const int w = lossless_width(n_stages, decimation, diff_delay, input_width);
    cfg.stage_widths.assign(static_cast<std::size_t>(n_stages) + 1, w);
    return cfg;
}

void CicConfig::validate() const {
    if (n_stages < 1) throw config_error("cic: n_stages must be >= 1");
    if (diff_delay < 1) throw config_error("cic: diff_delay must be >= 1");
    if (decimation < 2) throw config_error("cic: decimation must be >= 2");
    if (input_width < 1 || input_width > 62)
        throw config_error("cic: input_width out of range");
    if (stage_widths.size() != static_cast<std::size_t>(n_stages) + 1)
        throw config_error("cic: stage_widths needs n_stages+1 entries, got " +
                           std::to_string(stage_widths.size()));
    for (std::size_t i = 0; i < stage_widths.size(); ++i) {
        if (stage_widths[i] < 1 || stage_widths[i] > 64)
            throw config_error("cic: stage width out of [1,64]");
        if (i > 0 && stage_widths[i] > stage_widths[i - 1])
            throw config_error("cic: stage_widths must be non-increasing");
    }
    if (stage_widths[0] < input_width)
        throw config_error("cic: first stage narrower than input");
    if (retain_phase && (*retain_phase < 0 || *retain_phase >= decimation))
        throw config_error("cic: retain_phase out of [0,R)");
}

int b_max(int n_stages, int decimation, int diff_delay, int input_width) {
    if (input_width < 1) throw config_error("b_max: input_width must be >= 1");
    return ceil_log2(growth(n_stages, decimation, diff_delay)) + input_width - 1;
}

int lossless_width(int n_stages, int decimation, int diff_delay, int input_width) {
    if (input_width < 1) throw config_error("lossless_width: input_width must be >= 1");
    const cpp_int g = growth(n_stages, decimation, diff_delay);
    const cpp_int hi = g * ((cpp_int(1) << (input_width - 1)) - 1);
    const cpp_int lo = g << (input_width - 1);   // magnitude of the negative bound
    int w = 1;
    while ((cpp_int(1) << (w - 1)) < lo || (cpp_int(1) << (w - 1)) - 1 < hi) ++w;
    if (w > 64) throw config_error("lossless_width: exceeds 64 bits");
    return w;
}

RegisterGrowth g_max(int n_stages, int decimation, int diff_delay) {
    const cpp_int g = growth(n_stages, decimation, diff_delay);
    RegisterGrowth r;
    r.decimal = g.str();
    if (g <= cpp_int(std::numeric_limits<std::uint64_t>::max())) {
        r.fits_u64 = true;
        r.value = g.convert_to<std::uint64_t>();
    } else {
        r.fits_u64 = false;
        r.value = 0;
    }
    return r;
}

double reference_magnitude(const CicConfig& cfg, double f_norm) {
    if (!(f_norm >= 0.0 && f_norm <= 0.5))
        throw config_error("reference_magnitude: f_norm must be in [0, 0.5]");
    const double rm = static_cast<double>(cfg.decimation) * cfg.diff_delay;
    if (f_norm == 0.0) return std::pow(rm, cfg.n_stages);
    const double num = std::sin(std::numbers::pi * f_norm * rm);
    const double den = std::sin(std::numbers::pi * f_norm);
    return std::pow(std::abs(num / den), cfg.n_stages);
}

std::vector<std::int64_t> undecimated_impulse_response(const CicConfig& cfg) {
    cfg.validate();
    const int rm = cfg.decimation * cfg.diff_delay;
    const std::size_t len = static_cast<std::size_t>(cfg.n_stages) * (rm - 1) + 1;
    const int w = lossless_width(cfg.n_stages, cfg.decimation, cfg.diff_delay, cfg.input_width);

    // Same integrator/comb cascade, no rate change: combs run at the input
    // rate with delay R*M, which is the polynomial the decimator applies.
    std::vector<Word> integ(static_cast<std::size_t>(cfg.n_stages), Word(0, w));
    std::vector<std::vector<Word>> lines(
        static_cast<std::size_t>(cfg.n_stages),
        std::vector<Word>(static_cast<std::size_t>(rm), Word(0, w)));
    std::vector<int> pos(static_cast<std::size_t>(cfg.n_stages), 0);

    std::vector<std::int64_t> h;
    h.reserve(len);
    for (std::size_t n = 0; n < len; ++n) {
        Word v(n == 0 ? 1 : 0, w);
        for (auto& reg : integ) {
            reg = wrap_add(reg, v);
            v = reg;
        }
        for (int s = 0; s < cfg.n_stages; ++s) {
            auto& line = lines[static_cast<std::size_t>(s)];
            int& p = pos[static_cast<std::size_t>(s)];
            const Word old = line[static_cast<std::size_t>(p)];
            line[static_cast<std::size_t>(p)] = v;
            p = (p + 1) % rm;
            v = wrap_sub(v, old);
        }
        h.push_back(v.value());
    }
    return h;
}

Cic::Cic(CicConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    reset();
}

void Cic::reset() {
    const auto& w = cfg_.stage_widths;
    const std::size_t n = static_cast<std::size_t>(cfg_.n_stages);
    int_regs_.clear();
    pipe_regs_.clear();
    for (std::size_t i = 0; i < n; ++i) {
        int_regs_.emplace_back(0, w[i]);
        pipe_regs_.emplace_back(0, w[i + 1]);
    }
    comb_lines_.assign(n, std::vector<Word>(static_cast<std::size_t>(cfg_.diff_delay),
                                            Word(0, w[n])));
    comb_pos_.assign(n, 0);
    comb_pipes_.assign(n > 0 ? n - 1 : 0, Word(0, w[n]));
    comb_in_.assign(n, Word(0, w[n]));
    comb_out_.assign(n, Word(0, w[n]));
    n_in_ = 0;
}

int Cic::pipeline_latency() const {
    return cfg_.pipelined ? cfg_.n_stages - 1 : 0;
}

Word Cic::comb_stage(int stage, Word x) {
    auto& line = comb_lines_[static_cast<std::size_t>(stage)];
    int& p = comb_pos_[static_cast<std::size_t>(stage)];
    const Word old = line[static_cast<std::size_t>(p)];
    line[static_cast<std::size_t>(p)] = x;
    p = (p + 1) % cfg_.diff_delay;
    return gate_sub(cfg_.adder_kind, x, old);
}

SampleBlock Cic::process(const SampleBlock& in) {
    const int n = cfg_.n_stages;
    const int r = cfg_.decimation;
    const int phase = cfg_.resolved_phase();
    const auto& w = cfg_.stage_widths;
    const AdderKind kind = cfg_.adder_kind;

    SampleBlock out;
    out.rate_hz = in.rate_hz > 0 ? in.rate_hz / r : 0.0;
    out.width = w[static_cast<std::size_t>(n)];
    out.samples.reserve(in.samples.size() / static_cast<std::size_t>(r) + 1);

    for (const std::int64_t s : in.samples) {
        if (!Word::fits(s, cfg_.input_width))
            throw input_error("cic: sample " + std::to_string(s) + " exceeds " +
                              std::to_string(cfg_.input_width) + "-bit input range");
        const Word x(s, cfg_.input_width);

        if (!cfg_.pipelined) {
            Word v = sign_extend(x, w[0]);
            for (int i = 0; i < n; ++i) {
                auto& reg = int_regs_[static_cast<std::size_t>(i)];
                reg = gate_add(kind, reg, v);
                v = truncate_lsb(reg, w[static_cast<std::size_t>(i) + 1]);
            }
            if (n_in_ % r == phase) {
                for (int s2 = 0; s2 < n; ++s2) v = comb_stage(s2, v);
                out.samples.push_back(v.value());
            }
        } else {
            // Registered datapath. The downsampler and every stage past the
            // first consume the value latched on the previous clock, so the
            // stages are updated last-to-first within one input clock. The
            // decimation counter starts once the integrator pipeline has
            // filled (n clocks), which keeps retained values aligned with
            // the flat model.
            if (n_in_ >= n && (n_in_ - n) % r == phase) {
                comb_in_[0] = pipe_regs_[static_cast<std::size_t>(n) - 1];
                for (int j = 1; j < n; ++j)
                    comb_in_[static_cast<std::size_t>(j)] = comb_pipes_[static_cast<std::size_t>(j) - 1];
                for (int j = 0; j < n; ++j)
                    comb_out_[static_cast<std::size_t>(j)] = comb_stage(j, comb_in_[static_cast<std::size_t>(j)]);
                for (int j = 0; j + 1 < n; ++j)
                    comb_pipes_[static_cast<std::size_t>(j)] = comb_out_[static_cast<std::size_t>(j)];
                out.samples.push_back(comb_out_[static_cast<std::size_t>(n) - 1].value());
            }
            for (int i = n - 1; i >= 0; --i) {
                const Word v = i == 0 ? sign_extend(x, w[0])
                                      : pipe_regs_[static_cast<std::size_t>(i) - 1];
                auto& reg = int_regs_[static_cast<std::size_t>(i)];
                reg = gate_add(kind, reg, v);
                pipe_regs_[static_cast<std::size_t>(i)] =
                    truncate_lsb(reg, w[static_cast<std::size_t>(i) + 1]);
            }
        }
        ++n_in_;
    }
    return out;
}

TruncationErrorReport truncation_error_report(const CicConfig& truncated,
                                              const CicConfig& lossless,
                                              const SampleBlock& block) {
    if (truncated.n_stages != lossless.n_stages || truncated.diff_delay != lossless.diff_delay ||
        truncated.decimation != lossless.decimation)
        throw config_error("truncation_error_report: N, M, R must match");

    const auto dropped = [](const CicConfig& c) {
        int d = 0;
        for (std::size_t i = 0; i + 1 < c.stage_widths.size(); ++i)
            d += c.stage_widths[i] - c.stage_widths[i + 1];
        return d;
    };

    Cic a(truncated), b(lossless);
    const SampleBlock ya = a.process(block);
    const SampleBlock yb = b.process(block);

    TruncationErrorReport rep;
    rep.samples = ya.samples.size();
    rep.scale_shift = dropped(truncated) - dropped(lossless);
    const double scale = std::pow(2.0, -rep.scale_shift);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < ya.samples.size(); ++i) {
        const double e = static_cast<double>(ya.samples[i]) -
                         static_cast<double>(yb.samples[i]) * scale;
        rep.max_abs_lsb = std::max(rep.max_abs_lsb, std::abs(e));
        sum_sq += e * e;
    }
    if (rep.samples > 0) rep.rms_lsb = std::sqrt(sum_sq / static_cast<double>(rep.samples));
    return rep;
}

} // namespace cicdec
