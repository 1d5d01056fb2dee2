// SPDX-License-Identifier: Apache-2.0

#include "cicdec/fir.hpp"

#include <Eigen/Dense>

#include <cfenv>
#include <cmath>
#include <complex>
#include <numbers>

namespace cicdec {

namespace {

constexpr int kMaxTaps = 255;
constexpr double kPi = std::numbers::pi;

double bessel_i0(double x) {
    // Power series; converges quickly for the beta range Kaiser uses.
    double sum = 1.0, term = 1.0;
    const double half_sq = 0.25 * x * x;
    for (int k = 1; k < 80; ++k) {
        term *= half_sq / (static_cast<double>(k) * k);
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return sum;
}

double kaiser_beta(double atten_db) {
    if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
    if (atten_db >= 21.0)
        return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
    return 0.0;
}

int kaiser_length(double atten_db, double transition_norm) {
    const double n = (atten_db - 7.95) / (2.285 * 2.0 * kPi * transition_norm) + 1.0;
    return static_cast<int>(std::ceil(n));
}

double kaiser_win(int offset, int half, double beta) {
    const double r = static_cast<double>(offset) / static_cast<double>(half);
    return bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / bessel_i0(beta);
}

std::vector<std::pair<double, double>> unity_pass_grid(const FilterSpec& spec, int points) {
    std::vector<std::pair<double, double>> grid;
    grid.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid.emplace_back(spec.pass_edge_hz * i / (points - 1), 1.0);
    return grid;
}

} // namespace

void FilterSpec::validate() const {
    if (!(input_rate_hz > 0))
        throw config_error("filter spec: input rate must be positive");
    if (!(0 < pass_edge_hz && pass_edge_hz < stop_edge_hz && stop_edge_hz < input_rate_hz / 2))
        throw config_error("filter spec: need 0 < pass < stop < rate/2");
    if (!(min_stop_atten_db > 0) || !(max_pass_ripple_db > 0))
        throw config_error("filter spec: attenuation and ripple targets must be positive");
}

QFormat QFormat::parse(std::string_view text) {
    if (text.size() < 4 || (text[0] != 'Q' && text[0] != 'q'))
        throw config_error("bad fixed-point format '" + std::string(text) + "', expected Qx.y");
    const auto dot = text.find('.');
    if (dot == std::string_view::npos)
        throw config_error("bad fixed-point format '" + std::string(text) + "', expected Qx.y");
    QFormat fmt;
    try {
        fmt.int_bits = std::stoi(std::string(text.substr(1, dot - 1)));
        fmt.frac_bits = std::stoi(std::string(text.substr(dot + 1)));
    } catch (const std::exception&) {
        throw config_error("bad fixed-point format '" + std::string(text) + "'");
    }
    if (fmt.int_bits < 0 || fmt.frac_bits < 1 || fmt.width() > 32)
        throw config_error("fixed-point format out of range (total bits must be <= 32)");
    return fmt;
}

std::string QFormat::str() const {
    return "Q" + std::to_string(int_bits) + "." + std::to_string(frac_bits);
}

FirKind parse_fir_kind(std::string_view name) {
    if (name == "halfband") return FirKind::halfband;
    if (name == "droop") return FirKind::droop;
    throw config_error("unknown filter kind '" + std::string(name) + "' (halfband, droop)");
}

std::string_view fir_kind_name(FirKind kind) {
    return kind == FirKind::halfband ? "halfband" : "droop";
}

std::vector<double> FirFilter::dequantized() const {
    std::vector<double> h;
    h.reserve(quantized_coeffs.size());
    const double scale = static_cast<double>(format.scale());
    for (const Word& w : quantized_coeffs) h.push_back(static_cast<double>(w.value()) / scale);
    return h;
}

double fir_amplitude_at(std::span<const double> coeffs, double f_norm) {
    if (coeffs.empty() || coeffs.size() % 2 == 0)
        throw config_error("fir amplitude: expects odd-length symmetric filter");
    const std::size_t c = coeffs.size() / 2;
    double a = coeffs[c];
    for (std::size_t k = 1; k <= c; ++k)
        a += 2.0 * coeffs[c + k] * std::cos(2.0 * kPi * f_norm * static_cast<double>(k));
    return a;
}

double fir_magnitude_at(std::span<const double> coeffs, double f_norm) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        acc += coeffs[k] * std::polar(1.0, -2.0 * kPi * f_norm * static_cast<double>(k));
    return std::abs(acc);
}

FirVerification verify_response(std::span<const double> coeffs, const FilterSpec& spec,
                                std::span<const std::pair<double, double>> pass_targets) {
    constexpr int kStopPoints = 2048;
    const double nyq = spec.input_rate_hz / 2.0;

    FirVerification v;
    double worst_stop = 0.0;
    for (int i = 0; i < kStopPoints; ++i) {
        const double f = spec.stop_edge_hz + (nyq - spec.stop_edge_hz) * i / (kStopPoints - 1);
        worst_stop = std::max(worst_stop, fir_magnitude_at(coeffs, f / spec.input_rate_hz));
    }
    v.stop_atten_db = -20.0 * std::log10(std::max(worst_stop, 1e-20));

    double worst_pass = 0.0;
    for (const auto& [f, target] : pass_targets) {
        const double mag = fir_magnitude_at(coeffs, f / spec.input_rate_hz);
        worst_pass = std::max(worst_pass, std::abs(20.0 * std::log10(mag / target)));
    }
    v.pass_err_db = worst_pass;
    v.met = v.stop_atten_db >= spec.min_stop_atten_db && v.pass_err_db <= spec.max_pass_ripple_db;
    return v;
}

FirFilter design_halfband(const FilterSpec& spec) {
    spec.validate();
    const double quarter = spec.input_rate_hz / 4.0;
    if (!(spec.pass_edge_hz < quarter && quarter < spec.stop_edge_hz))
        throw design_error("halfband: transition band must straddle input_rate/4 "
                           "(pass " + std::to_string(spec.pass_edge_hz) + ", stop " +
                           std::to_string(spec.stop_edge_hz) + ")");

    // The transition is symmetric about rate/4 by construction; use the
    // tighter of the two requested half-widths.
    const double delta = std::min(quarter - spec.pass_edge_hz, spec.stop_edge_hz - quarter);
    const double beta = kaiser_beta(spec.min_stop_atten_db);

    int taps = kaiser_length(spec.min_stop_atten_db, 2.0 * delta / spec.input_rate_hz);
    taps = std::max(taps, 7);
    while (taps % 4 != 3) ++taps;   // odd length with even-offset taps zero

    const auto targets = unity_pass_grid(spec, 512);
    FirVerification last{};
    for (; taps <= kMaxTaps; taps += 4) {
        const int c = (taps - 1) / 2;
        std::vector<double> h(static_cast<std::size_t>(taps), 0.0);
        h[static_cast<std::size_t>(c)] = 0.5;
        for (int k = 1; k <= c; k += 2) {
            // sinc at fc = 1/4: sin(pi k/2)/(pi k), exactly zero for even k
            // (assigned structurally above), alternating sign for odd k.
            const double sign = ((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
            const double v = sign / (kPi * k) * kaiser_win(k, c, beta);
            h[static_cast<std::size_t>(c + k)] = v;
            h[static_cast<std::size_t>(c - k)] = v;
        }
        last = verify_response(h, spec, targets);
        if (last.met) {
            FirFilter f;
            f.kind = FirKind::halfband;
            f.decimation = 2;
            f.coeffs = std::move(h);
            f.spec = spec;
            f.pass_targets = targets;
            f.achieved_stop_atten_db = last.stop_atten_db;
            f.achieved_pass_err_db = last.pass_err_db;
            f.spec_met = true;
            return f;
        }
    }
    throw design_error("halfband: spec not met at 255 taps (achieved stop " +
                       std::to_string(last.stop_atten_db) + " dB, pass err " +
                       std::to_string(last.pass_err_db) + " dB)");
}

FirFilter design_droop_correction(const CicConfig& cic, double cic_rate_hz,
                                  const FilterSpec& spec) {
    spec.validate();
    cic.validate();
    if (!(cic_rate_hz > 0)) throw config_error("droop: cic rate must be positive");

    const double first_null_hz = cic_rate_hz / (cic.decimation * cic.diff_delay);
    if (spec.pass_edge_hz >= first_null_hz)
        throw design_error("droop: pass edge beyond the CIC's first lobe");

    const double dc = reference_magnitude(cic, 0.0);
    const auto target_at = [&](double f_hz) {
        return dc / reference_magnitude(cic, f_hz / cic_rate_hz);
    };

    const double nyq = spec.input_rate_hz / 2.0;
    constexpr int kFitPass = 400, kFitStop = 400, kVerifyPass = 700;
    constexpr double kStopWeight = 100.0;

    std::vector<std::pair<double, double>> targets;
    targets.reserve(kVerifyPass);
    for (int i = 0; i < kVerifyPass; ++i) {
        const double f = spec.pass_edge_hz * i / (kVerifyPass - 1);
        targets.emplace_back(f, target_at(f));
    }

    int taps = kaiser_length(spec.min_stop_atten_db,
                             (spec.stop_edge_hz - spec.pass_edge_hz) / spec.input_rate_hz);
    taps = std::max(taps, 7);
    if (taps % 2 == 0) ++taps;

    FirVerification last{};
    for (; taps <= kMaxTaps; taps += 4) {
        const int half = (taps - 1) / 2;
        const int nc = half + 1;

        Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(nc, nc);
        Eigen::VectorXd atb = Eigen::VectorXd::Zero(nc);
        Eigen::VectorXd phi(nc);
        const auto accumulate = [&](double f_hz, double t, double w) {
            phi(0) = 1.0;
            for (int k = 1; k <= half; ++k)
                phi(k) = 2.0 * std::cos(2.0 * kPi * f_hz / spec.input_rate_hz * k);
            ata.noalias() += w * phi * phi.transpose();
            atb.noalias() += w * t * phi;
        };
        for (int i = 0; i < kFitPass; ++i) {
            const double f = spec.pass_edge_hz * i / (kFitPass - 1);
            accumulate(f, target_at(f), 1.0);
        }
        for (int i = 0; i < kFitStop; ++i)
            accumulate(spec.stop_edge_hz + (nyq - spec.stop_edge_hz) * i / (kFitStop - 1), 0.0,
                       kStopWeight);

        const Eigen::VectorXd a = ata.ldlt().solve(atb);

        std::vector<double> h(static_cast<std::size_t>(taps), 0.0);
        h[static_cast<std::size_t>(half)] = a(0);
        for (int k = 1; k <= half; ++k) {
            h[static_cast<std::size_t>(half + k)] = a(k);
            h[static_cast<std::size_t>(half - k)] = a(k);
        }
        const double gain0 = fir_amplitude_at(h, 0.0);
        for (double& c : h) c /= gain0;

        last = verify_response(h, spec, targets);
        if (last.met) {
            FirFilter f;
            f.kind = FirKind::droop;
            f.decimation = 2;
            f.coeffs = std::move(h);
            f.spec = spec;
            f.pass_targets = targets;
            f.achieved_stop_atten_db = last.stop_atten_db;
            f.achieved_pass_err_db = last.pass_err_db;
            f.spec_met = true;
            return f;
        }
    }
    throw design_error("droop: fit tolerance not met at 255 taps (achieved stop " +
                       std::to_string(last.stop_atten_db) + " dB, pass err " +
                       std::to_string(last.pass_err_db) + " dB)");
}

FirFilter quantize_coeffs(const FirFilter& filter, QFormat format) {
    if (format.width() > 32 || format.frac_bits < 1)
        throw config_error("quantize: format total bits must be in [2,32]");
    FirFilter out = filter;
    out.format = format;
    out.quantized_coeffs.clear();
    out.quantized_coeffs.reserve(filter.coeffs.size());
    for (const double c : filter.coeffs) {
        std::int64_t q = 0;
        if (c != 0.0) {
            // nearbyint under the default FE_TONEAREST mode: ties to even.
            const double scaled = c * static_cast<double>(format.scale());
            q = static_cast<std::int64_t>(std::nearbyint(scaled));
        }
        if (!Word::fits(q, format.width()))
            throw config_error("quantize: coefficient " + std::to_string(c) +
                               " does not fit " + format.str());
        out.quantized_coeffs.emplace_back(q, format.width());
    }
    if (out.spec) {
        const auto v = verify_response(out.dequantized(), *out.spec, out.pass_targets);
        out.achieved_stop_atten_db = v.stop_atten_db;
        out.achieved_pass_err_db = v.pass_err_db;
        out.spec_met = v.met;
    }
    return out;
}

Decimator2::Decimator2(FirFilter filter, int data_width)
    : fir_(std::move(filter)), data_width_(data_width) {
    if (fir_.decimation != 2) throw config_error("decimate2: filter decimation must be 2");
    if (!fir_.is_quantized()) throw config_error("decimate2: quantize coefficients first");
    if (data_width_ < 2 || data_width_ > 48)
        throw config_error("decimate2: data width out of range");
    const int taps = fir_.taps();
    int log2_taps = 0;
    while ((1 << log2_taps) < taps) ++log2_taps;
    if (fir_.format.width() + data_width_ + log2_taps > 63)
        throw config_error("decimate2: accumulator would exceed 64 bits");

    for (int k = 0; k < taps; ++k) {
        const std::int64_t q = fir_.quantized_coeffs[static_cast<std::size_t>(k)].value();
        (k % 2 == 0 ? h_even_ : h_odd_).push_back(q);
    }
    reset();
}

void Decimator2::reset() {
    buf_even_.assign(h_even_.size(), 0);
    buf_odd_.assign(std::max<std::size_t>(h_odd_.size(), 1), 0);
    pos_even_ = 0;
    pos_odd_ = 0;
    next_is_even_ = true;
}

SampleBlock Decimator2::process(const SampleBlock& in) {
    SampleBlock out;
    out.rate_hz = in.rate_hz > 0 ? in.rate_hz / 2.0 : 0.0;
    out.width = data_width_;
    out.samples.reserve(in.samples.size() / 2 + 1);

    const int shift = fir_.format.frac_bits;
    for (const std::int64_t s : in.samples) {
        if (!Word::fits(s, data_width_))
            throw input_error("decimate2: sample " + std::to_string(s) + " exceeds " +
                              std::to_string(data_width_) + "-bit data width");
        if (next_is_even_) {
            pos_even_ = (pos_even_ + 1) % buf_even_.size();
            buf_even_[pos_even_] = s;
            // y[m] = sum_k q[k] x[2m-k]: even k hit even-history samples,
            // odd k the odd history, both newest-first.
            std::int64_t acc = 0;
            const std::size_t ne = buf_even_.size();
            for (std::size_t i = 0; i < h_even_.size(); ++i)
                acc += h_even_[i] * buf_even_[(pos_even_ + ne - i) % ne];
            const std::size_t no = buf_odd_.size();
            for (std::size_t i = 0; i < h_odd_.size(); ++i)
                acc += h_odd_[i] * buf_odd_[(pos_odd_ + no - i) % no];
            out.samples.push_back(Word::wrap(acc >> shift, data_width_).value());
        } else {
            pos_odd_ = (pos_odd_ + 1) % buf_odd_.size();
            buf_odd_[pos_odd_] = s;
        }
        next_is_even_ = !next_is_even_;
    }
    return out;
}

} // namespace cicdec
