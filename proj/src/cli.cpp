// SPDX-License-Identifier: Apache-2.0
#include "cicdec/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "cicdec/analysis.hpp"
#include "cicdec/chain.hpp"
#include "cicdec/cic.hpp"
#include "cicdec/errors.hpp"
#include "cicdec/fir.hpp"
#include "cicdec/sample_io.hpp"
#include "cicdec/source.hpp"
#include "cicdec/verify.hpp"

namespace cicdec {

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string fmt_hz(double v) { return fmt("%.9g", v); }
std::string fmt_db(double v) { return fmt("%.6f", v); }

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t env_seed() {
    const char* s = std::getenv("CICDEC_SEED");
    if (!s || !*s) return 0xC1CDECULL;
    char* end = nullptr;
    const std::uint64_t v = std::strtoull(s, &end, 0);
    if (end == s || *end != '\0') throw config_error("CICDEC_SEED is not an integer");
    return v;
}

struct ManifestInfo {
    std::string command;
    std::map<std::string, std::string> parameters;
    std::vector<std::string> inputs;
    std::vector<fs::path> outputs;
};

void write_manifest(const ManifestInfo& info, const fs::path& path,
                    std::chrono::steady_clock::time_point started) {
    nlohmann::json j;
    j["command"] = info.command;
    j["tool"] = std::string(kToolName) + " " + kToolVersion;
    j["parameters"] = info.parameters;
    j["inputs"] = info.inputs;
    auto outs = nlohmann::json::array();
    for (const auto& p : info.outputs)
        outs.push_back({{"path", p.string()}, {"fnv1a64", hex64(fnv1a64_file(p))}});
    j["outputs"] = outs;
    j["duration_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
    j["generated_utc"] = utc_now();
    atomic_write(path, j.dump(2) + "\n");
}

fs::path manifest_path(const std::string& override_path, const fs::path& first_output) {
    if (!override_path.empty()) return override_path;
    fs::path p = first_output;
    p += ".manifest.json";
    return p;
}

// ---- stage construction ------------------------------------------------

CicConfig make_cic(bool lossless) {
    return lossless ? CicConfig::lossless(5, 16, 1, 6) : CicConfig::default_preset();
}

SweepTarget cic_target(const CicConfig& cfg, double rate_hz, double amplitude, int settle,
                       int measure) {
    SweepTarget t;
    t.run = [cfg](const SampleBlock& in) {
        Cic stage(cfg);
        return stage.process(in);
    };
    t.input_rate_hz = rate_hz;
    t.input_width = cfg.input_width;
    t.out_decimation = cfg.decimation;
    t.amplitude = amplitude;
    t.settle_outputs = settle >= 0 ? settle : 16;
    t.measure_outputs = measure;
    return t;
}

SweepTarget fir_target(const FirFilter& f, double rate_hz, int data_width, double amplitude,
                       int settle, int measure) {
    SweepTarget t;
    t.run = [f, data_width](const SampleBlock& in) {
        Decimator2 stage(f, data_width);
        return stage.process(in);
    };
    t.input_rate_hz = rate_hz;
    t.input_width = data_width;
    t.out_decimation = f.decimation;
    t.amplitude = amplitude;
    t.settle_outputs = settle >= 0 ? settle : f.group_delay() / f.decimation + 8;
    t.measure_outputs = measure;
    return t;
}

SweepTarget chain_target(const ChainConfig& cfg, double amplitude, int settle, int measure) {
    SweepTarget t;
    t.run = [cfg](const SampleBlock& in) {
        Chain stage(cfg);
        return stage.run(in);
    };
    t.input_rate_hz = cfg.input_rate_hz;
    t.input_width = cfg.cic.input_width;
    t.out_decimation = cfg.total_decimation();
    t.amplitude = amplitude;
    t.settle_outputs =
        settle >= 0 ? settle
                    : static_cast<int>(std::ceil(cfg.group_delay_output_samples())) + 16;
    t.measure_outputs = measure;
    return t;
}

// ---- design ------------------------------------------------------------

struct DesignOpts {
    std::string kind;
    double pass_hz = 0, stop_hz = 0, rate_hz = 0;
    double atten_db = 90.0, ripple_db = 0.05;
    std::string format = "Q1.15";
    int cic_stages = 5, cic_decim = 16, cic_delay = 1, cic_input_width = 6;
    double cic_rate_hz = 6'144'000.0;
    int response_points = 512;
    std::string out_prefix = "design";
    std::string manifest;
    bool dry_run = false;
};

double cascade_flatness_db(std::span<const double> coeffs, const CicConfig& cic,
                           double cic_rate_hz, double stage_rate_hz, double pass_hz) {
    const double g0 = reference_magnitude(cic, 0.0);
    double worst = 0.0;
    constexpr int kPoints = 400;
    for (int i = 0; i <= kPoints; ++i) {
        const double f = pass_hz * i / kPoints;
        const double cic_mag = reference_magnitude(cic, f / cic_rate_hz) / g0;
        const double a = fir_amplitude_at(coeffs, f / stage_rate_hz);
        const double dev = std::abs(20.0 * std::log10(std::abs(a) * cic_mag));
        worst = std::max(worst, dev);
    }
    return worst;
}

int run_design(const DesignOpts& o, std::chrono::steady_clock::time_point started) {
    const FirKind kind = parse_fir_kind(o.kind);
    FilterSpec spec;
    spec.pass_edge_hz = o.pass_hz;
    spec.stop_edge_hz = o.stop_hz;
    spec.input_rate_hz = o.rate_hz;
    spec.min_stop_atten_db = o.atten_db;
    spec.max_pass_ripple_db = o.ripple_db;
    spec.validate();
    const QFormat format = QFormat::parse(o.format);

    CicConfig cic;
    if (kind == FirKind::droop) {
        cic = CicConfig::lossless(o.cic_stages, o.cic_decim, o.cic_delay, o.cic_input_width);
    }
    if (o.dry_run) {
        std::cout << "dry-run: design flags ok\n";
        return kExitOk;
    }

    FirFilter designed;
    try {
        designed = kind == FirKind::halfband
                       ? design_halfband(spec)
                       : design_droop_correction(cic, o.cic_rate_hz, spec);
    } catch (const design_error& e) {
        std::cerr << "design infeasible: " << e.what() << "\n";
        std::cerr << "requested: stop >= " << fmt_db(spec.min_stop_atten_db)
                  << " dB, pass ripple <= " << fmt_db(spec.max_pass_ripple_db) << " dB\n";
        return kExitDesignInfeasible;
    }
    const FirFilter quantized = quantize_coeffs(designed, format);

    const fs::path coeff_path = o.out_prefix + "_coeffs.csv";
    std::string coeff_csv = "index,float_value,quantized_int,format\n";
    for (int i = 0; i < quantized.taps(); ++i) {
        coeff_csv += std::to_string(i) + "," + fmt("%.17g", quantized.coeffs[i]) + "," +
                     std::to_string(quantized.quantized_coeffs[i].value()) + "," +
                     quantized.format.str() + "\n";
    }
    atomic_write(coeff_path, coeff_csv);

    const fs::path resp_path = o.out_prefix + "_response.csv";
    const std::vector<double> deq = quantized.dequantized();
    std::string resp_csv = "f_hz,magnitude_db\n";
    for (int i = 0; i < o.response_points; ++i) {
        const double f = (o.rate_hz / 2.0) * i / o.response_points;
        const double mag = fir_magnitude_at(deq, f / o.rate_hz);
        const double db =
            mag > 0 ? std::max(kDbFloor, 20.0 * std::log10(mag)) : kDbFloor;
        resp_csv += fmt_hz(f) + "," + fmt_db(db) + "\n";
    }
    atomic_write(resp_path, resp_csv);

    std::cout << "designed " << fir_kind_name(kind) << ": " << quantized.taps() << " taps, "
              << quantized.format.str() << "\n";
    std::cout << "float:     stop " << fmt_db(designed.achieved_stop_atten_db)
              << " dB, pass err " << fmt_db(designed.achieved_pass_err_db) << " dB\n";
    std::cout << "quantized: stop " << fmt_db(quantized.achieved_stop_atten_db)
              << " dB, pass err " << fmt_db(quantized.achieved_pass_err_db) << " dB\n";
    if (kind == FirKind::droop) {
        const double flat_f =
            cascade_flatness_db(designed.coeffs, cic, o.cic_rate_hz, o.rate_hz, o.pass_hz);
        const double flat_q =
            cascade_flatness_db(deq, cic, o.cic_rate_hz, o.rate_hz, o.pass_hz);
        std::cout << "cascade flatness over [0, " << fmt_hz(o.pass_hz)
                  << "] Hz: float " << fmt_db(flat_f) << " dB, quantized " << fmt_db(flat_q)
                  << " dB\n";
    }

    ManifestInfo m;
    m.command = "design";
    m.parameters = {{"kind", o.kind},
                    {"pass_hz", fmt_hz(o.pass_hz)},
                    {"stop_hz", fmt_hz(o.stop_hz)},
                    {"rate_hz", fmt_hz(o.rate_hz)},
                    {"atten_db", fmt_hz(o.atten_db)},
                    {"ripple_db", fmt_hz(o.ripple_db)},
                    {"format", o.format},
                    {"response_points", std::to_string(o.response_points)},
                    {"out_prefix", o.out_prefix}};
    if (kind == FirKind::droop) {
        m.parameters["cic_stages"] = std::to_string(o.cic_stages);
        m.parameters["cic_decim"] = std::to_string(o.cic_decim);
        m.parameters["cic_delay"] = std::to_string(o.cic_delay);
        m.parameters["cic_input_width"] = std::to_string(o.cic_input_width);
        m.parameters["cic_rate_hz"] = fmt_hz(o.cic_rate_hz);
    }
    m.outputs = {coeff_path, resp_path};
    write_manifest(m, manifest_path(o.manifest, coeff_path), started);

    if (!designed.spec_met) {
        std::cerr << "design infeasible: requested stop " << fmt_db(spec.min_stop_atten_db)
                  << " dB / ripple " << fmt_db(spec.max_pass_ripple_db)
                  << " dB, achieved stop " << fmt_db(designed.achieved_stop_atten_db)
                  << " dB / pass err " << fmt_db(designed.achieved_pass_err_db) << " dB\n";
        return kExitDesignInfeasible;
    }
    if (!quantized.spec_met)
        std::cout << "note: " << quantized.format.str()
                  << " quantization lands short of the float targets; margins above\n";
    return kExitOk;
}

// ---- simulate ----------------------------------------------------------

struct SimulateOpts {
    double tone_hz = -1.0;
    double amplitude = 0.5;
    bool sigma_delta = false;
    std::string input;
    double rate_hz = 6'144'000.0;
    double seconds = -1.0;
    std::int64_t samples = -1;
    std::string stage = "chain";
    bool lossless = false;
    std::string out = "sim_output.txt";
    bool binary = false;
    std::string export_bits;
    std::size_t fft = 8192;
    std::string window = "bh4";
    double band_lo = 0.0, band_hi = 24'000.0;
    std::string spectrum_out;
    std::string snr_out;
    std::string manifest;
    bool dry_run = false;
};

int run_simulate(const SimulateOpts& o, std::chrono::steady_clock::time_point started) {
    if (o.stage != "chain" && o.stage != "cic")
        throw config_error("--stage must be chain or cic");
    if (o.input.empty() && o.tone_hz < 0)
        throw config_error("need an input: --input FILE or --tone HZ");
    if (o.sigma_delta && o.tone_hz < 0)
        throw config_error("--sigma-delta applies to the --tone source");
    if (!o.export_bits.empty() && !o.sigma_delta)
        throw config_error("--export-bits needs --sigma-delta");
    const Window window = parse_window(o.window);

    std::size_t length = 0;
    if (o.input.empty()) {
        if (o.seconds < 0 && o.samples < 0)
            throw config_error("need a length: --seconds or --samples");
        length = o.samples >= 0 ? static_cast<std::size_t>(o.samples)
                                : static_cast<std::size_t>(std::llround(o.seconds * o.rate_hz));
        if (length == 0) throw config_error("zero-length run");
    }

    const CicConfig cic_cfg = make_cic(o.lossless);
    ChainConfig chain_cfg;
    const bool use_chain = o.stage == "chain";
    if (use_chain) {
        if (o.rate_hz != 6'144'000.0)
            throw config_error("the chain is designed for a 6.144 MHz input rate");
        chain_cfg = o.lossless ? build_lossless_chain() : build_default_chain();
    }
    const int input_width = cic_cfg.input_width;

    if (o.dry_run) {
        if (o.tone_hz >= 0) {
            ToneSpec t{o.tone_hz, o.amplitude, o.rate_hz, std::max<std::size_t>(length, 1), 0.0};
            t.validate();
        }
        if (!o.input.empty() && !fs::exists(o.input))
            throw input_error("input file does not exist: " + o.input);
        std::cout << "dry-run: simulate flags ok\n";
        return kExitOk;
    }

    ManifestInfo m;
    m.command = "simulate";

    SampleBlock source;
    SampleBlock mod_bits;
    if (!o.input.empty()) {
        source = read_samples_auto(o.input, o.rate_hz, input_width);
        for (std::size_t i = 0; i < source.samples.size(); ++i) {
            if (!Word::fits(source.samples[i], input_width))
                throw input_error(o.input + ": sample " + std::to_string(i) + " value " +
                                  std::to_string(source.samples[i]) + " exceeds the " +
                                  std::to_string(input_width) + "-bit input range");
        }
        source.width = input_width;
        source.rate_hz = o.rate_hz;
        m.inputs.push_back(o.input);
    } else {
        ToneSpec t{o.tone_hz, o.amplitude, o.rate_hz, length, 0.0};
        t.validate();
        if (o.sigma_delta) {
            SigmaDeltaModulator mod;
            mod_bits = mod.modulate(gen_tone(t));
            source = mod_bits;
        } else {
            const RealBlock real = gen_tone(t);
            source.rate_hz = o.rate_hz;
            source.width = input_width;
            const double fs = static_cast<double>(Word::max_value(input_width));
            source.samples.resize(real.samples.size());
            for (std::size_t i = 0; i < real.samples.size(); ++i)
                source.samples[i] = std::llround(real.samples[i] * fs);
        }
    }

    SampleBlock out_block;
    if (use_chain) {
        Chain chain(chain_cfg);
        out_block = chain.run(source);
    } else {
        Cic cic(cic_cfg);
        out_block = cic.process(source);
    }

    const fs::path out_path = o.out;
    if (o.binary) {
        for (std::int64_t v : out_block.samples)
            if (v < -128 || v > 127)
                throw config_error("--binary holds 8-bit samples only; the " + o.stage +
                                   " output is wider (use the text format)");
        write_samples_binary(out_path, out_block);
    } else {
        write_samples_text(out_path, out_block);
    }
    m.outputs.push_back(out_path);

    if (!o.export_bits.empty()) {
        write_packed_bits(o.export_bits, mod_bits);
        m.outputs.push_back(o.export_bits);
    }

    if (out_block.samples.size() < o.fft)
        throw config_error("output has " + std::to_string(out_block.samples.size()) +
                           " samples, fewer than --fft " + std::to_string(o.fft));
    SpectrumReport rep = spectrum(out_block, o.fft, window);
    const fs::path spec_path =
        o.spectrum_out.empty()
            ? fs::path(fs::path(out_path).replace_extension("").string() + "_spectrum.csv")
            : fs::path(o.spectrum_out);
    std::string spec_csv = "f_hz,magnitude_db\n";
    for (std::size_t k = 0; k < rep.magnitudes_db.size(); ++k)
        spec_csv += fmt_hz(rep.bin_freq(k)) + "," + fmt_db(rep.magnitudes_db[k]) + "\n";
    atomic_write(spec_path, spec_csv);
    m.outputs.push_back(spec_path);

    const double snr_db = snr(rep, o.band_lo, o.band_hi);
    const fs::path snr_path =
        o.snr_out.empty()
            ? fs::path(fs::path(out_path).replace_extension("").string() + "_snr.csv")
            : fs::path(o.snr_out);
    atomic_write(snr_path, "band_lo_hz,band_hi_hz,snr_db\n" + fmt_hz(o.band_lo) + "," +
                               fmt_hz(o.band_hi) + "," + fmt_db(snr_db) + "\n");
    m.outputs.push_back(snr_path);

    std::cout << "output: " << out_block.samples.size() << " samples at "
              << fmt_hz(out_block.rate_hz) << " Hz -> " << out_path.string() << "\n";
    std::cout << "snr: " << fmt_db(snr_db) << " dB over [" << fmt_hz(o.band_lo) << ", "
              << fmt_hz(o.band_hi) << "] Hz\n";

    m.parameters = {{"stage", o.stage},
                    {"lossless", o.lossless ? "true" : "false"},
                    {"rate_hz", fmt_hz(o.rate_hz)},
                    {"fft", std::to_string(o.fft)},
                    {"window", o.window},
                    {"band_lo", fmt_hz(o.band_lo)},
                    {"band_hi", fmt_hz(o.band_hi)},
                    {"binary", o.binary ? "true" : "false"}};
    if (o.tone_hz >= 0) {
        m.parameters["tone_hz"] = fmt_hz(o.tone_hz);
        m.parameters["amplitude"] = fmt_hz(o.amplitude);
        m.parameters["sigma_delta"] = o.sigma_delta ? "true" : "false";
        m.parameters["length"] = std::to_string(length);
    }
    write_manifest(m, manifest_path(o.manifest, out_path), started);
    return kExitOk;
}

// ---- verify ------------------------------------------------------------

struct VerifyOpts {
    std::string suite = "all";
    int width = 8;
    bool exhaustive_only = false;
    std::uint64_t cases = 20'000;
    std::uint64_t cic_cases = 40'000;
    std::uint64_t pipeline_samples = 100'000;
    bool inject_fault = false;
    std::string out = "verify_report.csv";
    std::string manifest;
    bool dry_run = false;
};

int run_verify(const VerifyOpts& o, std::chrono::steady_clock::time_point started) {
    if (o.suite != "all" && o.suite != "adder" && o.suite != "cic" && o.suite != "pipeline")
        throw config_error("--suite must be all, adder, cic or pipeline");
    if (o.dry_run) {
        std::cout << "dry-run: verify flags ok (suite " << o.suite << ")\n";
        return kExitOk;
    }
    const std::uint64_t seed = env_seed();
    std::vector<SuiteResult> results;
    if (o.suite == "all" || o.suite == "adder") {
        results.push_back(adder_exhaustive_suite(o.width, o.inject_fault));
        if (!o.exhaustive_only) {
            const int widths[] = {16, 18, 20, 22, 25};
            results.push_back(adder_random_suite(widths, o.cases, seed));
        }
    }
    if (o.suite == "all" || o.suite == "cic")
        results.push_back(cic_oracle_suite(o.cic_cases, seed + 1));
    if (o.suite == "all" || o.suite == "pipeline")
        results.push_back(pipeline_suite(o.pipeline_samples, seed + 2));

    std::string csv = "suite,cases,failures,status\n";
    bool all_pass = true;
    for (const auto& r : results) {
        csv += r.name + "," + std::to_string(r.cases) + "," + std::to_string(r.failures) +
               "," + (r.passed() ? "pass" : "fail") + "\n";
        all_pass = all_pass && r.passed();
        for (const auto& note : r.failure_notes) std::cerr << r.name << ": " << note << "\n";
    }
    std::cout << csv;
    atomic_write(o.out, csv);

    ManifestInfo m;
    m.command = "verify";
    m.parameters = {{"suite", o.suite},
                    {"width", std::to_string(o.width)},
                    {"exhaustive", o.exhaustive_only ? "true" : "false"},
                    {"cases", std::to_string(o.cases)},
                    {"cic_cases", std::to_string(o.cic_cases)},
                    {"pipeline_samples", std::to_string(o.pipeline_samples)},
                    {"seed", std::to_string(seed)}};
    m.outputs = {o.out};
    write_manifest(m, manifest_path(o.manifest, o.out), started);
    return all_pass ? kExitOk : kExitVerifyFailure;
}

// ---- response ----------------------------------------------------------

struct ResponseOpts {
    std::string stage;
    int points = 33;
    double min_hz = 0.0;
    double max_hz = -1.0;
    bool reference = false;
    std::string method = "sweep";
    bool lossless = false;
    double amplitude = 0.5;
    int settle = -1;
    int measure = 1024;
    std::string out = "response.csv";
    std::string manifest;
    bool dry_run = false;
};

double stage_out_nyquist(const std::string& stage) {
    if (stage == "cic") return 6'144'000.0 / 16 / 2;
    if (stage == "hb1") return 384'000.0 / 2 / 2;
    if (stage == "droop") return 192'000.0 / 2 / 2;
    if (stage == "hb2") return 96'000.0 / 2 / 2;
    if (stage == "chain") return 24'000.0;
    if (stage == "cic+droop") return 48'000.0;
    throw config_error("--stage must be cic, hb1, droop, hb2, chain or cic+droop");
}

int run_response(const ResponseOpts& o, std::chrono::steady_clock::time_point started) {
    const double stage_nyq = stage_out_nyquist(o.stage);
    const bool impulse = o.method == "impulse";
    if (o.method != "sweep" && o.method != "impulse")
        throw config_error("--method must be sweep or impulse");
    if (impulse && o.stage != "cic")
        throw config_error("--method impulse applies to --stage cic");
    if (o.reference && o.stage != "cic")
        throw config_error("--reference applies to --stage cic");
    if (o.points < 1) throw config_error("--points must be positive");

    const double limit = impulse ? 6'144'000.0 / 2 : stage_nyq;
    const double max_hz = o.max_hz >= 0 ? o.max_hz : 0.98 * limit;
    if (max_hz > limit)
        throw config_error("--max-hz " + fmt_hz(max_hz) + " exceeds the " + o.stage +
                           " Nyquist limit " + fmt_hz(limit));
    if (o.min_hz < 0 || o.min_hz >= max_hz) throw config_error("bad --min-hz/--max-hz range");

    if (o.dry_run) {
        std::cout << "dry-run: response flags ok (stage " << o.stage << ")\n";
        return kExitOk;
    }

    std::vector<double> freqs(o.points);
    for (int i = 0; i < o.points; ++i)
        freqs[i] = o.min_hz + (max_hz - o.min_hz) * i / o.points;

    const CicConfig cic_cfg = make_cic(o.lossless);
    std::vector<SweepPoint> pts;
    double dc_gain_db = 0.0;

    if (impulse) {
        const auto h = undecimated_impulse_response(cic_cfg);
        double h_sum = 0.0;
        for (std::int64_t v : h) h_sum += static_cast<double>(v);
        dc_gain_db = 20.0 * std::log10(h_sum);
        for (double f : freqs) {
            const double fn = f / 6'144'000.0;
            double re = 0.0, im = 0.0;
            for (std::size_t n = 0; n < h.size(); ++n) {
                re += h[n] * std::cos(2.0 * M_PI * fn * n);
                im -= h[n] * std::sin(2.0 * M_PI * fn * n);
            }
            const double mag = std::hypot(re, im);
            pts.push_back({f, mag > 0 ? std::max(kDbFloor, 20.0 * std::log10(mag)) : kDbFloor});
        }
    } else if (o.stage == "cic") {
        const SweepTarget t =
            cic_target(cic_cfg, 6'144'000.0, o.amplitude, o.settle, o.measure);
        pts = response_sweep(t, freqs);
        if (o.reference) {
            const double dc[] = {0.0};
            dc_gain_db = response_sweep(t, dc).front().gain_db;
        }
    } else if (o.stage == "chain") {
        const ChainConfig cfg = o.lossless ? build_lossless_chain() : build_default_chain();
        pts = response_sweep(chain_target(cfg, o.amplitude, o.settle, o.measure), freqs);
    } else if (o.stage == "cic+droop") {
        const ChainConfig cfg = o.lossless ? build_lossless_chain() : build_default_chain();
        const SweepTarget tc =
            cic_target(cfg.cic, cfg.input_rate_hz, o.amplitude, o.settle, o.measure);
        const auto cic_pts = response_sweep(tc, freqs);
        std::vector<double> actual;
        for (const auto& p : cic_pts) actual.push_back(p.f_hz);
        const SweepTarget td = fir_target(cfg.droop, cfg.input_rate_hz / 32, cfg.data_width,
                                          o.amplitude, o.settle, o.measure);
        const auto droop_pts = response_sweep(td, actual);
        for (std::size_t i = 0; i < cic_pts.size(); ++i)
            pts.push_back({cic_pts[i].f_hz, cic_pts[i].gain_db + droop_pts[i].gain_db});
    } else {
        const ChainConfig cfg = o.lossless ? build_lossless_chain() : build_default_chain();
        const FirFilter& f = o.stage == "hb1" ? cfg.hb1
                             : o.stage == "droop" ? cfg.droop
                                                  : cfg.hb2;
        const double rate = o.stage == "hb1"   ? cfg.input_rate_hz / 16
                            : o.stage == "droop" ? cfg.input_rate_hz / 32
                                                 : cfg.input_rate_hz / 64;
        pts = response_sweep(fir_target(f, rate, cfg.data_width, o.amplitude, o.settle,
                                        o.measure),
                             freqs);
    }

    std::string csv = o.reference ? "f_hz,gain_db,reference_db\n" : "f_hz,gain_db\n";
    double max_delta = 0.0;
    const double g0 = reference_magnitude(cic_cfg, 0.0);
    for (const auto& p : pts) {
        csv += fmt_hz(p.f_hz) + "," + fmt_db(p.gain_db);
        if (o.reference) {
            const double shape = reference_magnitude(cic_cfg, p.f_hz / 6'144'000.0) / g0;
            const double ref_db =
                shape > 0 ? std::max(kDbFloor, 20.0 * std::log10(shape) + dc_gain_db)
                          : kDbFloor;
            csv += "," + fmt_db(ref_db);
            if (p.gain_db > kDbFloor && ref_db > kDbFloor)
                max_delta = std::max(max_delta, std::abs(p.gain_db - ref_db));
        }
        csv += "\n";
    }
    atomic_write(o.out, csv);
    std::cout << "wrote " << pts.size() << " rows -> " << o.out << "\n";
    if (o.reference)
        std::cout << "max |delta| vs closed form: " << fmt("%.9f", max_delta) << " dB\n";

    ManifestInfo m;
    m.command = "response";
    m.parameters = {{"stage", o.stage},
                    {"points", std::to_string(o.points)},
                    {"min_hz", fmt_hz(o.min_hz)},
                    {"max_hz", fmt_hz(max_hz)},
                    {"method", o.method},
                    {"reference", o.reference ? "true" : "false"},
                    {"lossless", o.lossless ? "true" : "false"},
                    {"amplitude", fmt_hz(o.amplitude)},
                    {"measure", std::to_string(o.measure)}};
    m.outputs = {o.out};
    write_manifest(m, manifest_path(o.manifest, o.out), started);
    return kExitOk;
}

// ---- adder-verify ------------------------------------------------------

struct AdderVerifyOpts {
    std::vector<int> widths = {4, 8, 16, 18, 20, 22, 25};
    std::uint64_t cases = 5'000;
    std::string out = "adder_depth.csv";
    std::string manifest;
    bool dry_run = false;
};

int run_adder_verify(const AdderVerifyOpts& o, std::chrono::steady_clock::time_point started) {
    for (int w : o.widths)
        if (w < 1 || w > 64) throw config_error("adder width out of range: " + std::to_string(w));
    if (o.dry_run) {
        std::cout << "dry-run: adder-verify flags ok\n";
        return kExitOk;
    }
    std::string csv = "kind,width,gate_depth\n";
    for (const AdderKind kind : {AdderKind::ripple, AdderKind::mcla})
        for (int w : o.widths)
            csv += std::string(adder_kind_name(kind)) + "," + std::to_string(w) + "," +
                   std::to_string(critical_path_depth(kind, w)) + "\n";
    std::cout << csv;
    atomic_write(o.out, csv);

    const std::uint64_t seed = env_seed();
    std::vector<SuiteResult> results;
    results.push_back(adder_exhaustive_suite(8));
    results.push_back(adder_random_suite(o.widths, o.cases, seed));
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << r.name << "," << r.cases << "," << r.failures << ","
                  << (r.passed() ? "pass" : "fail") << "\n";
        all_pass = all_pass && r.passed();
        for (const auto& note : r.failure_notes) std::cerr << r.name << ": " << note << "\n";
    }

    ManifestInfo m;
    m.command = "adder-verify";
    std::string widths_str;
    for (int w : o.widths) widths_str += (widths_str.empty() ? "" : " ") + std::to_string(w);
    m.parameters = {{"widths", widths_str},
                    {"cases", std::to_string(o.cases)},
                    {"seed", std::to_string(seed)}};
    m.outputs = {o.out};
    write_manifest(m, manifest_path(o.manifest, o.out), started);
    return all_pass ? kExitOk : kExitVerifyFailure;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    const auto started = std::chrono::steady_clock::now();
    CLI::App app{std::string(kToolName) +
                 ": bit-accurate sigma-delta decimation chain model"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.footer("Exit codes: 0 success, 1 verification failure, 2 design infeasible,\n"
               "            64 usage error, 65 input data format error.\n"
               "CICDEC_SEED fixes all randomized-suite seeds.");
    app.require_subcommand(1);

    DesignOpts d;
    auto* design = app.add_subcommand(
        "design", "Design a half-band or droop-correction filter; writes coefficient and "
                  "response CSVs");
    design->add_option("--kind", d.kind, "halfband|droop")->required();
    design->add_option("--pass-hz", d.pass_hz, "Passband edge, Hz")->required();
    design->add_option("--stop-hz", d.stop_hz, "Stopband edge, Hz")->required();
    design->add_option("--rate-hz", d.rate_hz, "Input sample rate, Hz")->required();
    design->add_option("--atten-db", d.atten_db, "Min stopband attenuation (default 90)");
    design->add_option("--ripple-db", d.ripple_db, "Max passband ripple (default 0.05)");
    design->add_option("--format", d.format, "Coefficient format (default Q1.15)");
    design->add_option("--cic-stages", d.cic_stages, "CIC N for droop target (default 5)");
    design->add_option("--cic-decim", d.cic_decim, "CIC R for droop target (default 16)");
    design->add_option("--cic-delay", d.cic_delay, "CIC M for droop target (default 1)");
    design->add_option("--cic-input-width", d.cic_input_width,
                       "CIC input width for droop target (default 6)");
    design->add_option("--cic-rate-hz", d.cic_rate_hz,
                       "CIC input rate for droop target (default 6144000)");
    design->add_option("--response-points", d.response_points,
                       "Rows in the response CSV (default 512)");
    design->add_option("--out-prefix", d.out_prefix, "Output file prefix (default design)");
    design->add_option("--manifest", d.manifest, "Manifest path override");
    design->add_flag("--dry-run", d.dry_run, "Validate flags and exit");

    SimulateOpts s;
    auto* simulate = app.add_subcommand(
        "simulate", "Run the decimation chain (or one stage) over a tone, sigma-delta "
                    "stream or sample file");
    simulate->add_option("--tone", s.tone_hz, "Tone frequency, Hz");
    simulate->add_option("--amplitude", s.amplitude,
                         "Tone amplitude, fraction of full scale (default 0.5)");
    simulate->add_flag("--sigma-delta", s.sigma_delta,
                       "Pass the tone through the 2nd-order modulator");
    simulate->add_option("--input", s.input, "Input sample file (text or binary)");
    simulate->add_option("--rate-hz", s.rate_hz, "Input rate, Hz (default 6144000)");
    simulate->add_option("--seconds", s.seconds, "Run length in seconds");
    simulate->add_option("--samples", s.samples, "Run length in input samples");
    simulate->add_option("--stage", s.stage, "chain|cic (default chain)");
    simulate->add_flag("--lossless", s.lossless, "Use the no-truncation datapath");
    simulate->add_option("--out", s.out, "Output sample file (default sim_output.txt)");
    simulate->add_flag("--binary", s.binary, "Write the 8-bit binary sample format");
    simulate->add_option("--export-bits", s.export_bits,
                         "Also write the modulator bitstream, packed");
    simulate->add_option("--fft", s.fft, "Spectrum FFT size (default 8192)");
    simulate->add_option("--window", s.window, "rect|bh4 (default bh4)");
    simulate->add_option("--band-lo", s.band_lo, "SNR band low edge, Hz (default 0)");
    simulate->add_option("--band-hi", s.band_hi, "SNR band high edge, Hz (default 24000)");
    simulate->add_option("--spectrum", s.spectrum_out, "Spectrum CSV path");
    simulate->add_option("--snr-csv", s.snr_out, "SNR summary CSV path");
    simulate->add_option("--manifest", s.manifest, "Manifest path override");
    simulate->add_flag("--dry-run", s.dry_run, "Validate flags and exit");

    VerifyOpts v;
    auto* verify = app.add_subcommand("verify", "Run the oracle equivalence suites");
    verify->add_option("--suite", v.suite, "all|adder|cic|pipeline (default all)");
    verify->add_option("--width", v.width, "Exhaustive adder width (default 8)");
    verify->add_flag("--exhaustive", v.exhaustive_only,
                     "Adder suite: exhaustive sweep only");
    verify->add_option("--cases", v.cases, "Random adder cases per width (default 20000)");
    verify->add_option("--cic-cases", v.cic_cases,
                       "Random CIC input samples (default 40000)");
    verify->add_option("--pipeline-samples", v.pipeline_samples,
                       "Pipeline equivalence stream length (default 100000)");
    verify->add_flag("--inject-fault", v.inject_fault, "")->group("");
    verify->add_option("--out", v.out, "Report CSV path (default verify_report.csv)");
    verify->add_option("--manifest", v.manifest, "Manifest path override");
    verify->add_flag("--dry-run", v.dry_run, "Validate flags and exit");

    ResponseOpts r;
    auto* response = app.add_subcommand(
        "response", "Measure a stage's frequency response by sine sweep; writes f_hz,gain_db");
    response->add_option("--stage", r.stage, "cic|hb1|droop|hb2|chain|cic+droop")->required();
    response->add_option("--points", r.points, "Number of probe frequencies (default 33)");
    response->add_option("--min-hz", r.min_hz, "Grid start (default 0)");
    response->add_option("--max-hz", r.max_hz,
                         "Grid end, exclusive (default just under stage Nyquist)");
    response->add_flag("--reference", r.reference,
                       "CIC only: add the closed-form column, print max delta");
    response->add_option("--method", r.method, "CIC only: sweep|impulse (default sweep)");
    response->add_flag("--lossless", r.lossless, "Use the no-truncation datapath");
    response->add_option("--amplitude", r.amplitude, "Probe amplitude (default 0.5)");
    response->add_option("--settle", r.settle, "Outputs to discard (default: auto)");
    response->add_option("--measure", r.measure,
                         "Outputs per measurement window (default 1024)");
    response->add_option("--out", r.out, "Output CSV (default response.csv)");
    response->add_option("--manifest", r.manifest, "Manifest path override");
    response->add_flag("--dry-run", r.dry_run, "Validate flags and exit");

    AdderVerifyOpts a;
    auto* adder_verify = app.add_subcommand(
        "adder-verify", "Adder equivalence sweep plus the gate-depth table");
    adder_verify->add_option("--widths", a.widths, "Widths for the depth table");
    adder_verify->add_option("--cases", a.cases, "Random cases per width (default 5000)");
    adder_verify->add_option("--out", a.out, "Depth CSV path (default adder_depth.csv)");
    adder_verify->add_option("--manifest", a.manifest, "Manifest path override");
    adder_verify->add_flag("--dry-run", a.dry_run, "Validate flags and exit");

    std::vector<const char*> argv;
    argv.push_back(kToolName);
    for (const auto& arg : args) argv.push_back(arg.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(design)) return run_design(d, started);
        if (app.got_subcommand(simulate)) return run_simulate(s, started);
        if (app.got_subcommand(verify)) return run_verify(v, started);
        if (app.got_subcommand(response)) return run_response(r, started);
        if (app.got_subcommand(adder_verify)) return run_adder_verify(a, started);
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataFormat;
    } catch (const design_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDesignInfeasible;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    }
    return kExitUsage;
}

} // namespace cicdec
