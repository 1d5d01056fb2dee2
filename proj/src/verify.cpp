// SPDX-License-Identifier: Apache-2.0
#include "cicdec/verify.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <random>
#include <sstream>

#include "cicdec/adder.hpp"
#include "cicdec/word.hpp"

namespace cicdec {

namespace mp = boost::multiprecision;

namespace {

constexpr std::size_t kMaxNotes = 5;

void note_failure(SuiteResult& r, const std::string& text) {
    ++r.failures;
    if (r.failure_notes.size() < kMaxNotes) r.failure_notes.push_back(text);
}

std::int64_t to_signed_window(const mp::cpp_int& value, int width) {
    const mp::cpp_int modulus = mp::cpp_int(1) << width;
    mp::cpp_int r = value % modulus;
    if (r < 0) r += modulus;
    if (r >= (modulus >> 1)) r -= modulus;
    return static_cast<std::int64_t>(r);
}

} // namespace

namespace oracle {

AddRef add_reference(std::uint64_t a, std::uint64_t b, int carry_in, int width) {
    if (width < 1 || width > 64) throw config_error("add_reference: width out of range");
    const mp::cpp_int mask = (mp::cpp_int(1) << width) - 1;
    const mp::cpp_int total = mp::cpp_int(a & static_cast<std::uint64_t>(mask)) +
                              mp::cpp_int(b & static_cast<std::uint64_t>(mask)) + carry_in;
    AddRef out;
    out.sum = static_cast<std::uint64_t>(total & mask);
    out.carry_out = static_cast<int>((total >> width) & 1);
    return out;
}

std::vector<std::int64_t> cic_impulse(int n_stages, int decimation, int diff_delay) {
    if (n_stages < 1 || decimation < 1 || diff_delay < 1)
        throw config_error("cic_impulse: parameters must be positive");
    const int box = decimation * diff_delay;
    std::vector<mp::cpp_int> h{1};
    for (int s = 0; s < n_stages; ++s) {
        std::vector<mp::cpp_int> next(h.size() + box - 1, 0);
        for (std::size_t i = 0; i < h.size(); ++i)
            for (int k = 0; k < box; ++k) next[i + k] += h[i];
        h = std::move(next);
    }
    std::vector<std::int64_t> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] > std::numeric_limits<std::int64_t>::max())
            throw config_error("cic_impulse: coefficient exceeds 64 bits");
        out[i] = static_cast<std::int64_t>(h[i]);
    }
    return out;
}

std::vector<std::int64_t> cic_reference(const CicConfig& cfg, std::span<const std::int64_t> x) {
    cfg.validate();
    for (int w : cfg.stage_widths)
        if (w != cfg.stage_widths.front())
            throw config_error("cic_reference: width schedule must be uniform");
    const auto h = cic_impulse(cfg.n_stages, cfg.decimation, cfg.diff_delay);
    const int width = cfg.output_width();
    const int phase = cfg.resolved_phase();
    std::vector<std::int64_t> y;
    for (std::size_t n = phase; n < x.size(); n += cfg.decimation) {
        mp::cpp_int acc = 0;
        const std::size_t kmax = std::min(h.size() - 1, n);
        for (std::size_t k = 0; k <= kmax; ++k) acc += mp::cpp_int(h[k]) * x[n - k];
        y.push_back(to_signed_window(acc, width));
    }
    return y;
}

} // namespace oracle

SuiteResult adder_exhaustive_suite(int width, bool inject_fault) {
    if (width < 1 || width > 12)
        throw config_error("exhaustive adder sweep supports widths 1..12");
    SuiteResult r;
    r.name = "adder-exhaustive-w" + std::to_string(width);
    const std::uint64_t limit = 1ULL << width;
    for (std::uint64_t a = 0; a < limit; ++a) {
        for (std::uint64_t b = 0; b < limit; ++b) {
            for (int c = 0; c <= 1; ++c) {
                ++r.cases;
                const auto ref = oracle::add_reference(a, b, c, width);
                GateAdd m = mcla_bits(a, b, c, width);
                const GateAdd rp = ripple_bits(a, b, c, width);
                if (inject_fault && a == 3 % limit && b == 5 % limit && c == 0) m.sum ^= 1;
                if (m.sum != ref.sum || m.carry_out != ref.carry_out) {
                    std::ostringstream os;
                    os << "mcla w" << width << ": " << a << "+" << b << "+" << c << " -> "
                       << m.sum << " c" << m.carry_out << ", want " << ref.sum << " c"
                       << ref.carry_out;
                    note_failure(r, os.str());
                }
                if (rp.sum != ref.sum || rp.carry_out != ref.carry_out) {
                    std::ostringstream os;
                    os << "ripple w" << width << ": " << a << "+" << b << "+" << c;
                    note_failure(r, os.str());
                }
            }
        }
    }
    return r;
}

SuiteResult adder_random_suite(std::span<const int> widths, std::uint64_t cases_per_width,
                               std::uint64_t seed) {
    SuiteResult r;
    r.name = "adder-random";
    std::mt19937_64 rng(seed);
    for (int width : widths) {
        if (width < 1 || width > 64) throw config_error("adder width out of range");
        const std::uint64_t mask =
            width == 64 ? ~0ULL : ((1ULL << width) - 1);
        for (std::uint64_t i = 0; i < cases_per_width; ++i) {
            ++r.cases;
            const std::uint64_t a = rng() & mask;
            const std::uint64_t b = rng() & mask;
            const int c = static_cast<int>(rng() & 1);
            const auto ref = oracle::add_reference(a, b, c, width);
            const GateAdd m = mcla_bits(a, b, c, width);
            const GateAdd rp = ripple_bits(a, b, c, width);
            if (m.sum != ref.sum || m.carry_out != ref.carry_out) {
                std::ostringstream os;
                os << "mcla w" << width << ": " << a << "+" << b << "+" << c;
                note_failure(r, os.str());
            }
            if (rp.sum != ref.sum || rp.carry_out != ref.carry_out) {
                std::ostringstream os;
                os << "ripple w" << width << ": " << a << "+" << b << "+" << c;
                note_failure(r, os.str());
            }
            // Signed wrap path on top of the same cores.
            const Word wa = Word::from_raw(a, width);
            const Word wb = Word::from_raw(b, width);
            const Word expect = wrap_add(wa, wb);
            if (gate_add(AdderKind::mcla, wa, wb) != expect ||
                gate_add(AdderKind::ripple, wa, wb) != expect) {
                std::ostringstream os;
                os << "gate_add w" << width << ": " << wa << " + " << wb;
                note_failure(r, os.str());
            }
        }
    }
    return r;
}

namespace {

void compare_cic_run(SuiteResult& r, const CicConfig& cfg, const std::vector<std::int64_t>& x) {
    Cic model(cfg);
    SampleBlock in;
    in.samples = x;
    in.width = cfg.input_width;
    const SampleBlock got = model.process(in);
    const auto want = oracle::cic_reference(cfg, x);
    if (got.samples.size() != want.size()) {
        std::ostringstream os;
        os << "cic length: got " << got.samples.size() << ", want " << want.size()
           << " (len " << x.size() << ")";
        note_failure(r, os.str());
        r.cases += want.size();
        return;
    }
    for (std::size_t m = 0; m < want.size(); ++m) {
        ++r.cases;
        if (got.samples[m] != want[m]) {
            std::ostringstream os;
            os << "cic y[" << m << "]: got " << got.samples[m] << ", want " << want[m];
            note_failure(r, os.str());
        }
    }
}

} // namespace

SuiteResult cic_oracle_suite(std::uint64_t random_cases, std::uint64_t seed) {
    SuiteResult r;
    r.name = "cic-oracle";

    // Exhaustive short streams on a small lossless configuration.
    const CicConfig small = CicConfig::lossless(2, 2, 1, 2);
    for (int len = 1; len <= 6; ++len) {
        std::vector<std::int64_t> x(len, -2);
        while (true) {
            compare_cic_run(r, small, x);
            int pos = 0;
            while (pos < len && x[pos] == 1) x[pos++] = -2;
            if (pos == len) break;
            ++x[pos];
        }
    }

    // Randomized long streams: a lossless schedule and a uniformly wrapped
    // one, random retain phases.
    std::mt19937_64 rng(seed);
    const CicConfig lossless = CicConfig::lossless(5, 16, 1, 6);
    CicConfig wrapped = lossless;
    const int bmax = b_max(5, 16, 1, 6);
    wrapped.stage_widths.assign(wrapped.stage_widths.size(), bmax);
    std::uint64_t done = 0;
    std::uniform_int_distribution<std::int64_t> dist(-32, 31);
    std::uniform_int_distribution<int> phase_dist(0, 15);
    while (done < random_cases) {
        const std::size_t len = 1024;
        std::vector<std::int64_t> x(len);
        for (auto& v : x) v = dist(rng);
        for (const CicConfig* base :
             {static_cast<const CicConfig*>(&lossless), static_cast<const CicConfig*>(&wrapped)}) {
            CicConfig cfg = *base;
            cfg.retain_phase = phase_dist(rng);
            compare_cic_run(r, cfg, x);
        }
        done += 2 * (len / 16);
    }
    return r;
}

SuiteResult pipeline_suite(std::uint64_t samples, std::uint64_t seed) {
    SuiteResult r;
    r.name = "pipeline-equivalence";
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> dist(-32, 31);
    std::uniform_int_distribution<std::size_t> chunk_dist(1, 257);
    for (const CicConfig& base :
         {CicConfig::default_preset(), CicConfig::lossless(5, 16, 1, 6)}) {
        CicConfig flat_cfg = base;
        flat_cfg.pipelined = false;
        CicConfig pipe_cfg = base;
        pipe_cfg.pipelined = true;
        Cic flat(flat_cfg);
        Cic pipe(pipe_cfg);
        const int latency = pipe.pipeline_latency();
        std::vector<std::int64_t> flat_out;
        std::vector<std::int64_t> pipe_out;
        std::uint64_t fed = 0;
        while (fed < samples) {
            const std::size_t len = std::min<std::uint64_t>(chunk_dist(rng), samples - fed);
            SampleBlock in;
            in.width = base.input_width;
            in.samples.resize(len);
            for (auto& v : in.samples) v = dist(rng);
            const auto a = flat.process(in);
            const auto b = pipe.process(in);
            flat_out.insert(flat_out.end(), a.samples.begin(), a.samples.end());
            pipe_out.insert(pipe_out.end(), b.samples.begin(), b.samples.end());
            fed += len;
        }
        // The pipelined machine fires N input clocks later, so it may have
        // emitted one output fewer by the time the stream ends.
        if (pipe_out.size() > flat_out.size() || flat_out.size() - pipe_out.size() > 1) {
            std::ostringstream os;
            os << "pipeline length: " << pipe_out.size() << " vs " << flat_out.size();
            note_failure(r, os.str());
            continue;
        }
        for (std::size_t m = 0; m < pipe_out.size(); ++m) {
            ++r.cases;
            const std::int64_t want =
                m < static_cast<std::size_t>(latency) ? 0 : flat_out[m - latency];
            if (pipe_out[m] != want) {
                std::ostringstream os;
                os << "pipeline y[" << m << "]: got " << pipe_out[m] << ", want " << want;
                note_failure(r, os.str());
            }
        }
    }
    return r;
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed) {
    const int widths[] = {16, 18, 20, 22, 25};
    std::vector<SuiteResult> out;
    out.push_back(adder_exhaustive_suite(8));
    out.push_back(adder_random_suite(widths, 20000, seed));
    out.push_back(cic_oracle_suite(40000, seed + 1));
    out.push_back(pipeline_suite(100000, seed + 2));
    return out;
}

} // namespace cicdec
