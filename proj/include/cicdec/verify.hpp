// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cicdec/cic.hpp"

namespace cicdec {

struct SuiteResult {
    std::string name;
    std::uint64_t cases = 0;
    std::uint64_t failures = 0;
    std::vector<std::string> failure_notes; // first few mismatches, for diagnostics
    bool passed() const { return failures == 0; }
};

namespace oracle {

// Reference adder computed with arbitrary-precision arithmetic.
struct AddRef {
    std::uint64_t sum = 0;
    int carry_out = 0;
};
AddRef add_reference(std::uint64_t a, std::uint64_t b, int carry_in, int width);

// Impulse response of the cascade as an explicit N-fold convolution of
// boxcars of length R*M. Exact integers; values fit 64 bits for any
// configuration whose register growth does.
std::vector<std::int64_t> cic_impulse(int n_stages, int decimation, int diff_delay);

// Direct-form reference: convolve with the boxcar-power impulse response in
// arbitrary precision, decimate keeping input phase cfg.resolved_phase(),
// then reduce modulo 2^output_width into the signed range. Matches the
// structural model exactly whenever the width schedule never truncates;
// stage widths must therefore all equal the output width.
std::vector<std::int64_t> cic_reference(const CicConfig& cfg, std::span<const std::int64_t> x);

} // namespace oracle

// Exhaustive sweep of both gate-level adders against the reference at the
// given width (all a, b, carry-in combinations). Keep width small.
SuiteResult adder_exhaustive_suite(int width, bool inject_fault = false);

// Randomized adder sweep across a set of widths.
SuiteResult adder_random_suite(std::span<const int> widths, std::uint64_t cases_per_width,
                               std::uint64_t seed);

// Structural CIC against the direct-form reference: a small configuration
// swept exhaustively over short inputs plus randomized long runs at the
// default widths.
SuiteResult cic_oracle_suite(std::uint64_t random_cases, std::uint64_t seed);

// Pipelined CIC against the flat one: identical outputs, delayed by the
// pipeline latency.
SuiteResult pipeline_suite(std::uint64_t samples, std::uint64_t seed);

std::vector<SuiteResult> run_all_suites(std::uint64_t seed);

} // namespace cicdec
