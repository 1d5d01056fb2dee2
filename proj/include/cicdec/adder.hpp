// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cicdec/errors.hpp"
#include "cicdec/word.hpp"

namespace cicdec {

enum class AdderKind { ripple, mcla };

AdderKind parse_adder_kind(std::string_view name);       // throws config_error
std::string_view adder_kind_name(AdderKind kind);

// Ordered binary digits, LSB first. Unsigned at this level; signedness is
// an interpretation applied by the word layer.
struct BitVector {
    std::vector<std::uint8_t> bits;

    BitVector() = default;
    explicit BitVector(int width);
    static BitVector from_unsigned(std::uint64_t value, int width);

    int width() const { return static_cast<int>(bits.size()); }
    std::uint64_t to_unsigned() const;

    bool operator==(const BitVector&) const = default;
};

struct AdderResult {
    BitVector sum;
    int carry_out = 0;
    // Levels of 2-input-equivalent logic on the critical path; a wide
    // AND/OR of k inputs counts ceil(log2 k) levels.
    int gate_depth = 0;
};

// p = a XOR b, g = a AND b.
std::pair<int, int> propagate_generate(int a, int b);

// Group propagate/generate over a lookahead group, LSB first:
//   P_G = p3·p2·p1·p0
//   G_G = g3 + p3·g2 + p3·p2·g1 + p3·p2·p1·g0
// Groups of 1..4 bits are accepted; the short forms drop the missing
// high-order terms (used for the top group of non-multiple-of-4 widths).
std::pair<int, int> group_pg(std::span<const int> p, std::span<const int> g);

// Expanded two-level AND-OR carries into bits 1..k plus the group carry-out:
//   c_{i+1} = g_i + p_i·g_{i-1} + ... + p_i···p_1·g_0 + p_i···p_0·c0
// Returns [c1, c2, ..., ck]; the last element is the carry out of the group.
std::vector<int> lookahead_carries(std::span<const int> p, std::span<const int> g, int c0);

// Single 4-bit carry-lookahead block.
AdderResult cla4(const BitVector& a, const BitVector& b, int c0);

// Modular carry-lookahead adder: chained 4-bit lookahead groups where each
// group's carry-in comes from the previous group via c_next = G_G + P_G·c_in.
AdderResult mcla(const BitVector& a, const BitVector& b, int c0);

// Full-adder chain; carry ripples through every bit position.
AdderResult ripple_add(const BitVector& a, const BitVector& b, int c0);

// Deterministic depth model (constants in adder.cpp):
//   ripple: 2 levels per full-adder stage  -> 2*W
//   mcla:   pg + group PG/GG + 2*ceil(W/4) carry hops + final sum XOR
int critical_path_depth(AdderKind kind, int width);

// Packed-bit core used by the datapath bridge below; same gate structure,
// bits carried in a uint64 instead of a vector. Width capped at 64.
struct GateAdd {
    std::uint64_t sum = 0;
    int carry_out = 0;
};
GateAdd mcla_bits(std::uint64_t a, std::uint64_t b, int c0, int width);
GateAdd ripple_bits(std::uint64_t a, std::uint64_t b, int c0, int width);

// Word-level bridge: run the selected gate model on the operand bit
// patterns. Two's-complement wrapping falls out of dropping the carry.
Word gate_add(AdderKind kind, Word a, Word b);
// a - b as a + ~b + 1 on the same gate model.
Word gate_sub(AdderKind kind, Word a, Word b);

} // namespace cicdec
