// SPDX-License-Identifier: Apache-2.0

#include "cicdec/adder.hpp"

#include <algorithm>
#include <string>

namespace cicdec {

// Depth model constants. XOR/AND/OR count one level each; a wide gate of
// k inputs counts ceil(log2 k) levels.
//   kDepthPg:      p,g from a,b                          (one 2-input gate)
//   kDepthGroupPg: 4-input AND tree (2) + 4-term OR (2)
//   kDepthCarry:   c_next = G_G + P_G*c_in               (AND then OR)
//   kDepthSum:     s = p XOR c
namespace {
constexpr int kDepthPg = 1;
constexpr int kDepthGroupPg = 4;
constexpr int kDepthCarry = 2;
constexpr int kDepthSum = 1;
constexpr int kGroupBits = 4;

void check_widths(const BitVector& a, const BitVector& b) {
    if (a.width() != b.width())
        throw config_error("adder: width mismatch " + std::to_string(a.width()) +
                           " vs " + std::to_string(b.width()));
    if (a.width() < 1) throw config_error("adder: width must be >= 1");
    if (a.width() > 64) throw config_error("adder: width > 64 not supported");
}

void check_bit(int bit, const char* what) {
    if (bit != 0 && bit != 1)
        throw config_error(std::string("adder: ") + what + " must be 0 or 1");
}
} // namespace

AdderKind parse_adder_kind(std::string_view name) {
    if (name == "ripple") return AdderKind::ripple;
    if (name == "mcla") return AdderKind::mcla;
    throw config_error("unknown adder kind '" + std::string(name) + "' (ripple, mcla)");
}

std::string_view adder_kind_name(AdderKind kind) {
    return kind == AdderKind::ripple ? "ripple" : "mcla";
}

BitVector::BitVector(int width) {
    if (width < 1) throw config_error("bitvector: width must be >= 1");
    bits.assign(static_cast<std::size_t>(width), 0);
}

BitVector BitVector::from_unsigned(std::uint64_t value, int width) {
    BitVector v(width);
    for (int i = 0; i < width; ++i) v.bits[i] = (value >> i) & 1u;
    if (width < 64 && (value >> width) != 0)
        throw config_error("bitvector: value does not fit in " + std::to_string(width) + " bits");
    return v;
}

std::uint64_t BitVector::to_unsigned() const {
    if (width() > 64) throw config_error("bitvector: wider than 64 bits");
    std::uint64_t value = 0;
    for (int i = 0; i < width(); ++i)
        if (bits[i]) value |= std::uint64_t(1) << i;
    return value;
}

std::pair<int, int> propagate_generate(int a, int b) {
    check_bit(a, "operand");
    check_bit(b, "operand");
    return {a ^ b, a & b};
}

std::pair<int, int> group_pg(std::span<const int> p, std::span<const int> g) {
    if (p.size() != g.size() || p.empty() || p.size() > kGroupBits)
        throw config_error("group_pg: expects 1..4 matching bit pairs");
    const int k = static_cast<int>(p.size());
    int pg = 1;
    for (int i = 0; i < k; ++i) pg &= p[i];
    // G_G = g_{k-1} + p_{k-1}*g_{k-2} + ... + p_{k-1}***p_1*g_0
    int gg = 0;
    for (int j = k - 1; j >= 0; --j) {
        int term = g[j];
        for (int t = j + 1; t < k; ++t) term &= p[t];
        gg |= term;
    }
    return {pg, gg};
}

std::vector<int> lookahead_carries(std::span<const int> p, std::span<const int> g, int c0) {
    if (p.size() != g.size() || p.empty())
        throw config_error("lookahead_carries: mismatched p/g");
    check_bit(c0, "carry-in");
    const int k = static_cast<int>(p.size());
    std::vector<int> carries(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        // c_{i+1} = sum of g_j guarded by the propagates above it, plus the
        // full propagate product times c0. Expanded form, not the recurrence.
        int c = 0;
        for (int j = i; j >= 0; --j) {
            int term = g[j];
            for (int t = j + 1; t <= i; ++t) term &= p[t];
            c |= term;
        }
        int prod = c0;
        for (int t = 0; t <= i; ++t) prod &= p[t];
        c |= prod;
        carries[static_cast<std::size_t>(i)] = c;
    }
    return carries;
}

namespace {

// Shared group walker for the packed cores.
template <typename Carry>
GateAdd lookahead_core(std::uint64_t a, std::uint64_t b, int c0, int width, Carry hop) {
    GateAdd r;
    int cin = c0;
    for (int lo = 0; lo < width; lo += kGroupBits) {
        const int k = std::min(kGroupBits, width - lo);
        int p[kGroupBits], g[kGroupBits];
        for (int i = 0; i < k; ++i) {
            const int ab = static_cast<int>((a >> (lo + i)) & 1u);
            const int bb = static_cast<int>((b >> (lo + i)) & 1u);
            p[i] = ab ^ bb;
            g[i] = ab & bb;
        }
        const auto carries = lookahead_carries(std::span(p, static_cast<std::size_t>(k)),
                                               std::span(g, static_cast<std::size_t>(k)), cin);
        int c = cin;
        for (int i = 0; i < k; ++i) {
            r.sum |= std::uint64_t(p[i] ^ c) << (lo + i);
            c = carries[static_cast<std::size_t>(i)];
        }
        cin = hop(std::span(p, static_cast<std::size_t>(k)),
                  std::span(g, static_cast<std::size_t>(k)), cin,
                  carries.back());
    }
    r.carry_out = cin;
    return r;
}

} // namespace

GateAdd mcla_bits(std::uint64_t a, std::uint64_t b, int c0, int width) {
    // Inter-group carry comes from the group recurrence, not the internal c4.
    return lookahead_core(a, b, c0, width,
                          [](std::span<const int> p, std::span<const int> g, int cin, int) {
                              const auto [pg, gg] = group_pg(p, g);
                              return gg | (pg & cin);
                          });
}

GateAdd ripple_bits(std::uint64_t a, std::uint64_t b, int c0, int width) {
    GateAdd r;
    int c = c0;
    for (int i = 0; i < width; ++i) {
        const int ab = static_cast<int>((a >> i) & 1u);
        const int bb = static_cast<int>((b >> i) & 1u);
        const int p = ab ^ bb, g = ab & bb;
        r.sum |= std::uint64_t(p ^ c) << i;
        c = g | (p & c);
    }
    r.carry_out = c;
    return r;
}

AdderResult cla4(const BitVector& a, const BitVector& b, int c0) {
    check_widths(a, b);
    if (a.width() != 4) throw config_error("cla4: operands must be 4 bits wide");
    check_bit(c0, "carry-in");
    const GateAdd ga = mcla_bits(a.to_unsigned(), b.to_unsigned(), c0, 4);
    return {BitVector::from_unsigned(ga.sum, 4), ga.carry_out, critical_path_depth(AdderKind::mcla, 4)};
}

AdderResult mcla(const BitVector& a, const BitVector& b, int c0) {
    check_widths(a, b);
    check_bit(c0, "carry-in");
    const int w = a.width();
    const GateAdd ga = mcla_bits(a.to_unsigned(), b.to_unsigned(), c0, w);
    return {BitVector::from_unsigned(ga.sum, w), ga.carry_out, critical_path_depth(AdderKind::mcla, w)};
}

AdderResult ripple_add(const BitVector& a, const BitVector& b, int c0) {
    check_widths(a, b);
    check_bit(c0, "carry-in");
    const int w = a.width();
    const GateAdd ga = ripple_bits(a.to_unsigned(), b.to_unsigned(), c0, w);
    return {BitVector::from_unsigned(ga.sum, w), ga.carry_out, critical_path_depth(AdderKind::ripple, w)};
}

int critical_path_depth(AdderKind kind, int width) {
    if (width < 1) throw config_error("critical_path_depth: width must be >= 1");
    if (kind == AdderKind::ripple) return 2 * width;
    const int groups = (width + kGroupBits - 1) / kGroupBits;
    return kDepthPg + kDepthGroupPg + kDepthCarry * groups + kDepthSum;
}

Word gate_add(AdderKind kind, Word a, Word b) {
    if (a.width() != b.width())
        throw config_error("gate_add: width mismatch");
    const GateAdd r = kind == AdderKind::mcla ? mcla_bits(a.raw(), b.raw(), 0, a.width())
                                              : ripple_bits(a.raw(), b.raw(), 0, a.width());
    return Word::from_raw(r.sum, a.width());
}

Word gate_sub(AdderKind kind, Word a, Word b) {
    if (a.width() != b.width())
        throw config_error("gate_sub: width mismatch");
    const std::uint64_t nb = ~b.raw() & Word::mask(b.width());
    const GateAdd r = kind == AdderKind::mcla ? mcla_bits(a.raw(), nb, 1, a.width())
                                              : ripple_bits(a.raw(), nb, 1, a.width());
    return Word::from_raw(r.sum, a.width());
}

} // namespace cicdec
