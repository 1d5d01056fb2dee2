// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "cicdec/errors.hpp"

namespace cicdec {

// Two's-complement word of explicit width W, 1 <= W <= 64.
// The stored value is always canonical: -2^(W-1) <= value <= 2^(W-1)-1.
// Arithmetic wraps modulo 2^W; LSB truncation is an arithmetic shift
// (floor division), so it rounds toward minus infinity.
class Word {
public:
    Word() = default;

    Word(std::int64_t value, int width) : value_(value), width_(width) {
        check_width(width);
        if (value < min_value(width) || value > max_value(width))
            throw config_error("word: value " + std::to_string(value) +
                               " not representable in " + std::to_string(width) + " bits");
    }

    // Reduce an arbitrary integer modulo 2^width into the canonical range.
    static Word wrap(std::int64_t value, int width) {
        check_width(width);
        Word w;
        w.width_ = width;
        w.value_ = reduce(static_cast<std::uint64_t>(value), width);
        return w;
    }

    static Word from_raw(std::uint64_t bits, int width) {
        check_width(width);
        Word w;
        w.width_ = width;
        w.value_ = reduce(bits, width);
        return w;
    }

    std::int64_t value() const { return value_; }
    int width() const { return width_; }

    // Two's-complement bit pattern, bits above width-1 cleared.
    std::uint64_t raw() const {
        return static_cast<std::uint64_t>(value_) & mask(width_);
    }

    static std::int64_t min_value(int width) {
        return width == 64 ? INT64_MIN : -(std::int64_t(1) << (width - 1));
    }
    static std::int64_t max_value(int width) {
        return width == 64 ? INT64_MAX : (std::int64_t(1) << (width - 1)) - 1;
    }
    static bool fits(std::int64_t value, int width) {
        check_width(width);
        return value >= min_value(width) && value <= max_value(width);
    }
    static std::uint64_t mask(int width) {
        return width == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << width) - 1;
    }

    bool operator==(const Word&) const = default;

    friend std::ostream& operator<<(std::ostream& os, const Word& w) {
        return os << w.value_ << "w" << w.width_;
    }

private:
    static void check_width(int width) {
        if (width < 1 || width > 64)
            throw config_error("word: width " + std::to_string(width) + " out of range [1,64]");
    }

    static std::int64_t reduce(std::uint64_t bits, int width) {
        bits &= mask(width);
        const std::uint64_t sign = std::uint64_t(1) << (width - 1);
        if (width < 64 && (bits & sign)) bits |= ~mask(width);
        return static_cast<std::int64_t>(bits);
    }

    std::int64_t value_ = 0;
    int width_ = 1;
};

// a + b modulo 2^W; both operands must have the same width.
inline Word wrap_add(Word a, Word b) {
    if (a.width() != b.width())
        throw config_error("wrap_add: width mismatch " + std::to_string(a.width()) +
                           " vs " + std::to_string(b.width()));
    return Word::from_raw(a.raw() + b.raw(), a.width());
}

// a - b modulo 2^W.
inline Word wrap_sub(Word a, Word b) {
    if (a.width() != b.width())
        throw config_error("wrap_sub: width mismatch " + std::to_string(a.width()) +
                           " vs " + std::to_string(b.width()));
    return Word::from_raw(a.raw() - b.raw(), a.width());
}

// Drop LSBs down to new_width. Arithmetic shift, i.e. floor(value / 2^k).
inline Word truncate_lsb(Word a, int new_width) {
    if (new_width < 1 || new_width > a.width())
        throw config_error("truncate_lsb: new width " + std::to_string(new_width) +
                           " not in [1," + std::to_string(a.width()) + "]");
    const int drop = a.width() - new_width;
    return Word(a.value() >> drop, new_width);
}

// Widen without changing the value.
inline Word sign_extend(Word a, int new_width) {
    if (new_width < a.width() || new_width > 64)
        throw config_error("sign_extend: new width " + std::to_string(new_width) +
                           " not in [" + std::to_string(a.width()) + ",64]");
    return Word(a.value(), new_width);
}

} // namespace cicdec
