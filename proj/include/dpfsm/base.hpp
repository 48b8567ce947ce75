#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>

namespace dpfsm {

// Interned alphabet symbol (index into the declared alphabet).
using SymId = char32_t;
// Document over interned symbols.
using IdString = std::u32string;

// Encoded-domain symbol: bits, terminator, or a per-document delimiter.
using EncSym = char32_t;
using EncString = std::u32string;

inline constexpr EncSym kBit0 = 0;
inline constexpr EncSym kBit1 = 1;
inline constexpr EncSym kTerm = 2;       // block terminator '$'
inline constexpr EncSym kDelimBase = 3;  // delimiter of document i is kDelimBase + i

constexpr bool is_delimiter(EncSym s) { return s >= kDelimBase; }

// ceil(log2(x)) for x >= 1.
constexpr std::int64_t ceil_log2(std::int64_t x) {
    return x <= 1 ? 0 : std::bit_width(static_cast<std::uint64_t>(x - 1));
}

// log2 as the threshold formulas use it: rounded up and floored at 1
// (the floor only matters for ceil_log2(1) = 0, which would zero a noise
// scale and divide epsilon_0 by zero).
constexpr std::int64_t formula_log2(std::int64_t x) {
    return std::max<std::int64_t>(std::int64_t{1}, ceil_log2(x));
}

// Renders an encoded symbol for diagnostics: 0, 1, $ or #i.
inline std::string render_sym(EncSym s) {
    switch (s) {
        case kBit0: return "0";
        case kBit1: return "1";
        case kTerm: return "$";
        default: return "#" + std::to_string(static_cast<std::uint32_t>(s - kDelimBase));
    }
}

inline std::string render_enc(const EncString& s, std::size_t limit = std::size_t(-1)) {
    std::string out;
    for (std::size_t i = 0; i < s.size() && i < limit; ++i) out += render_sym(s[i]);
    if (s.size() > limit) out += "..";
    return out;
}

}  // namespace dpfsm
