#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dpfsm/base.hpp"

namespace dpfsm {

// Front-end interning pass: maps an ordered byte alphabet to symbol ids
// 0..|sigma|-1. The mining core only ever sees ids.
class CharAlphabet {
public:
    static CharAlphabet from_symbols(std::string_view symbols) {
        if (symbols.empty()) throw std::invalid_argument("invalid alphabet: empty");
        CharAlphabet a;
        a.ids_.fill(-1);
        for (char c : symbols) {
            auto u = static_cast<unsigned char>(c);
            if (a.ids_[u] != -1)
                throw std::invalid_argument(std::string("invalid alphabet: duplicate symbol '") + c + "'");
            a.ids_[u] = static_cast<std::int16_t>(a.symbols_.size());
            a.symbols_ += c;
        }
        return a;
    }

    // Sorted set of distinct symbols occurring in the corpus.
    static CharAlphabet infer(std::span<const std::string> docs) {
        std::array<bool, 256> seen{};
        for (const auto& d : docs)
            for (char c : d) seen[static_cast<unsigned char>(c)] = true;
        std::string syms;
        for (int u = 0; u < 256; ++u)
            if (seen[u]) syms += static_cast<char>(u);
        if (syms.empty()) throw std::invalid_argument("invalid alphabet: empty corpus");
        return from_symbols(syms);
    }

    std::size_t size() const { return symbols_.size(); }
    const std::string& symbols() const { return symbols_; }
    char symbol(SymId id) const { return symbols_.at(id); }

    std::optional<SymId> id_of(char c) const {
        std::int16_t id = ids_[static_cast<unsigned char>(c)];
        if (id < 0) return std::nullopt;
        return static_cast<SymId>(id);
    }

    IdString intern(std::string_view doc) const {
        IdString out;
        out.reserve(doc.size());
        for (std::size_t i = 0; i < doc.size(); ++i) {
            auto id = id_of(doc[i]);
            if (!id)
                throw std::invalid_argument("symbol '" + std::string(1, doc[i]) +
                                            "' at position " + std::to_string(i) +
                                            " is not in the declared alphabet");
            out.push_back(*id);
        }
        return out;
    }

    std::string externalize(const IdString& ids) const {
        std::string out;
        out.reserve(ids.size());
        for (SymId id : ids) out += symbol(id);
        return out;
    }

private:
    CharAlphabet() = default;
    std::string symbols_;
    std::array<std::int16_t, 256> ids_{};
};

struct EncodedString {
    EncString symbols;
    std::optional<std::size_t> origin_doc;
};

// Block encoding E: symbol id i maps to the b-bit binary representation of i
// followed by the terminator. Every codeword has length round() = b + 1.
class Codebook {
public:
    static Codebook build(std::size_t alphabet_size) {
        if (alphabet_size == 0) throw std::invalid_argument("invalid alphabet: empty");
        Codebook cb;
        cb.sigma_ = alphabet_size;
        cb.block_bits_ = static_cast<int>(formula_log2(static_cast<std::int64_t>(alphabet_size)));
        cb.round_ = cb.block_bits_ + 1;
        cb.forward_.resize(alphabet_size);
        for (std::size_t i = 0; i < alphabet_size; ++i) {
            EncString w(static_cast<std::size_t>(cb.round_), kBit0);
            for (int bit = 0; bit < cb.block_bits_; ++bit)
                w[bit] = (i >> (cb.block_bits_ - 1 - bit)) & 1 ? kBit1 : kBit0;
            w[cb.block_bits_] = kTerm;
            cb.forward_[i] = std::move(w);
        }
        return cb;
    }

    std::size_t alphabet_size() const { return sigma_; }
    int block_bits() const { return block_bits_; }
    int round() const { return round_; }

    const EncString& codeword(SymId id) const { return forward_.at(id); }

    // Reverse map: a full block back to its symbol id; nullopt outside E's image.
    std::optional<SymId> block_to_symbol(std::span<const EncSym> block) const {
        if (block.size() != static_cast<std::size_t>(round_)) return std::nullopt;
        if (block[static_cast<std::size_t>(block_bits_)] != kTerm) return std::nullopt;
        std::size_t value = 0;
        for (int bit = 0; bit < block_bits_; ++bit) {
            EncSym s = block[static_cast<std::size_t>(bit)];
            if (s != kBit0 && s != kBit1) return std::nullopt;
            value = (value << 1) | (s == kBit1 ? 1u : 0u);
        }
        if (value >= sigma_) return std::nullopt;
        return static_cast<SymId>(value);
    }

    EncodedString encode(const IdString& doc) const {
        EncString out;
        out.reserve(doc.size() * static_cast<std::size_t>(round_));
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (static_cast<std::size_t>(doc[i]) >= sigma_)
                throw std::invalid_argument("symbol id " + std::to_string(doc[i]) +
                                            " at position " + std::to_string(i) +
                                            " is outside the alphabet (size " +
                                            std::to_string(sigma_) + ")");
            out += forward_[doc[i]];
        }
        return EncodedString{std::move(out), std::nullopt};
    }

    // Full round-trip decode; nullopt marks an undecodable string and is used
    // to filter outputs.
    std::optional<IdString> decode(const EncString& enc) const {
        if (enc.size() % static_cast<std::size_t>(round_) != 0) return std::nullopt;
        IdString out;
        out.reserve(enc.size() / static_cast<std::size_t>(round_));
        for (std::size_t p = 0; p < enc.size(); p += static_cast<std::size_t>(round_)) {
            auto id = block_to_symbol({enc.data() + p, static_cast<std::size_t>(round_)});
            if (!id) return std::nullopt;
            out.push_back(*id);
        }
        return out;
    }

    // True iff |p| = a*r + c with 0 <= c <= r and the first a blocks are
    // codewords; only the final partial block may be incomplete.
    bool is_character_aligned(const EncString& p) const {
        const auto r = static_cast<std::size_t>(round_);
        std::size_t full = p.size() / r;
        if (p.size() % r == 0 && full > 0) --full;  // c = r decomposition
        for (std::size_t j = 0; j < full; ++j)
            if (!block_to_symbol({p.data() + j * r, r})) return false;
        return true;
    }

private:
    Codebook() = default;
    std::size_t sigma_ = 0;
    int block_bits_ = 0;
    int round_ = 0;
    std::vector<EncString> forward_;
};

}  // namespace dpfsm
