#pragma once

// FSK symbol mapping with natural binary labeling (bit 0 of each group is
// the most significant) and the seeded block interleaver.

#include <cstdint>
#include <span>
#include <vector>

#include "common.hpp"

namespace pnc {

inline int bits_per_symbol(int mod_order) {
    if (mod_order < 2 || (mod_order & (mod_order - 1)) != 0)
        throw std::invalid_argument("mod_order must be a power of two >= 2");
    int mu = 0;
    while ((1 << mu) < mod_order) ++mu;
    return mu;
}

struct SymbolFrame {
    int mod_order = 0;
    std::vector<int> symbols;
};

inline SymbolFrame modulate(std::span<const std::uint8_t> bits, int mod_order) {
    const int mu = bits_per_symbol(mod_order);
    if (bits.size() % std::size_t(mu) != 0)
        throw std::invalid_argument("modulate: bit count not divisible by bits per symbol");
    SymbolFrame f;
    f.mod_order = mod_order;
    f.symbols.resize(bits.size() / std::size_t(mu));
    for (std::size_t k = 0; k < f.symbols.size(); ++k) {
        int q = 0;
        for (int m = 0; m < mu; ++m) q = (q << 1) | (bits[k * std::size_t(mu) + std::size_t(m)] & 1);
        f.symbols[k] = q;
    }
    return f;
}

// Bit m of symbol q under the same labeling (m = 0 is most significant).
inline int symbol_bit(int q, int m, int mu) { return (q >> (mu - 1 - m)) & 1; }

class Interleaver {
public:
    static Interleaver random(std::size_t n, std::uint64_t seed) {
        Interleaver il;
        il.perm_.resize(n);
        std::iota(il.perm_.begin(), il.perm_.end(), 0);
        Rng rng(derive_seed(seed, 0x49e, n));
        rng.shuffle(il.perm_.begin(), il.perm_.end());
        il.build_inverse();
        return il;
    }

    static Interleaver identity(std::size_t n) {
        Interleaver il;
        il.perm_.resize(n);
        std::iota(il.perm_.begin(), il.perm_.end(), 0);
        il.build_inverse();
        return il;
    }

    std::size_t size() const { return perm_.size(); }
    const std::vector<std::size_t>& permutation() const { return perm_; }

    template <class T>
    std::vector<T> interleave(std::span<const T> x) const {
        check(x.size());
        std::vector<T> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[perm_[i]];
        return out;
    }

    template <class T>
    std::vector<T> deinterleave(std::span<const T> x) const {
        check(x.size());
        std::vector<T> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[perm_[i]] = x[i];
        return out;
    }

private:
    void check(std::size_t n) const {
        if (n != perm_.size()) throw std::invalid_argument("interleaver: length mismatch");
    }
    void build_inverse() {
        inv_.resize(perm_.size());
        for (std::size_t i = 0; i < perm_.size(); ++i) inv_[perm_[i]] = i;
    }
    std::vector<std::size_t> perm_, inv_;
};

}  // namespace pnc
