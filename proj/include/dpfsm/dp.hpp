#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dpfsm/base.hpp"

namespace dpfsm {

// Counter-based generator (SplitMix64 finalizer over key + counter).
// Splitting derives an independent stream; identical keys give identical
// streams on every platform.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + 0x9E3779B97F4A7C15ull * ++ctr_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform draw strictly inside (0, 1).
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    CounterRng split() { return CounterRng(next_u64()); }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

// Laplace(scale) via inverse CDF; scale 0 returns exactly 0.
inline double laplace(double scale, CounterRng& rng) {
    if (scale < 0) throw std::invalid_argument("laplace: negative scale");
    if (scale == 0) return 0.0;
    double u = rng.next_unit() - 0.5;
    double sign = u < 0 ? -1.0 : 1.0;
    return -scale * sign * std::log1p(-2.0 * std::fabs(u));
}

// Privacy budget bookkeeping for one mining run.
struct NoiseConfig {
    double epsilon = 1.0;
    double beta = 0.1;
    std::uint64_t seed = 1;
    bool noiseless = false;
    double epsilon0 = 0;  // per-mechanism budget
    double sigma = 0;     // Laplace scale of binary-tree cells

    static NoiseConfig derive(double epsilon, double beta, std::int64_t n, std::int64_t ell,
                              std::int64_t ell_bit, bool noiseless, std::uint64_t seed) {
        if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
        if (!(beta > 0 && beta < 1)) throw std::invalid_argument("beta must lie in (0,1)");
        if (n < 1 || ell < 1) throw std::invalid_argument("empty corpus");
        NoiseConfig nc;
        nc.epsilon = epsilon;
        nc.beta = beta;
        nc.seed = seed;
        nc.noiseless = noiseless;
        nc.epsilon0 = (epsilon / static_cast<double>(formula_log2(ell))) /
                      (4.0 * static_cast<double>(ell) * static_cast<double>(formula_log2(n * ell_bit)));
        nc.sigma = noiseless ? 0.0 : static_cast<double>(formula_log2(ell_bit)) / nc.epsilon0;
        return nc;
    }
};

// Streaming Binary Tree Mechanism for one heavy path: noisy prefix sums over
// a stream of at most `capacity` reals. Keeps the dyadic decomposition of the
// current prefix as a merge stack, so live state is O(log capacity); each
// dyadic cell's noise is drawn once when the cell completes and reused by
// every query that includes it. Single-owner mutable state.
class BtmCounter {
public:
    BtmCounter(std::int64_t capacity, double sigma, CounterRng rng)
        : capacity_(capacity), sigma_(sigma), rng_(rng) {
        if (capacity < 1) throw std::invalid_argument("binary tree mechanism: capacity must be >= 1");
        if (sigma < 0) throw std::invalid_argument("binary tree mechanism: negative sigma");
        cells_.reserve(static_cast<std::size_t>(ceil_log2(capacity)) + 2);
    }

    std::int64_t capacity() const { return capacity_; }
    std::int64_t position() const { return pos_; }

    void increment(double value) {
        if (pos_ == capacity_) throw std::length_error("binary tree mechanism: stream exhausted");
        ++pos_;
        cells_.push_back({0, value, laplace(sigma_, rng_)});
        while (cells_.size() >= 2 &&
               cells_[cells_.size() - 1].level == cells_[cells_.size() - 2].level) {
            Cell top = cells_.back();
            cells_.pop_back();
            Cell& below = cells_.back();
            below.level += 1;
            below.sum += top.sum;
            below.noise = laplace(sigma_, rng_);
        }
    }

    double query() const {
        if (pos_ == 0) throw std::logic_error("binary tree mechanism: query before first increment");
        double total = 0;
        for (const Cell& c : cells_) total += c.sum + c.noise;
        return total;
    }

private:
    struct Cell {
        int level;
        double sum;
        double noise;
    };
    std::vector<Cell> cells_;
    std::int64_t capacity_;
    std::int64_t pos_ = 0;
    double sigma_;
    CounterRng rng_;
};

}  // namespace dpfsm
