#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace qbo {

// SplitMix64 finalizer.
constexpr std::uint64_t mix_u64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Counter-based generator: draw n is a pure function of (seed, stream, n), so
// identical seeds give identical streams regardless of call interleaving, and
// disjoint streams can be handed to independent batches.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : base_(mix_u64(seed + 0x9e3779b97f4a7c15ULL) ^ mix_u64(~stream)) {}

    std::uint64_t next_u64() noexcept { return mix_u64(base_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

    // Uniform in [0, 1).
    double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1].
    double uniform01_pos() noexcept { return 1.0 - uniform01(); }

    double uniform_range(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    // Index in [0, n).  n is small everywhere in this library; modulo bias is
    // orders of magnitude below every tolerance in play.
    std::size_t uniform_index(std::size_t n) noexcept { return static_cast<std::size_t>(next_u64() % n); }

    double exponential() noexcept { return -std::log1p(-uniform01()); }

    // Flat Dirichlet over n coordinates, via normalized exponentials.
    std::vector<double> dirichlet(std::size_t n) {
        std::vector<double> w(n, 1.0);
        double sum = 0.0;
        for (auto& v : w) {
            v = exponential();
            sum += v;
        }
        if (sum <= 0.0) return std::vector<double>(n, 1.0 / static_cast<double>(n));
        for (auto& v : w) v /= sum;
        return w;
    }

    // Independent stream derived from this generator's seed material.
    CounterRng fork(std::uint64_t stream) const noexcept {
        CounterRng r(0);
        r.base_ = mix_u64(base_ ^ mix_u64(stream + 0x2545f4914f6cdd1dULL));
        return r;
    }

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

} // namespace qbo
