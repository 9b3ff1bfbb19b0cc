#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mft {

// Counter-based splittable RNG built on Philox4x32-10.
//
// A generator is a (key, counter) pair. Draws advance only the counter, so a
// stream is replayable from its key, and fork() derives an independent stream
// by mixing a tag into the key without touching the parent. Dropout masks and
// data shuffles key their streams off (seed, epoch, batch, op) tags so runs
// replay exactly.
class Rng {
public:
    explicit Rng(uint64_t seed) : key_(split_mix(seed)) {}

    // Derives an independent child stream. Chainable: rng.fork(a).fork(b).
    Rng fork(uint64_t tag) const {
        Rng child(*this);
        child.key_ = split_mix(key_ ^ split_mix(tag + 0x563a4757u));
        child.ctr_ = 0;
        child.buf_pos_ = 4;
        child.has_spare_ = false;
        return child;
    }

    uint32_t next_u32() {
        if (buf_pos_ == 4) refill();
        return buf_[buf_pos_++];
    }

    uint64_t next_u64() {
        uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0; bias is negligible for the
    // small n used here (n << 2^32).
    uint64_t below(uint64_t n) { return next_u64() % n; }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller; caches the paired draw.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    static uint64_t split_mix(uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    void refill() {
        uint32_t c0 = static_cast<uint32_t>(ctr_);
        uint32_t c1 = static_cast<uint32_t>(ctr_ >> 32);
        uint32_t c2 = 0;
        uint32_t c3 = 0;
        uint32_t k0 = static_cast<uint32_t>(key_);
        uint32_t k1 = static_cast<uint32_t>(key_ >> 32);
        for (int round = 0; round < 10; ++round) {
            uint64_t p0 = 0xD2511F53ull * c0;
            uint64_t p1 = 0xCD9E8D57ull * c2;
            uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
            uint32_t lo0 = static_cast<uint32_t>(p0);
            uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
            uint32_t lo1 = static_cast<uint32_t>(p1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_ = {c0, c1, c2, c3};
        buf_pos_ = 0;
        ++ctr_;
    }

    uint64_t key_;
    uint64_t ctr_ = 0;
    std::array<uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mft
