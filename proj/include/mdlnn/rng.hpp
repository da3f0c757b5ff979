#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mdlnn {

// xoshiro256** with splitmix64 seeding. Self-contained so that runs are
// bit-identical across platforms and standard libraries (the std::
// distributions are not portable).
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    uint64_t next() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Unbiased integer in [0, n). Mask rejection keeps the draw portable.
    uint64_t below(uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        if (n == 1) return 0;
        uint64_t mask = n - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        uint64_t r;
        do {
            r = next() & mask;
        } while (r >= n);
        return r;
    }

    // Inclusive integer range.
    int64_t range(int64_t lo, int64_t hi) {
        if (lo > hi) throw std::invalid_argument("Rng::range: empty range");
        return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo) + 1));
    }

    // Uniform in [0, 1), 53-bit resolution.
    double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return real01() < p; }

    // Geometric on {1, 2, ...}: P(k) = (1-p)^(k-1) * p.
    int geometric(double p) {
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("geometric: p must be in (0,1)");
        int k = 1;
        while (real01() >= p) ++k;
        return k;
    }

    std::string state_hex() const {
        std::ostringstream os;
        os << std::hex;
        for (size_t i = 0; i < state_.size(); ++i) {
            if (i) os << ':';
            os << state_[i];
        }
        return os.str();
    }

    void restore_hex(const std::string& text) {
        std::istringstream is(text);
        std::array<uint64_t, 4> s{};
        char sep = ':';
        is >> std::hex >> s[0] >> sep >> s[1] >> sep >> s[2] >> sep >> s[3];
        if (!is) throw std::runtime_error("Rng::restore_hex: malformed state \"" + text + "\"");
        state_ = s;
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<uint64_t, 4> state_{};
};

}  // namespace mdlnn
