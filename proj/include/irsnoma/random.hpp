#pragma once

// Counter-based random source (Philox 4x32-10). A stream is fully determined
// by (seed, stream index): trial t of a run can draw from stream t and get
// the same values no matter which worker executes it or in what order.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace irsnoma {

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          stream_(stream) {}

    std::uint64_t seed() const {
        return (static_cast<std::uint64_t>(key1_) << 32) | key0_;
    }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() {
        if (pos_ >= 4) refill();
        const std::uint64_t lo = out_[pos_];
        const std::uint64_t hi = out_[pos_ + 1];
        pos_ += 2;
        return (hi << 32) | lo;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Circularly-symmetric complex Gaussian, E|h|^2 = 1 (real and imaginary
    // parts N(0, 1/2)). Drawn as an Exp(1) power and a uniform phase.
    std::complex<double> next_cn() {
        const double u = next_unit();
        const double v = next_unit();
        const double r = std::sqrt(-std::log1p(-u));
        const double phi = 2.0 * 3.141592653589793238462643383279502884 * v;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        lo = static_cast<std::uint32_t>(p);
        hi = static_cast<std::uint32_t>(p >> 32);
    }

    void refill() {
        constexpr std::uint32_t m0 = 0xD2511F53u;
        constexpr std::uint32_t m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u;
        constexpr std::uint32_t w1 = 0xBB67AE85u;

        std::uint32_t c0 = static_cast<std::uint32_t>(block_);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
        std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
        std::uint32_t k0 = key0_;
        std::uint32_t k1 = key1_;

        for (int round = 0; round < 10; ++round) {
            std::uint32_t lo0, hi0, lo1, hi1;
            mulhilo(m0, c0, lo0, hi0);
            mulhilo(m1, c2, lo1, hi1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += w0;
            k1 += w1;
        }
        out_ = {c0, c1, c2, c3};
        pos_ = 0;
        ++block_;
    }

    std::uint32_t key0_, key1_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> out_{};
    int pos_ = 4;
};

}  // namespace irsnoma
