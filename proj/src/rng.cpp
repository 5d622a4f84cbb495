#include "corrles/rng.hpp"

#include <cmath>
#include <numbers>

namespace corrles {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;
} // namespace

Philox::Philox(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

Philox::Block Philox::bijection(Block c, std::array<std::uint32_t, 2> k) {
    for (int r = 0; r < 10; ++r) {
        std::uint64_t p0 = std::uint64_t(kM0) * c[0];
        std::uint64_t p1 = std::uint64_t(kM1) * c[2];
        Block n{std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
                std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
        c = n;
        k[0] += kW0;
        k[1] += kW1;
    }
    return c;
}

void Philox::refill() {
    Block ctr{std::uint32_t(block_), std::uint32_t(block_ >> 32), std::uint32_t(stream_),
              std::uint32_t(stream_ >> 32)};
    buf_ = bijection(ctr, {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)});
    ++block_;
    pos_ = 0;
}

std::uint64_t Philox::next_u64() {
    if (pos_ > 2) refill();
    std::uint64_t lo = buf_[pos_], hi = buf_[pos_ + 1];
    pos_ += 2;
    return lo | (hi << 32);
}

double Philox::uniform() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Philox::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(uniform()));
    double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
}

} // namespace corrles
