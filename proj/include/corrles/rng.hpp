#pragma once

#include <array>
#include <cstdint>

namespace corrles {

// Philox4x32-10 (Salmon et al. 2011). The key is the experiment seed and
// the upper half of the counter selects an independent stream, so trial k
// always sees the same numbers no matter which thread runs it.
class Philox {
public:
    using Block = std::array<std::uint32_t, 4>;

    Philox(std::uint64_t seed, std::uint64_t stream = 0);

    static Block bijection(Block ctr, std::array<std::uint32_t, 2> key);

    std::uint64_t next_u64();
    // uniform on the open interval (0, 1), 53-bit resolution
    double uniform();
    double normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Block buf_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// stream id used for attempt `attempt` of trial `trial`
inline std::uint64_t trial_stream(std::uint64_t trial, std::uint64_t attempt = 0) {
    return trial | (attempt << 40);
}

} // namespace corrles
