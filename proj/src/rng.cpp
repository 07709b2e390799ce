#include "spikelab/rng.hpp"

#include <cmath>

namespace spikelab {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& ctr,
                       const std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::philox4x32(
    const std::array<std::uint32_t, 4>& counter,
    const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> ctr = counter;
    std::array<std::uint32_t, 2> k = key;
    round_once(ctr, k);
    for (int i = 0; i < 9; ++i) {
        k[0] += kWeyl0;
        k[1] += kWeyl1;
        round_once(ctr, k);
    }
    return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

void RngStream::refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32)};
    const std::array<std::uint32_t, 2> key = {
        static_cast<std::uint32_t>(seed_),
        static_cast<std::uint32_t>(seed_ >> 32)};
    buf_ = philox4x32(ctr, key);
    ++block_;
    buf_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
    if (buf_pos_ > 2) refill();
    const std::uint64_t lo = buf_[buf_pos_];
    const std::uint64_t hi = buf_[buf_pos_ + 1];
    buf_pos_ += 2;
    return lo | (hi << 32);
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_double_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double radius = std::sqrt(-2.0 * std::log(next_double_pos()));
    const double angle = 6.283185307179586476925286766559 * next_double();
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::complex<double> RngStream::next_complex_normal(double variance) {
    const double radius = std::sqrt(-variance * std::log(next_double_pos()));
    const double angle = 6.283185307179586476925286766559 * next_double();
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace spikelab
