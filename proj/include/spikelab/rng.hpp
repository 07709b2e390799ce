#ifndef SPIKELAB_RNG_HPP
#define SPIKELAB_RNG_HPP

#include <array>
#include <complex>
#include <cstdint>

namespace spikelab {

/**
 * Counter-based random stream (Philox4x32-10).
 *
 * A stream is addressed by a (seed, stream) pair: the seed is the Philox key
 * and the stream id occupies the high half of the 128-bit counter, so
 * distinct stream ids can never produce overlapping counter blocks. Draws
 * are a pure function of (seed, stream, position), which makes parallel
 * Monte Carlo reproducible for any worker count: give each task its own
 * stream id and the schedule cannot matter.
 */
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    std::uint64_t next_u64();

    /// Uniform on [0, 1), 53-bit resolution.
    double next_double();

    /// Uniform on (0, 1]; safe as a log() argument.
    double next_double_pos();

    /// Standard normal via Box-Muller (pairs are cached).
    double next_normal();

    /// Circular complex normal with E|z|^2 = variance.
    std::complex<double> next_complex_normal(double variance);

    /// One Philox block; exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox4x32(
        const std::array<std::uint32_t, 4>& counter,
        const std::array<std::uint32_t, 2>& key);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace spikelab

#endif
