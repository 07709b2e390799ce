#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "spikelab/rng.hpp"

using spikelab::RngStream;

TEST_CASE("philox known-answer vectors") {
    // Cross-checked against an independent reference implementation of the
    // published 10-round algorithm.
    auto out = RngStream::philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);

    out = RngStream::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);

    out = RngStream::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("identical (seed, stream) reproduces draws bit for bit") {
    RngStream a(42, 7);
    RngStream b(42, 7);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    const double ga = RngStream(42, 7).next_normal();
    const double gb = RngStream(42, 7).next_normal();
    CHECK(ga == gb);
}

TEST_CASE("distinct streams decorrelate") {
    RngStream a(42, 0);
    RngStream b(42, 1);
    RngStream c(43, 0);
    int equal_ab = 0, equal_ac = 0;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t va = a.next_u64();
        if (va == b.next_u64()) ++equal_ab;
        if (va == c.next_u64()) ++equal_ac;
    }
    CHECK(equal_ab == 0);
    CHECK(equal_ac == 0);
}

TEST_CASE("uniforms live in [0,1) with the right mean and variance") {
    RngStream rng(2024, 0);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sumsq += u * u;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
    CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normals have unit variance and complex normals the requested one") {
    RngStream rng(5, 11);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.next_normal();
        sum += z;
        sumsq += z * z;
    }
    CHECK(std::abs(sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(sumsq / n - 1.0) < 0.02);

    const double variance = 0.25;
    double abs2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto z = rng.next_complex_normal(variance);
        abs2 += std::norm(z);
    }
    CHECK(std::abs(abs2 / n - variance) < 0.01 * variance * 4);
}
