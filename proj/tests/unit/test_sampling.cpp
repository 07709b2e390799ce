#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "spikelab/grf.hpp"
#include "spikelab/rng.hpp"
#include "spikelab/sampling.hpp"
#include "spikelab/spectrum.hpp"

using namespace spikelab;
using Eigen::MatrixXcd;

namespace {

const Spectrum kFig({1.0, 0.7, 0.2});

/// Two-sample Kolmogorov-Smirnov distance between sorted samples.
double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size(), m = b.size();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < n && j < m) {
        if (a[i] <= b[j]) {
            ++i;
        } else {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return d;
}

}  // namespace

TEST_CASE("gaussian entries have the requested moments and are reproducible") {
    RngStream rng(3, 0);
    const int n = 1000;
    const MatrixXcd z = sample_gaussian(n, n, 1.0 / n, rng);
    double abs2 = 0.0;
    std::complex<double> mean = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            abs2 += std::norm(z(i, j));
            mean += z(i, j);
        }
    }
    const double entries = static_cast<double>(n) * n;
    CHECK(std::abs(abs2 / entries - 1.0 / n) < 0.01 / n);
    // Mean of 10^6 entries, each with per-component variance 1/(2n).
    const double sigma_mean = std::sqrt(1.0 / (2.0 * n) / entries);
    CHECK(std::abs(mean.real() / entries) < 4.0 * sigma_mean);
    CHECK(std::abs(mean.imag() / entries) < 4.0 * sigma_mean);

    RngStream r1(11, 5), r2(11, 5);
    CHECK(sample_gaussian(8, 8, 1.0, r1) == sample_gaussian(8, 8, 1.0, r2));

    CHECK_THROWS_AS(sample_gaussian(0, 3, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_gaussian(3, 3, 0.0, rng), std::invalid_argument);
}

TEST_CASE("haar unitaries are unitary with uniform second moments") {
    RngStream rng(4, 0);
    const int n = 64;
    const MatrixXcd theta = sample_haar_unitary(n, rng);
    const double unitarity =
        (theta.adjoint() * theta - MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    CHECK(unitarity < 1e-10);
    CHECK(std::abs(std::abs(theta.determinant()) - 1.0) < 1e-8);

    // Column distribution: E|theta_ij|^2 = 1/n within 2% per entry.
    const int m = 8;
    const int draws = 100000;
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(m, m);
    for (int d = 0; d < draws; ++d) {
        const MatrixXcd u = sample_haar_unitary(m, rng);
        second += u.cwiseAbs2();
    }
    second /= draws;
    CHECK(((second.array() * m) - 1.0).abs().maxCoeff() < 0.02);
    CHECK(std::abs(second.mean() * m - 1.0) < 0.01);
}

TEST_CASE("truncated blocks are contractions matching the haar corner law") {
    RngStream rng(9, 2);
    const int n = 16, r = 3;
    double max_norm = 0.0;
    MatrixXcd mean_block = MatrixXcd::Zero(r, r);
    Eigen::MatrixXd second_block = Eigen::MatrixXd::Zero(r, r);
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) {
        const MatrixXcd psi = sample_truncated_block(n, r, rng);
        max_norm = std::max(max_norm, largest_singular_value(psi));
        mean_block += psi;
        second_block += psi.cwiseAbs2();
    }
    CHECK(max_norm < 1.0);

    MatrixXcd mean_corner = MatrixXcd::Zero(r, r);
    Eigen::MatrixXd second_corner = Eigen::MatrixXd::Zero(r, r);
    for (int d = 0; d < draws; ++d) {
        const MatrixXcd u = sample_haar_unitary(n, rng);
        mean_corner += u.topLeftCorner(r, r);
        second_corner += u.topLeftCorner(r, r).cwiseAbs2();
    }
    // First moments are zero for both laws; compare absolutely at MC scale.
    CHECK((mean_block - mean_corner).cwiseAbs().maxCoeff() / draws < 0.01);
    // Second moments sit at 1/n; require 2% relative agreement.
    const Eigen::MatrixXd rel =
        ((second_block.array() + 1e-300) / (second_corner.array() + 1e-300) - 1.0).abs();
    CHECK(rel.maxCoeff() < 0.02);

    // Full block is the whole unitary.
    const MatrixXcd full = sample_truncated_block(4, 4, rng);
    CHECK((full.adjoint() * full - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);

    CHECK_THROWS_AS(sample_truncated_block(2, 3, rng), std::invalid_argument);
}

TEST_CASE("spikes carry exactly the requested spectrum") {
    RngStream rng(12, 0);
    const int n = 50;
    const MatrixXcd x0 = build_spike(kFig, n, rng);
    Eigen::JacobiSVD<MatrixXcd> svd(x0);
    CHECK(svd.singularValues()(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(svd.singularValues()(1) == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(svd.singularValues()(2) == doctest::Approx(0.2).epsilon(1e-10));
    for (int i = 3; i < n; ++i) CHECK(svd.singularValues()(i) < 1e-12);
    CHECK(x0.squaredNorm() == doctest::Approx(kFig.eta_max()).epsilon(1e-10));

    RngStream other(12, 1);
    const MatrixXcd x1 = build_spike(kFig, n, other);
    CHECK((x0 - x1).norm() > 1e-3);  // fresh directions
    Eigen::JacobiSVD<MatrixXcd> svd1(x1);
    CHECK(svd1.singularValues()(0) == doctest::Approx(1.0).epsilon(1e-10));

    CHECK_THROWS_AS(build_spike(kFig, 2, rng), std::invalid_argument);
}

TEST_CASE("overlap samples respect their hard bounds") {
    RngStream rng(21, 0);
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) {
        const EtaSample s = sample_eta(kFig, 6, rng);
        CHECK(std::abs(s.x) <= kFig.eta_max());
        CHECK(s.y <= 0.0);
    }
    const Spectrum single({1.0});
    for (int d = 0; d < 1000; ++d) {
        CHECK(std::abs(sample_eta(single, 3, rng).x) < 1.0);
    }
}

TEST_CASE("rate curve is an exact upper envelope for the cloud") {
    RngStream rng(22, 0);
    for (int n_block : {6, 12}) {
        for (int d = 0; d < 50000; ++d) {
            const EtaSample s = sample_eta(kFig, n_block, rng);
            const double ax = std::min(std::abs(s.x), kFig.eta_max());
            CHECK(s.y <= grf(kFig, ax).neg_grf + 1e-9);
        }
    }
}

TEST_CASE("overlap distribution is symmetric about zero") {
    RngStream rng(23, 0);
    const int draws = 100000;
    std::vector<double> xs, negs;
    xs.reserve(draws);
    negs.reserve(draws);
    for (int d = 0; d < draws; ++d) {
        const double x = sample_eta(kFig, 6, rng).x;
        xs.push_back(x);
        negs.push_back(-x);
    }
    // Two-sample KS at the 1% level.
    const double critical =
        1.628 * std::sqrt(2.0 / static_cast<double>(draws));
    CHECK(ks_distance(xs, negs) < critical);
}

TEST_CASE("gram deviations are small and nonnegative") {
    RngStream rng(31, 0);
    CHECK(gram_deviation(100, 2, rng) >= 0.0);

    // Single column: matches scalar chi-square concentration, E dev^2 ~ 1/n.
    const int n = 100, trials = 10000;
    double sumsq = 0.0;
    for (int t = 0; t < trials; ++t) {
        const double dev = gram_deviation(n, 1, rng);
        sumsq += dev * dev;
    }
    CHECK(std::abs(sumsq / trials - 1.0 / n) < 0.1 / n);

    CHECK_THROWS_AS(gram_deviation(2, 3, rng), std::invalid_argument);
}
