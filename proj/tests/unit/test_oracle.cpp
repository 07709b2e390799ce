#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "spikelab/grf.hpp"
#include "spikelab/oracle.hpp"
#include "spikelab/rng.hpp"
#include "spikelab/sampling.hpp"
#include "spikelab/spectrum.hpp"

using namespace spikelab;
using Eigen::MatrixXcd;

namespace {

const Spectrum kFig({1.0, 0.7, 0.2});
const Spectrum kTwo({1.0, 0.5});

/// Off-permutation mass: entries left after removing the best column
/// permutation (brute force over r! <= 6 candidates).
double off_permutation_mass(const MatrixXcd& m) {
    const int r = static_cast<int>(m.rows());
    std::vector<int> perm(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) perm[static_cast<std::size_t>(i)] = i;
    double best = std::numeric_limits<double>::infinity();
    do {
        double off = 0.0;
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < r; ++j) {
                if (perm[static_cast<std::size_t>(i)] != j) off += std::norm(m(i, j));
            }
        }
        best = std::min(best, off);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TEST_CASE("log-det pair search recovers the scalar closed form") {
    RngStream rng(51, 0);
    const Spectrum single({0.8});
    const double x = 0.32;  // p = x / lambda^2 = 0.5
    const OracleResult res = solve_problem1(single, x, 30000, rng);
    REQUIRE(res.converged);
    CHECK(std::abs(res.value - 2.0 * std::log(0.5)) < 1e-6);
    // The optimizer is psi_1 = psi_2 = sqrt(x)/lambda up to a phase.
    REQUIRE(res.psi.size() == 2);
    CHECK(std::abs(std::abs(res.psi[0](0, 0)) - std::sqrt(x) / 0.8) < 1e-4);
}

TEST_CASE("log-det pair search matches the rate curve at rank 3") {
    RngStream rng(52, 0);
    const OracleResult res = solve_problem1(kFig, 1.0, 100000, rng);
    REQUIRE(res.converged);
    CHECK(std::abs(res.value - grf(kFig, 1.0).neg_grf) < 1e-3);
    // Feasibility of the returned witness.
    REQUIRE(res.psi.size() == 2);
    Eigen::VectorXd lambda(3);
    for (int i = 0; i < 3; ++i) lambda(i) = kFig.value(i);
    const double overlap =
        (lambda.asDiagonal() * res.psi[0] * lambda.asDiagonal() * res.psi[1])
            .trace()
            .real();
    CHECK(std::abs(overlap - 1.0) < 1e-8);
    CHECK(largest_singular_value(res.psi[0]) < 1.0);
    CHECK(largest_singular_value(res.psi[1]) < 1.0);
}

TEST_CASE("stationarity residual: analytic point, random point, search output") {
    const Spectrum single({0.9});
    const double x = 0.405;  // psi^2 = x / lambda^2 = 0.5
    const double psi = std::sqrt(x) / 0.9;
    MatrixXcd p1(1, 1), p2(1, 1);
    p1(0, 0) = psi;
    p2(0, 0) = psi;
    const double mu = 1.0 / (0.81 * (1.0 - x / 0.81));
    CHECK(kkt_check_problem1(single, p1, p2, mu) < 1e-8);

    // A random contraction pair is nowhere near stationary.
    RngStream rng(53, 0);
    MatrixXcd q1(1, 1), q2(1, 1);
    q1(0, 0) = 0.3 * rng.next_complex_normal(1.0);
    q2(0, 0) = 0.3 * rng.next_complex_normal(1.0);
    CHECK(kkt_check_problem1(single, q1, q2, mu) > 0.05);

    // The rank-2 search output satisfies stationarity with a fitted multiplier.
    const OracleResult res = solve_problem1(kTwo, 0.6, 60000, rng);
    REQUIRE(res.converged);
    const double fitted = fit_problem1_multiplier(kTwo, res.psi[0], res.psi[1]);
    CHECK(kkt_check_problem1(kTwo, res.psi[0], res.psi[1], fitted) < 1e-4);
}

TEST_CASE("optimizers are diagonal up to column permutation") {
    RngStream rng(54, 0);
    const OracleResult res = solve_problem1(kTwo, 1.0, 60000, rng);  // both modes active
    REQUIRE(res.converged);
    CHECK(off_permutation_mass(res.psi[0]) < 1e-3);
    CHECK(off_permutation_mass(res.psi[1]) < 1e-3);
}

TEST_CASE("allocation grid search") {
    // Forced point at rank 1.
    const OracleResult single = solve_problem3_grid(Spectrum({0.8}), 0.32, 400);
    CHECK(single.value == doctest::Approx(std::log(0.5)).epsilon(1e-12));

    const OracleResult a = solve_problem3_grid(kFig, 0.3, 400);
    CHECK(std::abs(a.value - std::log(0.7)) < 1e-4);
    const OracleResult b = solve_problem3_grid(kFig, 1.0, 400);
    CHECK(std::abs(b.value - std::log(0.1225)) < 1e-4);

    // Witness feasibility.
    double recovered = 0.0;
    for (int i = 0; i < 3; ++i) {
        recovered += kFig.value(i) * kFig.value(i) * b.p[static_cast<std::size_t>(i)];
        CHECK(b.p[static_cast<std::size_t>(i)] >= 0.0);
        CHECK(b.p[static_cast<std::size_t>(i)] <= 1.0);
    }
    CHECK(std::abs(recovered - 1.0) < 1e-8);

    CHECK_THROWS_AS(solve_problem3_grid(kFig, 0.0, 400), std::domain_error);
    CHECK_THROWS_AS(solve_problem3_grid(kFig, 2.0, 400), std::domain_error);
}

TEST_CASE("majorization relaxation attains the allocation optimum at alpha") {
    RngStream rng(55, 0);

    // Rank 1: the weight is pinned by majorization.
    const OracleResult single = solve_problem4_search(Spectrum({0.8}), 0.32, 20000, rng);
    CHECK(std::abs(single.beta[0] - 0.64) < 1e-9);
    CHECK(std::abs(single.value - std::log(0.5)) < 1e-9);

    const OracleResult res = solve_problem4_search(kFig, 1.0, 100000, rng);
    REQUIRE(res.converged);
    const double j = waterfill(kFig, 1.0).j_value;
    CHECK(std::abs(res.value - j) < 1e-3);
    REQUIRE(res.beta.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(res.beta[static_cast<std::size_t>(i)] -
                       kFig.value(i) * kFig.value(i)) < 1e-3);
    }

    // Relaxation property plus witness feasibility across random points.
    for (int t = 0; t < 5; ++t) {
        const double x = kFig.eta_max() * (0.1 + 0.8 * rng.next_double());
        const OracleResult r = solve_problem4_search(kFig, x, 30000, rng);
        CHECK(r.value >= waterfill(kFig, x).j_value - 1e-6);
        double weighted = 0.0;
        double cap = 0.0, run = 0.0;
        for (int i = 0; i < 3; ++i) {
            weighted += r.beta[static_cast<std::size_t>(i)] * r.p[static_cast<std::size_t>(i)];
            cap += kFig.value(i) * kFig.value(i);
            run += r.beta[static_cast<std::size_t>(i)];
            CHECK(run <= cap + 1e-8);  // majorization partial sums
            if (i > 0) {
                CHECK(r.beta[static_cast<std::size_t>(i)] <=
                      r.beta[static_cast<std::size_t>(i) - 1] + 1e-12);
            }
        }
        CHECK(std::abs(weighted - x) < 1e-8);
    }
}

TEST_CASE("sandwich: the three routes agree at matched budgets") {
    RngStream rng(56, 0);
    for (double x : {0.4, 0.9}) {
        const double j = waterfill(kTwo, x).j_value;
        const OracleResult p1 = solve_problem1(kTwo, x, 100000, rng);
        const OracleResult p3 = solve_problem3_grid(kTwo, x, 400);
        const OracleResult p4 = solve_problem4_search(kTwo, x, 100000, rng);
        CHECK(std::abs(p1.value - 2.0 * j) < 1e-3);
        CHECK(std::abs(p3.value - j) < 1e-3);
        CHECK(std::abs(p4.value - j) < 1e-3);
    }
}

TEST_CASE("desk-scale guardrails") {
    RngStream rng(57, 0);
    const Spectrum big({1.0, 0.9, 0.8, 0.7});
    CHECK_THROWS_AS(solve_problem1(big, 0.5, 1000, rng), std::invalid_argument);
    CHECK_THROWS_AS(solve_problem3_grid(big, 0.5, 100), std::invalid_argument);
    CHECK_THROWS_AS(solve_problem4_search(big, 0.5, 1000, rng), std::invalid_argument);
    CHECK_THROWS_AS(solve_problem1(kFig, kFig.eta_max(), 1000, rng), std::domain_error);
}
