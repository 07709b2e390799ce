#ifndef SPIKELAB_ORACLE_HPP
#define SPIKELAB_ORACLE_HPP

#include <Eigen/Dense>
#include <vector>

#include "spikelab/rng.hpp"
#include "spikelab/spectrum.hpp"

namespace spikelab {

/**
 * Result of one of the brute-force verifiers. These searches know nothing
 * about the closed forms they are checked against; they exist to certify
 * them. value is the best objective found, the witness fields hold the
 * argmax in problem-specific form.
 */
struct OracleResult {
    double value = 0.0;
    std::vector<Eigen::MatrixXcd> psi;  // contraction pair (log-det maximization)
    std::vector<double> beta;           // weight vector (majorization relaxation)
    std::vector<double> p;              // allocation vector
    long iterations = 0;
    bool converged = false;
};

/**
 * Maximizes log det(I - psi_1^* psi_1) + log det(I - psi_2^* psi_2) over
 * complex contraction pairs with Re tr(Lambda psi_1 Lambda psi_2) = x,
 * by multi-start quasi-Newton ascent on a quadratic-penalty ramp followed
 * by an exact rescaling onto the trace constraint. budget caps the total
 * number of objective evaluations across restarts. Desk scale: r <= 3.
 */
OracleResult solve_problem1(const Spectrum& s, double x, long budget, RngStream& rng);

/**
 * Maximizes sum_i log(1 - p_i) over the slice {0 <= p_i <= 1,
 * sum_i lambda_i^2 p_i = x} by dense grid search over r-1 free coordinates
 * (the first allocation is eliminated through the constraint), with local
 * grid refinement around the incumbent. Desk scale: r <= 3.
 */
OracleResult solve_problem3_grid(const Spectrum& s, double x, int grid_steps = 400);

/**
 * Maximizes sum_i log(1 - p_i) jointly over allocations p and ordered
 * nonnegative weights beta weakly majorized by (lambda_1^2, ..., lambda_r^2),
 * subject to sum_i beta_i p_i = x. Alternates an exact water-filling step in
 * p with projected gradient steps in beta (projection by sorted
 * cumulative-sum clipping), multi-started from the majorization vertex and
 * random interior points. Desk scale: r <= 3.
 */
OracleResult solve_problem4_search(const Spectrum& s, double x, long budget,
                                   RngStream& rng);

/**
 * Max-entry residual of the stationarity system
 *   mu Lambda psi_2 Lambda = psi_1^* (I - psi_1 psi_1^*)^{-1}
 *   mu Lambda psi_1 Lambda = psi_2^* (I - psi_2 psi_2^*)^{-1}
 * used to certify candidate optimizers. Requires ||psi_i||_2 < 1.
 */
double kkt_check_problem1(const Spectrum& s, const Eigen::MatrixXcd& psi1,
                          const Eigen::MatrixXcd& psi2, double mu);

/// Least-squares multiplier for kkt_check_problem1 at a candidate pair.
double fit_problem1_multiplier(const Spectrum& s, const Eigen::MatrixXcd& psi1,
                               const Eigen::MatrixXcd& psi2);

}  // namespace spikelab

#endif
