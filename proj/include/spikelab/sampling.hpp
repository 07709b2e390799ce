#ifndef SPIKELAB_SAMPLING_HPP
#define SPIKELAB_SAMPLING_HPP

#include <Eigen/Dense>

#include "spikelab/rng.hpp"
#include "spikelab/spectrum.hpp"

namespace spikelab {

/**
 * One Monte Carlo draw of the overlap pair:
 *   x = Re tr(Lambda Psi_1 Lambda Psi_2)
 *   y = sum_i log det(I - Psi_i^* Psi_i)
 * with Psi_1, Psi_2 independent truncated Haar blocks. Always |x| <= eta_max
 * and y <= 0; the rate curve -I(|x|) is an exact upper envelope for y.
 */
struct EtaSample {
    double x = 0.0;
    double y = 0.0;
};

/// n1 x n2 matrix of i.i.d. circular complex normals with E|z|^2 = variance.
Eigen::MatrixXcd sample_gaussian(int n1, int n2, double variance, RngStream& rng);

/// Haar-distributed n x n unitary: QR of a complex Ginibre matrix with the
/// triangular factor's diagonal phases absorbed into Q.
Eigen::MatrixXcd sample_haar_unitary(int n, RngStream& rng);

/// First r columns of a Haar unitary (thin QR of an n x r Ginibre block).
Eigen::MatrixXcd haar_columns(int n, int r, RngStream& rng);

/// Upper r x r block of an n x n Haar unitary, drawn through its Gaussian
/// representation G (G~^* G~)^{-1/2}; spectral norm < 1 almost surely.
Eigen::MatrixXcd sample_truncated_block(int n, int r, RngStream& rng);

/// Rank-r spike U Lambda V^* with independent Haar column frames; the
/// singular values equal the spectrum exactly.
Eigen::MatrixXcd build_spike(const Spectrum& s, int n, RngStream& rng);

/// Draws independent truncated blocks at dimension n and evaluates the
/// overlap pair (x, y).
EtaSample sample_eta(const Spectrum& s, int n, RngStream& rng);

/// Spectral deviation ||(1/n) G~^* G~ - I||_2 of a fresh n x r Gaussian
/// Gram matrix; concentrates like exp(-n delta^2 / 2).
double gram_deviation(int n, int r, RngStream& rng);

/// Largest singular value via the Gram eigenproblem.
double largest_singular_value(const Eigen::MatrixXcd& m);

}  // namespace spikelab

#endif
