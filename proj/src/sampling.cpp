#include "spikelab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace spikelab {

namespace {

using Eigen::MatrixXcd;

void require_dims(int n, int r, const char* who) {
    if (r < 1 || n < r) {
        throw std::invalid_argument(std::string(who) + ": requires n >= r >= 1");
    }
}

/// Absorbs the phases of the R diagonal into Q so the factorization has a
/// positive-diagonal triangular factor; this makes Q exactly Haar.
MatrixXcd phase_corrected_q(const Eigen::HouseholderQR<MatrixXcd>& qr, int n, int r) {
    MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(n, r);
    const MatrixXcd& packed = qr.matrixQR();
    for (int j = 0; j < r; ++j) {
        const std::complex<double> d = packed(j, j);
        const double mag = std::abs(d);
        if (mag > 0.0) q.col(j) *= d / mag;
    }
    return q;
}

/// Inverse square root of a Hermitian positive definite r x r matrix.
MatrixXcd inverse_sqrt(const MatrixXcd& gram) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
    Eigen::VectorXd inv_root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().adjoint();
}

double log_det_complement(const MatrixXcd& psi) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(psi.adjoint() * psi,
                                                Eigen::EigenvaluesOnly);
    double acc = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        acc += std::log1p(-es.eigenvalues()(i));
    }
    return acc;
}

}  // namespace

MatrixXcd sample_gaussian(int n1, int n2, double variance, RngStream& rng) {
    if (n1 < 1 || n2 < 1) {
        throw std::invalid_argument("sample_gaussian: dimensions must be positive");
    }
    if (!(variance > 0.0)) {
        throw std::invalid_argument("sample_gaussian: variance must be positive");
    }
    MatrixXcd m(n1, n2);
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            m(i, j) = rng.next_complex_normal(variance);
        }
    }
    return m;
}

MatrixXcd sample_haar_unitary(int n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("sample_haar_unitary: n must be positive");
    const MatrixXcd g = sample_gaussian(n, n, 1.0, rng);
    Eigen::HouseholderQR<MatrixXcd> qr(g);
    return phase_corrected_q(qr, n, n);
}

MatrixXcd haar_columns(int n, int r, RngStream& rng) {
    require_dims(n, r, "haar_columns");
    const MatrixXcd g = sample_gaussian(n, r, 1.0, rng);
    Eigen::HouseholderQR<MatrixXcd> qr(g);
    return phase_corrected_q(qr, n, r);
}

MatrixXcd sample_truncated_block(int n, int r, RngStream& rng) {
    require_dims(n, r, "sample_truncated_block");
    const MatrixXcd g_full = sample_gaussian(n, r, 1.0, rng);
    const MatrixXcd top = g_full.topRows(r);
    return top * inverse_sqrt(g_full.adjoint() * g_full);
}

MatrixXcd build_spike(const Spectrum& s, int n, RngStream& rng) {
    const int r = s.rank();
    require_dims(n, r, "build_spike");
    const MatrixXcd u = haar_columns(n, r, rng);
    const MatrixXcd v = haar_columns(n, r, rng);
    Eigen::VectorXd lambda(r);
    for (int i = 0; i < r; ++i) lambda(i) = s.value(i);
    return u * lambda.asDiagonal() * v.adjoint();
}

EtaSample sample_eta(const Spectrum& s, int n, RngStream& rng) {
    const int r = s.rank();
    require_dims(n, r, "sample_eta");
    const MatrixXcd psi1 = sample_truncated_block(n, r, rng);
    const MatrixXcd psi2 = sample_truncated_block(n, r, rng);
    Eigen::VectorXd lambda(r);
    for (int i = 0; i < r; ++i) lambda(i) = s.value(i);
    const std::complex<double> tr =
        (lambda.asDiagonal() * psi1 * lambda.asDiagonal() * psi2).trace();
    return EtaSample{tr.real(), log_det_complement(psi1) + log_det_complement(psi2)};
}

double gram_deviation(int n, int r, RngStream& rng) {
    require_dims(n, r, "gram_deviation");
    const MatrixXcd g = sample_gaussian(n, r, 1.0, rng);
    MatrixXcd m = g.adjoint() * g / static_cast<double>(n);
    m -= MatrixXcd::Identity(r, r);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double largest_singular_value(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m.adjoint() * m,
                                                Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace spikelab
