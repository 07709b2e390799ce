#include "spikelab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace spikelab {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_desk_scale(const Spectrum& s, double x, const char* who) {
    if (s.rank() > 3) {
        throw std::invalid_argument(std::string(who) + ": desk-scale verifier, r <= 3");
    }
    if (!(x > 0.0) || x > s.eta_max()) {
        throw std::domain_error(std::string(who) + ": x must lie in (0, eta_max]");
    }
}

VectorXd squared_values(const Spectrum& s) {
    VectorXd a(s.rank());
    for (int i = 0; i < s.rank(); ++i) a(i) = s.value(i) * s.value(i);
    return a;
}

// ---------------------------------------------------------------------------
// Problem 1: log-det maximization over constrained contraction pairs.
// ---------------------------------------------------------------------------

struct PairState {
    MatrixXcd psi1;
    MatrixXcd psi2;
};

struct PairEval {
    double objective = -kInf;  // sum of log dets; -inf outside the open ball
    double overlap = 0.0;      // Re tr(Lambda psi_1 Lambda psi_2)
    MatrixXcd grad1;           // gradient of the penalized functional
    MatrixXcd grad2;
};

double log_det_complement_or_inf(const MatrixXcd& psi, MatrixXcd* inv_times_psi) {
    const int r = static_cast<int>(psi.rows());
    const MatrixXcd m = MatrixXcd::Identity(r, r) - psi.adjoint() * psi;
    Eigen::LLT<MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success) return -kInf;
    double acc = 0.0;
    for (int i = 0; i < r; ++i) {
        const double d = llt.matrixLLT()(i, i).real();
        if (!(d > 0.0)) return -kInf;
        acc += 2.0 * std::log(d);
    }
    if (inv_times_psi != nullptr) {
        // psi (I - psi^* psi)^{-1}, via the Hermitian solve.
        *inv_times_psi = llt.solve(psi.adjoint()).adjoint();
    }
    return acc;
}

double overlap_of(const VectorXd& lambda, const PairState& st) {
    const std::complex<double> tr = (lambda.asDiagonal() * st.psi1 *
                                     lambda.asDiagonal() * st.psi2)
                                        .trace();
    return tr.real();
}

/// Objective and gradient of f - weight * (overlap - x)^2.
bool evaluate_pair(const VectorXd& lambda, const PairState& st, double x,
                   double weight, bool want_grad, PairEval& out) {
    MatrixXcd w1, w2;
    const double f1 = log_det_complement_or_inf(st.psi1, want_grad ? &w1 : nullptr);
    if (f1 == -kInf) return false;
    const double f2 = log_det_complement_or_inf(st.psi2, want_grad ? &w2 : nullptr);
    if (f2 == -kInf) return false;
    out.overlap = overlap_of(lambda, st);
    const double gap = out.overlap - x;
    out.objective = f1 + f2 - weight * gap * gap;
    if (want_grad) {
        const MatrixXcd c1 = (lambda.asDiagonal() * st.psi2 * lambda.asDiagonal()).adjoint();
        const MatrixXcd c2 = (lambda.asDiagonal() * st.psi1 * lambda.asDiagonal()).adjoint();
        out.grad1 = -2.0 * w1 - (2.0 * weight * gap) * c1;
        out.grad2 = -2.0 * w2 - (2.0 * weight * gap) * c2;
    }
    return true;
}

double dot_real(const MatrixXcd& a, const MatrixXcd& b) {
    return (a.adjoint() * b).trace().real();
}

/// L-BFGS two-loop ascent on the penalized functional. Returns evaluations
/// consumed; the state is updated in place.
long lbfgs_ascent(const VectorXd& lambda, PairState& st, double x, double weight,
                  long max_evals) {
    constexpr int kMemory = 8;
    std::vector<PairState> s_hist;
    std::vector<PairState> y_hist;
    std::vector<double> rho_hist;

    PairEval cur;
    long evals = 1;
    if (!evaluate_pair(lambda, st, x, weight, true, cur)) return evals;

    while (evals < max_evals) {
        // Two-loop recursion on the flattened pair (ascent direction).
        PairState dir{cur.grad1, cur.grad2};
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * (dot_real(s_hist[i].psi1, dir.psi1) +
                                      dot_real(s_hist[i].psi2, dir.psi2));
            dir.psi1 -= alpha[i] * y_hist[i].psi1;
            dir.psi2 -= alpha[i] * y_hist[i].psi2;
        }
        if (!s_hist.empty()) {
            const PairState& sl = s_hist.back();
            const PairState& yl = y_hist.back();
            const double yy = dot_real(yl.psi1, yl.psi1) + dot_real(yl.psi2, yl.psi2);
            const double sy = dot_real(sl.psi1, yl.psi1) + dot_real(sl.psi2, yl.psi2);
            if (yy > 0.0 && sy > 0.0) {
                dir.psi1 *= sy / yy;
                dir.psi2 *= sy / yy;
            }
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double b = rho_hist[i] * (dot_real(y_hist[i].psi1, dir.psi1) +
                                            dot_real(y_hist[i].psi2, dir.psi2));
            dir.psi1 += (alpha[i] - b) * s_hist[i].psi1;
            dir.psi2 += (alpha[i] - b) * s_hist[i].psi2;
        }
        double slope = dot_real(cur.grad1, dir.psi1) + dot_real(cur.grad2, dir.psi2);
        if (!(slope > 0.0)) {  // not an ascent direction: fall back to gradient
            dir = PairState{cur.grad1, cur.grad2};
            slope = dot_real(dir.psi1, dir.psi1) + dot_real(dir.psi2, dir.psi2);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }
        if (!(slope > 1e-18)) break;

        // Backtracking line search: quasi-Newton directions are tried at the
        // natural unit step, the raw-gradient fallback at 0.1 displacement.
        double step = 1.0;
        if (s_hist.empty()) {
            const double gnorm = std::sqrt(dot_real(dir.psi1, dir.psi1) +
                                           dot_real(dir.psi2, dir.psi2));
            step = 0.1 / std::max(1e-12, gnorm);
        }
        PairState trial;
        PairEval next;
        bool accepted = false;
        for (int half = 0; half < 40 && evals < max_evals; ++half) {
            trial.psi1 = st.psi1 + step * dir.psi1;
            trial.psi2 = st.psi2 + step * dir.psi2;
            ++evals;
            if (evaluate_pair(lambda, trial, x, weight, true, next) &&
                next.objective >= cur.objective + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        PairState s_new{trial.psi1 - st.psi1, trial.psi2 - st.psi2};
        PairState y_new{cur.grad1 - next.grad1, cur.grad2 - next.grad2};  // ascent: -(g+ - g)
        const double sy = dot_real(s_new.psi1, y_new.psi1) + dot_real(s_new.psi2, y_new.psi2);
        if (sy > 1e-14) {
            s_hist.push_back(std::move(s_new));
            y_hist.push_back(std::move(y_new));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > kMemory) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
        }
        st = trial;
        const double grad_sup =
            std::max(cur.grad1.cwiseAbs().maxCoeff(), cur.grad2.cwiseAbs().maxCoeff());
        cur = next;
        if (grad_sup < 1e-10 * std::max(1.0, std::abs(cur.objective))) break;
    }
    return evals;
}

double largest_singular_value_of(const MatrixXcd& psi) {
    Eigen::JacobiSVD<MatrixXcd> svd(psi);
    return svd.singularValues()(0);
}

/// Scales the matrix into the open spectral ball when needed.
void clip_spectral(MatrixXcd& psi) {
    const double top = largest_singular_value_of(psi);
    const double cap = 1.0 - 1e-9;
    if (top > cap) psi *= cap / top;
}

/// Moves the pair exactly onto the trace constraint: joint rescaling when the
/// current overlap has the right sign (the overlap is bilinear, so scaling
/// both factors by t maps it to t^2 c), Newton steps along the constraint
/// gradient otherwise.
bool project_onto_constraint(const VectorXd& lambda, PairState& st, double x) {
    double c = overlap_of(lambda, st);
    if (c < 0.0) {
        st.psi2 = -st.psi2;
        c = -c;
    }
    if (c > 1e-14) {
        const double t = std::sqrt(x / c);
        PairState scaled{t * st.psi1, t * st.psi2};
        clip_spectral(scaled.psi1);
        clip_spectral(scaled.psi2);
        if (std::abs(overlap_of(lambda, scaled) - x) <= 1e-10 * std::max(1.0, x)) {
            st = scaled;
            return true;
        }
    }
    for (int it = 0; it < 60; ++it) {
        c = overlap_of(lambda, st);
        const double gap = x - c;
        if (std::abs(gap) <= 1e-13 * std::max(1.0, x)) return true;
        const MatrixXcd c1 = (lambda.asDiagonal() * st.psi2 * lambda.asDiagonal()).adjoint();
        const MatrixXcd c2 = (lambda.asDiagonal() * st.psi1 * lambda.asDiagonal()).adjoint();
        const double denom = dot_real(c1, c1) + dot_real(c2, c2);
        if (!(denom > 1e-18)) return false;
        st.psi1 += (gap / denom) * c1;
        st.psi2 += (gap / denom) * c2;
        clip_spectral(st.psi1);
        clip_spectral(st.psi2);
    }
    return std::abs(overlap_of(lambda, st) - x) <= 1e-8 * std::max(1.0, x);
}

MatrixXcd random_contraction(int r, double scale, RngStream& rng) {
    MatrixXcd g(r, r);
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < r; ++i) g(i, j) = rng.next_complex_normal(1.0);
    }
    Eigen::JacobiSVD<MatrixXcd> svd(g);
    return g * (scale / svd.singularValues()(0));
}

/// Random contraction with all singular values equal: keeps every mode alive
/// in the start so none is lost to the origin saddle of the penalty.
MatrixXcd random_scaled_unitary(int r, double scale, RngStream& rng) {
    MatrixXcd g(r, r);
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < r; ++i) g(i, j) = rng.next_complex_normal(1.0);
    }
    Eigen::JacobiSVD<MatrixXcd> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return scale * (svd.matrixU() * svd.matrixV().adjoint());
}

/// Random feasible diagonal pair: a Dirichlet-ish split of the overlap across
/// all modes with random matched phases. Populates every active-set pattern
/// without consulting any closed form.
PairState random_diagonal_pair(const VectorXd& lambda, double x, RngStream& rng) {
    const int r = static_cast<int>(lambda.size());
    VectorXd share(r);
    double weighted = 0.0;
    for (int i = 0; i < r; ++i) {
        share(i) = 0.05 + rng.next_double();
        weighted += lambda(i) * lambda(i) * share(i);
    }
    const double t = x / weighted;
    PairState st{MatrixXcd::Zero(r, r), MatrixXcd::Zero(r, r)};
    for (int i = 0; i < r; ++i) {
        const double amp = std::min(std::sqrt(t * share(i)), 0.95);
        const double phase = 6.283185307179586 * rng.next_double();
        st.psi1(i, i) = std::polar(amp, phase);
        st.psi2(i, i) = std::polar(amp, -phase);  // product stays real positive
    }
    return st;
}

/// Sign-corrects the pair and rescales it toward the target overlap, staying
/// well inside the spectral ball; the penalty finishes the job.
void warm_start_toward(const VectorXd& lambda, PairState& st, double x) {
    double c = overlap_of(lambda, st);
    if (c < 0.0) {
        st.psi2 = -st.psi2;
        c = -c;
    }
    if (!(c > 1e-12)) return;
    double t = std::sqrt(x / c);
    const double top = std::max(largest_singular_value_of(st.psi1),
                                largest_singular_value_of(st.psi2));
    t = std::min(t, 0.95 / top);
    st.psi1 *= t;
    st.psi2 *= t;
}

}  // namespace

OracleResult solve_problem1(const Spectrum& s, double x, long budget, RngStream& rng) {
    check_desk_scale(s, x, "solve_problem1");
    if (!(x < s.eta_max())) {
        throw std::domain_error("solve_problem1: x must be strictly below eta_max");
    }
    const int r = s.rank();
    const VectorXd lambda = [&] {
        VectorXd l(r);
        for (int i = 0; i < r; ++i) l(i) = s.value(i);
        return l;
    }();

    constexpr int kRestarts = 32;
    // A stiff initial penalty pins the overlap near x from the first stage;
    // letting it sag would zero the weaker modes and strand the iterate on a
    // mode-deficient saddle. Doubling per stage still ends around 8e6.
    constexpr double kInitialWeight = 4096.0;
    constexpr int kStages = 12;
    const long per_restart = std::max<long>(200, budget / kRestarts);

    OracleResult result;
    result.value = -kInf;
    for (int restart = 0; restart < kRestarts; ++restart) {
        // Cycle three start families: Ginibre contractions explore freely,
        // scaled unitaries keep every mode populated, random diagonal splits
        // land in each active-set basin.
        PairState st;
        switch (restart % 3) {
            case 0:
                st = PairState{random_contraction(r, 0.5, rng),
                               random_contraction(r, 0.5, rng)};
                break;
            case 1:
                st = PairState{random_scaled_unitary(r, 0.6, rng),
                               random_scaled_unitary(r, 0.6, rng)};
                break;
            default:
                st = random_diagonal_pair(lambda, x, rng);
                break;
        }
        // Starting near the constraint keeps the penalty from dragging the
        // iterate through the origin saddle.
        warm_start_toward(lambda, st, x);
        long left = per_restart;
        double weight = kInitialWeight;
        for (int stage = 0; stage < kStages && left > 0; ++stage) {
            const long stage_evals = std::max<long>(20, per_restart / kStages);
            left -= lbfgs_ascent(lambda, st, x, weight, std::min(stage_evals, left));
            weight *= 2.0;
        }
        result.iterations += per_restart - std::max<long>(left, 0);
        if (!project_onto_constraint(lambda, st, x)) continue;
        PairEval eval;
        if (!evaluate_pair(lambda, st, x, 0.0, false, eval)) continue;
        ++result.iterations;
        if (std::abs(eval.overlap - x) > 1e-8 * std::max(1.0, x)) continue;
        if (eval.objective > result.value) {
            result.value = eval.objective;
            result.psi = {st.psi1, st.psi2};
        }
    }
    result.converged = result.value > -kInf;
    return result;
}

double kkt_check_problem1(const Spectrum& s, const MatrixXcd& psi1,
                          const MatrixXcd& psi2, double mu) {
    const int r = s.rank();
    if (psi1.rows() != r || psi1.cols() != r || psi2.rows() != r || psi2.cols() != r) {
        throw std::invalid_argument("kkt_check_problem1: pair must be r x r");
    }
    Eigen::VectorXd lambda(r);
    for (int i = 0; i < r; ++i) lambda(i) = s.value(i);
    const auto resolvent = [&](const MatrixXcd& psi) {
        const MatrixXcd m = MatrixXcd::Identity(r, r) - psi * psi.adjoint();
        Eigen::LLT<MatrixXcd> llt(m);
        if (llt.info() != Eigen::Success) {
            throw std::domain_error("kkt_check_problem1: I - psi psi^* is singular");
        }
        return MatrixXcd(llt.solve(MatrixXcd::Identity(r, r)));
    };
    const MatrixXcd res1 =
        mu * (lambda.asDiagonal() * psi2 * lambda.asDiagonal()).eval() -
        psi1.adjoint() * resolvent(psi1);
    const MatrixXcd res2 =
        mu * (lambda.asDiagonal() * psi1 * lambda.asDiagonal()).eval() -
        psi2.adjoint() * resolvent(psi2);
    return std::max(res1.cwiseAbs().maxCoeff(), res2.cwiseAbs().maxCoeff());
}

double fit_problem1_multiplier(const Spectrum& s, const MatrixXcd& psi1,
                               const MatrixXcd& psi2) {
    const int r = s.rank();
    Eigen::VectorXd lambda(r);
    for (int i = 0; i < r; ++i) lambda(i) = s.value(i);
    const auto resolvent_term = [&](const MatrixXcd& psi) {
        const MatrixXcd m = MatrixXcd::Identity(r, r) - psi * psi.adjoint();
        return MatrixXcd(psi.adjoint() * m.llt().solve(MatrixXcd::Identity(r, r)));
    };
    const MatrixXcd a1 = lambda.asDiagonal() * psi2 * lambda.asDiagonal();
    const MatrixXcd a2 = lambda.asDiagonal() * psi1 * lambda.asDiagonal();
    const MatrixXcd b1 = resolvent_term(psi1);
    const MatrixXcd b2 = resolvent_term(psi2);
    const double denom = dot_real(a1, a1) + dot_real(a2, a2);
    if (!(denom > 0.0)) return 0.0;
    return (dot_real(a1, b1) + dot_real(a2, b2)) / denom;
}

// ---------------------------------------------------------------------------
// Problem 3: dense grid search over the allocation slice.
// ---------------------------------------------------------------------------

OracleResult solve_problem3_grid(const Spectrum& s, double x, int grid_steps) {
    check_desk_scale(s, x, "solve_problem3_grid");
    if (grid_steps < 2) {
        throw std::invalid_argument("solve_problem3_grid: grid_steps must be >= 2");
    }
    const int r = s.rank();
    const VectorXd a = squared_values(s);

    OracleResult result;
    if (r == 1) {
        const double p0 = x / a(0);
        result.value = std::log1p(-p0);
        result.p = {p0};
        result.iterations = 1;
        result.converged = true;
        return result;
    }

    const int free_axes = r - 1;  // p_0 eliminated through the constraint
    std::vector<double> lo(free_axes, 0.0);
    std::vector<double> hi(free_axes, 1.0);
    std::vector<double> best_free(free_axes, 0.0);
    double best_value = -kInf;
    std::vector<double> best_p;
    long evals = 0;

    for (int pass = 0; pass < 3; ++pass) {
        std::vector<int> idx(free_axes, 0);
        std::vector<double> coord(free_axes, 0.0);
        bool done = false;
        while (!done) {
            double tail = 0.0;  // sum_{i>=1} a_i p_i
            for (int ax = 0; ax < free_axes; ++ax) {
                coord[ax] = lo[ax] + (hi[ax] - lo[ax]) * idx[ax] / grid_steps;
                tail += a(ax + 1) * coord[ax];
            }
            const double p0 = (x - tail) / a(0);
            ++evals;
            if (p0 >= -1e-12 && p0 <= 1.0 + 1e-12) {
                double v = std::log1p(-std::clamp(p0, 0.0, 1.0));
                for (int ax = 0; ax < free_axes; ++ax) v += std::log1p(-coord[ax]);
                if (v > best_value) {
                    best_value = v;
                    best_free = coord;
                    best_p.assign(1, std::clamp(p0, 0.0, 1.0));
                    best_p.insert(best_p.end(), coord.begin(), coord.end());
                }
            }
            for (int ax = 0;; ++ax) {
                if (ax == free_axes) {
                    done = true;
                    break;
                }
                if (++idx[ax] <= grid_steps) break;
                idx[ax] = 0;
            }
        }
        // Refine around the incumbent: shrink each axis to +-2 cells.
        for (int ax = 0; ax < free_axes; ++ax) {
            const double cell = (hi[ax] - lo[ax]) / grid_steps;
            const double c = best_free[ax];
            lo[ax] = std::max(0.0, c - 2.0 * cell);
            hi[ax] = std::min(1.0, c + 2.0 * cell);
        }
    }
    result.value = best_value;
    result.p = best_p;
    result.iterations = evals;
    result.converged = best_value > -kInf;
    return result;
}

// ---------------------------------------------------------------------------
// Problem 4: majorization relaxation by alternating search.
// ---------------------------------------------------------------------------

namespace {

/// Exact maximizer of sum log(1 - p_i) for fixed weights: enumerate active
/// counts, keep the best feasible allocation. Returns -inf when no
/// allocation can reach x.
double waterfill_for_weights(const VectorXd& w, double x, std::vector<double>* p_out,
                             double* level_out) {
    const int r = static_cast<int>(w.size());
    double best = -kInf;
    std::vector<double> best_p(static_cast<std::size_t>(r), 0.0);
    double best_level = 0.0;
    double head = 0.0;
    for (int count = 1; count <= r; ++count) {
        const double wk = w(count - 1);
        if (!(wk > 0.0)) break;
        head += wk;
        double level = (head - x) / count;
        if (level < -1e-15) continue;  // would need p > 1 on the active set
        level = std::max(level, 0.0);
        if (level > w(count - 1) + 1e-15) continue;  // would need a negative p
        std::vector<double> p(static_cast<std::size_t>(r), 0.0);
        double v = 0.0;
        bool ok = true;
        for (int i = 0; i < count; ++i) {
            const double pi = 1.0 - level / w(i);
            if (pi < -1e-12) {
                ok = false;
                break;
            }
            p[static_cast<std::size_t>(i)] = std::clamp(pi, 0.0, 1.0);
            v += std::log1p(-p[static_cast<std::size_t>(i)]);
        }
        if (ok && v > best) {
            best = v;
            best_p = std::move(p);
            best_level = level;
        }
    }
    if (p_out != nullptr) *p_out = best_p;
    if (level_out != nullptr) *level_out = best_level;
    return best;
}

/// Sorted cumulative-sum clipping onto {beta ordered, nonnegative,
/// partial sums dominated by those of alpha}.
std::vector<double> project_majorization(std::vector<double> v, const VectorXd& alpha) {
    const int r = static_cast<int>(alpha.size());
    std::sort(v.begin(), v.end(), std::greater<double>());
    std::vector<double> beta(static_cast<std::size_t>(r), 0.0);
    double cap_running = 0.0;
    double beta_running = 0.0;
    for (int k = 0; k < r; ++k) {
        cap_running += alpha(k);
        double b = std::min(v[static_cast<std::size_t>(k)], cap_running - beta_running);
        if (k > 0) b = std::min(b, beta[static_cast<std::size_t>(k) - 1]);
        b = std::max(b, 0.0);
        beta[static_cast<std::size_t>(k)] = b;
        beta_running += b;
    }
    return beta;
}

}  // namespace

OracleResult solve_problem4_search(const Spectrum& s, double x, long budget,
                                   RngStream& rng) {
    check_desk_scale(s, x, "solve_problem4_search");
    const int r = s.rank();
    const VectorXd alpha = squared_values(s);

    constexpr int kStarts = 8;
    const long per_start = std::max<long>(50, budget / kStarts);

    OracleResult result;
    result.value = -kInf;
    bool stalled_at_best = false;
    for (int start = 0; start < kStarts; ++start) {
        std::vector<double> beta(static_cast<std::size_t>(r));
        if (start == 0) {
            for (int i = 0; i < r; ++i) beta[static_cast<std::size_t>(i)] = alpha(i);
        } else {
            for (int i = 0; i < r; ++i) {
                beta[static_cast<std::size_t>(i)] = rng.next_double() * alpha(0);
            }
            beta = project_majorization(std::move(beta), alpha);
        }
        VectorXd bw = Eigen::Map<const VectorXd>(beta.data(), r);
        std::vector<double> p;
        double level = 0.0;
        double value = waterfill_for_weights(bw, x, &p, &level);
        long evals = 1;
        bool stalled = false;
        while (evals < per_start) {
            // Ascent direction: the envelope derivative of the value in each
            // weight is mu* p_i; infeasible points push straight toward alpha.
            std::vector<double> dir(static_cast<std::size_t>(r));
            if (value == -kInf) {
                for (int i = 0; i < r; ++i) {
                    dir[static_cast<std::size_t>(i)] = alpha(i) - beta[static_cast<std::size_t>(i)];
                }
            } else {
                const double mu = 1.0 / std::max(level, 1e-12);
                for (int i = 0; i < r; ++i) {
                    dir[static_cast<std::size_t>(i)] = mu * p[static_cast<std::size_t>(i)];
                }
            }
            double step = 0.5;
            bool accepted = false;
            while (step > 1e-12 && evals < per_start) {
                std::vector<double> cand(static_cast<std::size_t>(r));
                for (int i = 0; i < r; ++i) {
                    cand[static_cast<std::size_t>(i)] =
                        beta[static_cast<std::size_t>(i)] + step * dir[static_cast<std::size_t>(i)];
                }
                cand = project_majorization(std::move(cand), alpha);
                VectorXd cw = Eigen::Map<const VectorXd>(cand.data(), r);
                std::vector<double> cand_p;
                double cand_level = 0.0;
                const double cand_value = waterfill_for_weights(cw, x, &cand_p, &cand_level);
                ++evals;
                if (cand_value > value + 1e-15) {
                    beta = std::move(cand);
                    p = std::move(cand_p);
                    level = cand_level;
                    value = cand_value;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                stalled = true;
                break;
            }
        }
        result.iterations += evals;
        if (value > result.value) {
            result.value = value;
            result.beta = beta;
            result.p = p;
            stalled_at_best = stalled;
        }
    }
    result.converged = result.value > -kInf && stalled_at_best;
    return result;
}

}  // namespace spikelab
