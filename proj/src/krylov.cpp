#include "qnet/krylov.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qnet/linalg.hpp"

namespace qnet {

namespace {

// Max absolute row sum, an upper bound on the spectral radius.
double inf_norm(const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& h) {
    double best = 0.0;
    for (int k = 0; k < h.outerSize(); ++k) {
        double row = 0.0;
        for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(h, k); it; ++it) {
            row += std::abs(it.value());
        }
        best = std::max(best, row);
    }
    return best;
}

} // namespace

KrylovStepper::KrylovStepper(const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& h,
                             Eigen::VectorXcd psi0, KrylovOptions opts)
    : h_(h), opts_(opts), psi_(std::move(psi0)) {
    if (h_.rows() != h_.cols()) throw ValidationError("krylov: matrix must be square");
    if (psi_.size() != h_.rows()) throw ValidationError("krylov: state dimension mismatch");
    opts_.subspace_dim = std::min<int>(opts_.subspace_dim, static_cast<int>(h_.rows()));

    // Centering the real diagonal halves the spectral spread the subspace has
    // to resolve; a real shift only contributes a global phase.
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (Eigen::Index k = 0; k < h_.rows(); ++k) {
        const double d = h_.coeff(k, k).real();
        lo = first ? d : std::min(lo, d);
        hi = first ? d : std::max(hi, d);
        first = false;
    }
    shift_ = (lo + hi) / 2.0;

    const double scale = inf_norm(h_) - std::abs(shift_);
    next_dt_hint_ =
        scale > 0.0 ? static_cast<double>(opts_.subspace_dim) / (2.0 * scale) : 1.0;
}

void KrylovStepper::build_arnoldi() {
    const auto dim = psi_.size();
    const int m = opts_.subspace_dim;
    basis_.resize(dim, m + 1);
    hess_ = Eigen::MatrixXcd::Zero(m + 1, m);

    beta_ = psi_.norm();
    if (beta_ == 0.0) {
        m_used_ = 0;
        breakdown_ = true;
        return;
    }
    basis_.col(0) = psi_ / beta_;
    breakdown_ = false;
    m_used_ = m;

    const double breakdown_tol = 1e-14;
    for (int k = 0; k < m; ++k) {
        Eigen::VectorXcd w = h_ * basis_.col(k);
        w -= cplx(shift_, 0.0) * basis_.col(k);
        // Modified Gram-Schmidt with one reorthogonalization pass.
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j <= k; ++j) {
                const cplx proj = basis_.col(j).dot(w);
                if (pass == 0) {
                    hess_(j, k) = proj;
                } else {
                    hess_(j, k) += proj;
                }
                w -= proj * basis_.col(j);
            }
        }
        const double nw = w.norm();
        hess_(k + 1, k) = nw;
        if (nw < breakdown_tol * std::max(1.0, std::abs(hess_(k, k)))) {
            m_used_ = k + 1;
            breakdown_ = true;
            return;
        }
        basis_.col(k + 1) = w / nw;
    }
}

void KrylovStepper::build_small_eig() {
    small_eig_valid_ = false;
    const Eigen::MatrixXcd hm = hess_.topLeftCorner(m_used_, m_used_);
    try {
        DenseEig eig = eig_nonhermitian(hm);
        small_values_ = std::move(eig.values);
        small_vectors_ = std::move(eig.vectors);
        Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(m_used_);
        e1(0) = 1.0;
        small_weights_ = small_vectors_.partialPivLu().solve(e1);
    } catch (const NumericalError&) {
        return;
    }
    // Accept the eigenbasis only when it reproduces the robust exponential.
    const Eigen::VectorXcd via_eig = small_exp_eig(last_dt_);
    const Eigen::VectorXcd via_pade = small_exp_pade(last_dt_);
    if ((via_eig - via_pade).norm() <= 1e-11 * std::max(1.0, via_pade.norm())) {
        small_eig_valid_ = true;
    }
}

Eigen::VectorXcd KrylovStepper::small_exp_pade(double tau) const {
    const Eigen::MatrixXcd a = cplx(0.0, -tau) * hess_.topLeftCorner(m_used_, m_used_);
    const Eigen::MatrixXcd e = a.exp();
    return e.col(0);
}

Eigen::VectorXcd KrylovStepper::small_exp_eig(double tau) const {
    Eigen::VectorXcd coeffs(m_used_);
    for (int k = 0; k < m_used_; ++k) {
        coeffs(k) = small_weights_(k) * std::exp(cplx(0.0, -tau) * small_values_(k));
    }
    return small_vectors_ * coeffs;
}

Eigen::VectorXcd KrylovStepper::small_exp_e1(double tau) const {
    if (small_eig_valid_) return small_exp_eig(tau);
    return small_exp_pade(tau);
}

KrylovStepper::StepInfo KrylovStepper::step(double dt_request) {
    if (!(dt_request > 0.0)) throw ValidationError("krylov: step request must be positive");
    build_arnoldi();

    StepInfo info;
    double dt = std::min(dt_request, next_dt_hint_);
    if (beta_ == 0.0) { // nothing left to evolve
        last_dt_ = dt;
        t_ += dt;
        ++steps_;
        info.dt = dt;
        info.breakdown = true;
        return info;
    }

    double err = 0.0;
    Eigen::VectorXcd u;
    for (;;) {
        u = small_exp_pade(dt);
        if (breakdown_) {
            // Invariant subspace: the small exponential is exact at this dt.
            err = 0.0;
            break;
        }
        err = beta_ * std::abs(hess_(m_used_, m_used_ - 1)) * std::abs(u(m_used_ - 1)) * dt;
        if (err <= opts_.tol * std::max(beta_, dt * beta_)) break;
        dt *= 0.5;
        if (dt < opts_.min_step) {
            std::ostringstream msg;
            msg << "krylov step stalled at t = " << t_ << " ps (dt = " << dt
                << ", err = " << err << ", m = " << m_used_ << ")";
            throw NumericalError(msg.str());
        }
    }

    const cplx phase = std::exp(cplx(0.0, -shift_ * dt));
    psi_ = (beta_ * phase) * (basis_.leftCols(m_used_) * u);
    t_ += dt;
    last_dt_ = dt;
    ++steps_;
    if (steps_ > opts_.max_steps) {
        std::ostringstream msg;
        msg << "krylov exceeded " << opts_.max_steps << " steps at t = " << t_ << " ps";
        throw NumericalError(msg.str());
    }

    // Grow the hint cautiously when the estimate has slack.
    if (!breakdown_) {
        if (err < 0.1 * opts_.tol * std::max(beta_, dt * beta_)) {
            next_dt_hint_ = dt * 1.5;
        } else {
            next_dt_hint_ = dt;
        }
    }

    build_small_eig(); // cheap within-step sampling for the quadrature

    info.dt = dt;
    info.m_used = m_used_;
    info.err_est = err;
    info.breakdown = breakdown_;
    return info;
}

double KrylovStepper::norm2_within_last(double tau) const {
    if (beta_ == 0.0) return 0.0;
    const double n = beta_ * small_exp_e1(tau).norm();
    return n * n;
}

Eigen::VectorXcd KrylovStepper::state_within_last(double tau) const {
    if (beta_ == 0.0) return Eigen::VectorXcd::Zero(psi_.size());
    const cplx phase = std::exp(cplx(0.0, -shift_ * tau));
    return (beta_ * phase) * (basis_.leftCols(m_used_) * small_exp_e1(tau));
}

std::vector<Eigen::VectorXcd> propagate_krylov(
    const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& h, const Eigen::VectorXcd& psi0,
    std::span<const double> times, const KrylovOptions& opts) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1])) {
            throw ValidationError("propagate: times must be non-negative and increasing");
        }
    }
    std::vector<Eigen::VectorXcd> out;
    out.reserve(times.size());
    KrylovStepper stepper(h, psi0, opts);
    for (double target : times) {
        while (stepper.time() < target * (1.0 - 1e-15) &&
               target - stepper.time() > 1e-300) {
            stepper.step(target - stepper.time());
        }
        out.push_back(stepper.state());
    }
    return out;
}

} // namespace qnet
