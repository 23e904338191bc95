// krylov.hpp — Arnoldi short-time stepping for exp(-i H t) on sparse matrices
//
// Each step builds an orthonormal Krylov basis V_m at the current state and
// advances by a step size adapted to a local error estimate. Within the last
// committed step the state is available at any intermediate offset from the
// small-matrix exponential, which makes dense-in-time sampling of the norm
// cheap (used by the transfer-time quadrature).

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <span>
#include <vector>

#include "qnet/common.hpp"

namespace qnet {

struct KrylovOptions {
    int subspace_dim = 40;      // m
    double tol = 1e-10;         // local error target per step (state-norm scale)
    double min_step = 1e-13;    // ps; below this the step is declared stuck
    long max_steps = 2000000;   // guard against non-decaying integrands
};

class KrylovStepper {
public:
    KrylovStepper(const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& h, Eigen::VectorXcd psi0,
                  KrylovOptions opts = {});

    double time() const { return t_; }
    const Eigen::VectorXcd& state() const { return psi_; }
    long steps_taken() const { return steps_; }

    struct StepInfo {
        double dt = 0.0;      // step actually taken
        int m_used = 0;       // Krylov dimension used
        double err_est = 0.0; // local error estimate
        bool breakdown = false;
    };

    // Advance by at most dt_request (> 0). Commits the new state and returns
    // the step taken; the factorization stays available for within-step
    // evaluation until the next call.
    StepInfo step(double dt_request);

    // State norm squared at offset tau in [0, dt of the last committed step],
    // measured from the state before that step.
    double norm2_within_last(double tau) const;

    // Full state at an intermediate offset of the last committed step.
    Eigen::VectorXcd state_within_last(double tau) const;

private:
    void build_arnoldi();
    void build_small_eig();
    Eigen::VectorXcd small_exp_e1(double tau) const;   // exp(-i tau H_m) e_1
    Eigen::VectorXcd small_exp_pade(double tau) const; // robust path
    Eigen::VectorXcd small_exp_eig(double tau) const;  // fast path, validated

    const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& h_;
    KrylovOptions opts_;
    Eigen::VectorXcd psi_;
    double t_ = 0.0;
    long steps_ = 0;
    double shift_ = 0.0; // real diagonal centering; contributes a phase only

    // Arnoldi factorization at the state before the last committed step.
    Eigen::MatrixXcd basis_;   // dim x (m+1)
    Eigen::MatrixXcd hess_;    // (m+1) x m
    double beta_ = 0.0;        // norm of the state the factorization was built at
    int m_used_ = 0;
    bool breakdown_ = false;
    double last_dt_ = 0.0;
    double next_dt_hint_ = 0.0;

    // Eigendecomposition of the small matrix for cheap within-step sampling.
    bool small_eig_valid_ = false;
    Eigen::VectorXcd small_values_;
    Eigen::MatrixXcd small_vectors_;
    Eigen::VectorXcd small_weights_;
};

// Propagate to each requested time (non-negative, strictly increasing).
std::vector<Eigen::VectorXcd> propagate_krylov(
    const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& h, const Eigen::VectorXcd& psi0,
    std::span<const double> times, const KrylovOptions& opts = {});

} // namespace qnet
