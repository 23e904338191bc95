// dynamics.hpp — State propagation, populations, and the transfer-time functional
//
// The transfer time is the integral of the surviving norm,
//   TT = int_0^inf |psi(t)|^2 dt,
// finite only when the sink drains every eigenmode. Two evaluators are
// provided and cross-validated: an analytic double sum over the dense
// eigendecomposition, and adaptive quadrature on the norm decay driven by the
// Krylov stepper.

#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qnet/hamiltonian.hpp"
#include "qnet/krylov.hpp"

namespace qnet {

struct EvolverOptions {
    int dense_threshold = 4096;  // dims up to this use the eigendecomposition path
    int krylov_dim = 40;
    double krylov_tol = 1e-10;   // local error per Krylov step
    double quad_rel_tol = 1e-8;  // per-segment refinement target of the norm integral
    double tail_rel_tol = 1e-6;  // stop when the tail bound drops below this fraction
    double dark_tol = 1e-8;      // |Im eigenvalue| below this flags a divergent mode
    double t_max = 1.0e5;        // ps; quadrature beyond this declares divergence
    long max_steps = 2000000;
    // Quadrature stops early once the integral reaches this value (used by the
    // optimizer, which clips large objectives at a sentinel anyway).
    double accum_cap = std::numeric_limits<double>::infinity();

    KrylovOptions krylov() const {
        return KrylovOptions{krylov_dim, krylov_tol, 1e-13, max_steps};
    }
};

// Unit amplitude on (input site, all modes in the vacuum).
Eigen::VectorXcd initial_state(const BasisIndex& basis);

// exp(-i H t) |psi0> at each requested time; routes by dimension.
std::vector<Eigen::VectorXcd> propagate(const AssembledHamiltonian& h,
                                        const Eigen::VectorXcd& psi0,
                                        std::span<const double> times,
                                        const EvolverOptions& opts = {});

// Dense eigendecomposition path, available at any dimension (used as an oracle
// against the Krylov path in tests).
std::vector<Eigen::VectorXcd> propagate_dense(const AssembledHamiltonian& h,
                                              const Eigen::VectorXcd& psi0,
                                              std::span<const double> times);

// Per-site populations: the phonon trace of |psi><psi| restricted to each site.
Eigen::VectorXd site_populations(const Eigen::VectorXcd& psi, const BasisIndex& basis);

// 1 - |psi|^2: the population absorbed by the sink so far.
double sink_population(const Eigen::VectorXcd& psi);

struct PopulationTrace {
    std::vector<double> times_ps;
    double benchmark_T = 0.0;          // ps, for the time_over_T column
    Eigen::MatrixXd site_pops;         // n_times x n_sites
    std::vector<double> sink;          // n_times
};

PopulationTrace population_trace(const AssembledHamiltonian& h, const Eigen::VectorXcd& psi0,
                                 std::span<const double> times, double benchmark_T,
                                 const EvolverOptions& opts = {});

// Columns: time_ps, time_over_T, p_site_1..p_site_N, p_sink.
void write_trace_csv(const PopulationTrace& trace, std::ostream& os);

struct TransferTime {
    double t_ps = 0.0;
    bool divergent = false;   // a mode survives the sink; t_ps is meaningless
    std::string method;       // "analytic-eig" or "krylov-quadrature"
};

// Routed evaluator: analytic below the dense threshold, quadrature above.
TransferTime transfer_time(const AssembledHamiltonian& h, const Eigen::VectorXcd& psi0,
                           const EvolverOptions& opts = {});

TransferTime transfer_time_analytic(const AssembledHamiltonian& h,
                                    const Eigen::VectorXcd& psi0,
                                    const EvolverOptions& opts = {});

TransferTime transfer_time_quadrature(const AssembledHamiltonian& h,
                                      const Eigen::VectorXcd& psi0,
                                      const EvolverOptions& opts = {});

} // namespace qnet
