// geometry.hpp — Qubit network layouts, dipolar couplings, and constrained sampling
//
// Conventions: hbar = 1; lengths in angstrom, energies/frequencies in 1/ps,
// times in ps. Site 0 is the input, site N-1 the output; they sit at
// (-D/2, 0, 0) and (+D/2, 0, 0) on opposite faces of a cube of edge D.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "qnet/common.hpp"

namespace qnet {

using Vec3 = Eigen::Vector3d;

struct NetworkConfig {
    int n_sites = 2;
    double cube_edge = 200.0;         // D, angstrom
    std::vector<Vec3> positions;      // size n_sites; [0] input, [n_sites-1] output
    double min_separation = 5.0;      // r_min, angstrom; applies to every pair
    double dipole_constant = 1.0e6;   // c, hbar angstrom^3 / ps

    Vec3 input_position() const { return Vec3(-cube_edge / 2.0, 0.0, 0.0); }
    Vec3 output_position() const { return Vec3(+cube_edge / 2.0, 0.0, 0.0); }
};

// Endpoints only (N=2) or endpoints plus explicitly placed intermediates.
NetworkConfig make_config(double cube_edge, const std::vector<Vec3>& intermediates,
                          double min_separation = 5.0, double dipole_constant = 1.0e6);

struct Violation {
    enum class Kind { SiteCount, EndpointMoved, OutOfBox, TooClose };
    Kind kind;
    int i = -1;         // site index (first site for pair violations)
    int j = -1;         // second site for pair violations
    double value = 0.0; // offending coordinate or distance
    std::string message;
};

// Reports every constraint violation; never throws.
std::vector<Violation> validate(const NetworkConfig& config);

// True when validate() returns nothing.
bool is_valid(const NetworkConfig& config);

// Symmetric hopping matrix v[i][j] = c / r_ij^3, zero diagonal.
// Throws ValidationError when two sites coincide.
Eigen::MatrixXd coupling_matrix(const NetworkConfig& config);

// Half Rabi period of the bare input-output pair: T = pi / (2 c / D^3).
double benchmark_time(const NetworkConfig& config);

enum class PhononKind { None, Holstein, Peierls, Both };

PhononKind phonon_kind_from_string(const std::string& name);
std::string to_string(PhononKind kind);

struct PhononSpec {
    std::vector<double> holstein_freqs; // 1/ps, one per site when Holstein modes are active
    std::vector<double> peierls_freqs;  // 1/ps, one per site when Peierls modes are active
    double g_holstein = 1.45;           // hbar / ps
    double alpha = 15.0;                // hbar angstrom^3 / ps; g_P(i,j) = alpha / r_ij^3
    int n_phonon_states = 3;            // Fock truncation per mode
};

// Dimensionless per-site coupling diagnostics:
//   Holstein: lambda_i = 2 g_H^2 / (omega_i V_max)
//   Peierls:  lambda_i = (1/(N-1)) sum_{j != i} 2 alpha^2 / (omega_i r_ij^6 V_max)
// with V_max the largest off-diagonal hopping amplitude. Diagnostic only.
std::vector<double> effective_lambdas(const NetworkConfig& config, const PhononSpec& spec,
                                      PhononKind kind);

// Rejection-samples intermediate positions uniformly in the cube subject to the
// pairwise minimum-separation constraint. Deterministic for a given seed.
// Throws ValidationError when max_attempts per site is exhausted.
NetworkConfig sample_config(std::uint64_t seed, int n_sites, double cube_edge,
                            double min_separation = 5.0, double dipole_constant = 1.0e6,
                            int max_attempts = 10000);

// Largest perpendicular distance of any intermediate site from the input-output
// axis, as a fraction of the cube edge. Zero for N=2.
double linearity_diagnostic(const NetworkConfig& config);

} // namespace qnet
