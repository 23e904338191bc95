// hamiltonian.hpp — Sparse assembly of the excitation-phonon Hamiltonian with an
// absorbing output site
//
// H = H_system + H_bath + H_coupling - i (Gamma/2) P_out, in units of 1/ps.
// All Hermitian pieces are generated as symmetric element pairs, so with
// Gamma = 0 the assembled matrix is Hermitian exactly; the anti-Hermitian part
// is the output-site projector alone.

#pragma once

#include <Eigen/Sparse>

#include <iosfwd>
#include <memory>

#include "qnet/common.hpp"
#include "qnet/geometry.hpp"
#include "qnet/hilbert.hpp"

namespace qnet {

using SparseMatrixC = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

struct AssembledHamiltonian {
    std::size_t dim = 0;
    SparseMatrixC matrix;                     // 1/ps
    std::shared_ptr<const BasisIndex> basis;
    double gamma = 0.0;                       // sink rate, 1/ps
    PhononKind kind = PhononKind::None;

    bool has_sink() const { return gamma > 0.0; }
};

// Hopping term: <i, occ| H |j, occ> = v(i, j) for i != j, diagonal zero.
SparseMatrixC build_system(const BasisIndex& basis, const Eigen::MatrixXd& coupling);

// Phonon energies: diagonal sum of omega_mode * n_mode.
SparseMatrixC build_bath(const BasisIndex& basis, const PhononSpec& spec);

// Site-local coupling g_H * n_exc(i) * (b_i^dag + b_i) on the Holstein mode of
// the excited site.
SparseMatrixC build_holstein(const BasisIndex& basis, const PhononSpec& spec);

// Pair coupling g_P(i,j) * (hop i<->j) * (relative displacement of Peierls
// modes i and j), g_P(i,j) = alpha / r_ij^3, every pair included.
SparseMatrixC build_peierls(const BasisIndex& basis, const PhononSpec& spec,
                            const NetworkConfig& config);

// Subtracts i*Gamma/2 from every diagonal entry whose excitation sits on the
// output site. Gamma must be non-negative.
AssembledHamiltonian add_sink(AssembledHamiltonian h, double gamma);

// Full assembly for the given phonon kind (frequency lists in `spec` must cover
// the active kinds). Gamma = 0 yields the Hermitian closed-network matrix.
AssembledHamiltonian assemble(const NetworkConfig& config, const PhononSpec& spec,
                              PhononKind kind, double gamma,
                              std::size_t dim_cap = BasisIndex::kDefaultDimCap);

// Coordinate-triplet dump (row col re im), row-major order, for debugging.
void dump_matrix(const SparseMatrixC& m, std::ostream& os);

} // namespace qnet
