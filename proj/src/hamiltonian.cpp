#include "qnet/hamiltonian.hpp"

#include <ostream>
#include <vector>

namespace qnet {

namespace {

using Triplet = Eigen::Triplet<cplx>;

SparseMatrixC from_triplets(std::size_t dim, const std::vector<Triplet>& triplets) {
    SparseMatrixC m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

void check_freqs(const std::vector<double>& freqs, int n_sites, const char* label) {
    if (static_cast<int>(freqs.size()) != n_sites) {
        throw ValidationError(std::string(label) + ": need one frequency per site");
    }
    for (double w : freqs) {
        if (w <= 0.0) throw ValidationError(std::string(label) + ": frequencies must be positive");
    }
}

} // namespace

SparseMatrixC build_system(const BasisIndex& basis, const Eigen::MatrixXd& coupling) {
    const int n = basis.n_sites();
    if (coupling.rows() != n || coupling.cols() != n) {
        throw ValidationError("build_system: coupling matrix size mismatch");
    }
    const std::size_t pd = basis.phonon_dim();
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * (n - 1) * pd);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double v = coupling(i, j);
            if (v == 0.0) continue;
            for (std::size_t p = 0; p < pd; ++p) {
                triplets.emplace_back(static_cast<Eigen::Index>(i * pd + p),
                                      static_cast<Eigen::Index>(j * pd + p), cplx(v, 0.0));
            }
        }
    }
    return from_triplets(basis.dim(), triplets);
}

SparseMatrixC build_bath(const BasisIndex& basis, const PhononSpec& spec) {
    const std::size_t pd = basis.phonon_dim();
    std::vector<double> mode_freq(basis.n_modes());
    for (int m = 0; m < basis.n_modes(); ++m) {
        const Mode& mode = basis.modes()[m];
        const auto& freqs =
            (mode.kind == ModeKind::Holstein) ? spec.holstein_freqs : spec.peierls_freqs;
        check_freqs(freqs, basis.n_sites(),
                    mode.kind == ModeKind::Holstein ? "bath (holstein)" : "bath (peierls)");
        mode_freq[m] = freqs[mode.site];
    }

    // Phonon energy depends only on the occupation part of the index.
    std::vector<double> energy(pd, 0.0);
    std::vector<int> occ(basis.n_modes());
    for (std::size_t p = 0; p < pd; ++p) {
        basis.occupations_of(p, occ); // index < phonon_dim encodes site 0
        double e = 0.0;
        for (int m = 0; m < basis.n_modes(); ++m) e += mode_freq[m] * occ[m];
        energy[p] = e;
    }

    std::vector<Triplet> triplets;
    triplets.reserve(basis.dim());
    for (int i = 0; i < basis.n_sites(); ++i) {
        for (std::size_t p = 0; p < pd; ++p) {
            if (energy[p] == 0.0) continue;
            const auto idx = static_cast<Eigen::Index>(i * pd + p);
            triplets.emplace_back(idx, idx, cplx(energy[p], 0.0));
        }
    }
    return from_triplets(basis.dim(), triplets);
}

SparseMatrixC build_holstein(const BasisIndex& basis, const PhononSpec& spec) {
    const std::size_t pd = basis.phonon_dim();
    const int n_states = basis.n_phonon_states();
    std::vector<Triplet> triplets;
    if (spec.g_holstein != 0.0) {
        std::vector<int> occ(basis.n_modes());
        for (int i = 0; i < basis.n_sites(); ++i) {
            const int m = basis.mode_position(ModeKind::Holstein, i);
            if (m < 0) throw ValidationError("build_holstein: no Holstein mode on site");
            const std::size_t stride = basis.stride(m);
            for (std::size_t p = 0; p < pd; ++p) {
                basis.occupations_of(p, occ);
                const int n = occ[m];
                // Raising entry and its Hermitian mirror, one rung at a time.
                if (n + 1 < n_states) {
                    const double amp = spec.g_holstein * displacement_element(n, n + 1, n_states);
                    const auto row = static_cast<Eigen::Index>(i * pd + p + stride);
                    const auto col = static_cast<Eigen::Index>(i * pd + p);
                    triplets.emplace_back(row, col, cplx(amp, 0.0));
                    triplets.emplace_back(col, row, cplx(amp, 0.0));
                }
            }
        }
    }
    return from_triplets(basis.dim(), triplets);
}

SparseMatrixC build_peierls(const BasisIndex& basis, const PhononSpec& spec,
                            const NetworkConfig& config) {
    const std::size_t pd = basis.phonon_dim();
    const int n_states = basis.n_phonon_states();
    const int n = basis.n_sites();
    if (config.n_sites != n) throw ValidationError("build_peierls: site count mismatch");

    std::vector<Triplet> triplets;
    if (spec.alpha != 0.0) {
        std::vector<int> occ(basis.n_modes());
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double r = (config.positions[i] - config.positions[j]).norm();
                if (r <= 0.0) throw ValidationError("build_peierls: coincident sites");
                const double g_p = spec.alpha / (r * r * r);
                const int mi = basis.mode_position(ModeKind::Peierls, i);
                const int mj = basis.mode_position(ModeKind::Peierls, j);
                if (mi < 0 || mj < 0) {
                    throw ValidationError("build_peierls: no Peierls mode on site");
                }
                // Hop between sites i and j with a one-quantum change in the
                // relative displacement (b_i^dag + b_i - b_j^dag - b_j).
                auto emit = [&](int mode_pos, double sign) {
                    const std::size_t stride = basis.stride(mode_pos);
                    for (std::size_t p = 0; p < pd; ++p) {
                        basis.occupations_of(p, occ);
                        const int nq = occ[mode_pos];
                        if (nq + 1 >= n_states) continue;
                        const double amp =
                            sign * g_p * displacement_element(nq, nq + 1, n_states);
                        const auto raised = p + stride;
                        // (site j, occ) -> (site i, occ+1) and the three images
                        // required for a Hermitian, site-symmetric pair term.
                        const auto a = static_cast<Eigen::Index>(i * pd + raised);
                        const auto b = static_cast<Eigen::Index>(j * pd + p);
                        const auto c = static_cast<Eigen::Index>(j * pd + raised);
                        const auto d = static_cast<Eigen::Index>(i * pd + p);
                        triplets.emplace_back(a, b, cplx(amp, 0.0));
                        triplets.emplace_back(b, a, cplx(amp, 0.0));
                        triplets.emplace_back(c, d, cplx(amp, 0.0));
                        triplets.emplace_back(d, c, cplx(amp, 0.0));
                    }
                };
                emit(mi, +1.0);
                emit(mj, -1.0);
            }
        }
    }
    return from_triplets(basis.dim(), triplets);
}

AssembledHamiltonian add_sink(AssembledHamiltonian h, double gamma) {
    if (gamma < 0.0) throw ValidationError("add_sink: sink rate must be non-negative");
    if (gamma > 0.0) {
        const std::size_t pd = h.basis->phonon_dim();
        const int out = h.basis->n_sites() - 1;
        SparseMatrixC sink(static_cast<Eigen::Index>(h.dim), static_cast<Eigen::Index>(h.dim));
        std::vector<Triplet> triplets;
        triplets.reserve(pd);
        for (std::size_t p = 0; p < pd; ++p) {
            const auto idx = static_cast<Eigen::Index>(out * pd + p);
            triplets.emplace_back(idx, idx, cplx(0.0, -gamma / 2.0));
        }
        sink.setFromTriplets(triplets.begin(), triplets.end());
        h.matrix += sink;
        h.matrix.makeCompressed();
    }
    h.gamma += gamma;
    return h;
}

AssembledHamiltonian assemble(const NetworkConfig& config, const PhononSpec& spec,
                              PhononKind kind, double gamma, std::size_t dim_cap) {
    auto basis = std::make_shared<BasisIndex>(config.n_sites, active_modes(config.n_sites, kind),
                                              spec.n_phonon_states, dim_cap);
    const Eigen::MatrixXd coupling = coupling_matrix(config);

    AssembledHamiltonian h;
    h.dim = basis->dim();
    h.basis = basis;
    h.kind = kind;
    h.matrix = build_system(*basis, coupling);
    if (basis->n_modes() > 0) {
        h.matrix += build_bath(*basis, spec);
        if (kind == PhononKind::Holstein || kind == PhononKind::Both) {
            h.matrix += build_holstein(*basis, spec);
        }
        if (kind == PhononKind::Peierls || kind == PhononKind::Both) {
            h.matrix += build_peierls(*basis, spec, config);
        }
    }
    h.matrix.makeCompressed();
    return add_sink(std::move(h), gamma);
}

void dump_matrix(const SparseMatrixC& m, std::ostream& os) {
    os << "# row col re im\n";
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(m, k); it; ++it) {
            os << it.row() << " " << it.col() << " " << it.value().real() << " "
               << it.value().imag() << "\n";
        }
    }
}

} // namespace qnet
