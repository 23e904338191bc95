// hilbert.hpp — Single-excitation x truncated-Fock basis enumeration
//
// A basis state is (site, occupations): the excitation location plus one
// occupation number per active phonon mode. Indexing is site-major with
// occupations in lexicographic order (mode 0 most significant), so the
// partial trace over phonons is a contiguous strided reduction.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qnet/common.hpp"
#include "qnet/geometry.hpp"

namespace qnet {

enum class ModeKind { Holstein, Peierls };

struct Mode {
    ModeKind kind;
    int site;
    bool operator==(const Mode&) const = default;
};

class BasisIndex {
public:
    // Default cap keeps a Krylov workspace (~40 basis vectors) under a gigabyte.
    static constexpr std::size_t kDefaultDimCap = 300000;

    BasisIndex(int n_sites, std::vector<Mode> modes, int n_phonon_states,
               std::size_t dim_cap = kDefaultDimCap);

    int n_sites() const { return n_sites_; }
    int n_phonon_states() const { return n_states_; }
    const std::vector<Mode>& modes() const { return modes_; }
    int n_modes() const { return static_cast<int>(modes_.size()); }

    std::size_t phonon_dim() const { return phonon_dim_; } // n_phonon_states^n_modes
    std::size_t dim() const { return dim_; }               // n_sites * phonon_dim

    std::size_t index(int site, std::span<const int> occupations) const;
    int site_of(std::size_t idx) const { return static_cast<int>(idx / phonon_dim_); }
    std::size_t phonon_index_of(std::size_t idx) const { return idx % phonon_dim_; }
    void occupations_of(std::size_t idx, std::span<int> out) const;

    // Position of the mode (kind, site) in the occupation vector, or -1.
    int mode_position(ModeKind kind, int site) const;

    // Stride of mode m in the phonon index: occupying mode m by +1 shifts the
    // index by stride(m).
    std::size_t stride(int mode_pos) const { return strides_[mode_pos]; }

private:
    int n_sites_;
    std::vector<Mode> modes_;
    int n_states_;
    std::size_t phonon_dim_;
    std::size_t dim_;
    std::vector<std::size_t> strides_;
};

// Modes for the requested phonon kinds: Holstein modes for sites 0..N-1, then
// Peierls modes for sites 0..N-1. PhononKind::None yields an empty mode list.
std::vector<Mode> active_modes(int n_sites, PhononKind kind);

BasisIndex build_basis(int n_sites, PhononKind kind, int n_phonon_states,
                       std::size_t dim_cap = BasisIndex::kDefaultDimCap);

// <n_to|(b^dag + b)|n_from> within a truncation of n_max states:
// sqrt(max(n_from, n_to)) when the occupations differ by one and both lie
// below n_max, zero otherwise.
double displacement_element(int n_from, int n_to, int n_max);

} // namespace qnet
