#include "qnet/hilbert.hpp"

#include <cmath>
#include <sstream>

namespace qnet {

BasisIndex::BasisIndex(int n_sites, std::vector<Mode> modes, int n_phonon_states,
                       std::size_t dim_cap)
    : n_sites_(n_sites), modes_(std::move(modes)), n_states_(n_phonon_states) {
    if (n_sites_ < 2) throw ValidationError("basis: need at least 2 sites");
    if (n_states_ < 1) throw ValidationError("basis: need at least 1 phonon state per mode");
    for (const Mode& m : modes_) {
        if (m.site < 0 || m.site >= n_sites_) {
            throw ValidationError("basis: mode attached to a site outside the network");
        }
    }

    // Overflow-checked phonon_dim = n_states^n_modes.
    phonon_dim_ = 1;
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        if (phonon_dim_ > dim_cap) break;
        phonon_dim_ *= static_cast<std::size_t>(n_states_);
    }
    dim_ = static_cast<std::size_t>(n_sites_) * phonon_dim_;
    if (dim_ > dim_cap) {
        std::ostringstream msg;
        msg << "basis dimension " << n_sites_ << " * " << n_states_ << "^" << modes_.size()
            << " = " << dim_ << " exceeds the cap of " << dim_cap;
        throw CapacityError(msg.str());
    }

    strides_.resize(modes_.size());
    std::size_t s = 1;
    for (int m = static_cast<int>(modes_.size()) - 1; m >= 0; --m) {
        strides_[m] = s;
        s *= static_cast<std::size_t>(n_states_);
    }
}

std::size_t BasisIndex::index(int site, std::span<const int> occupations) const {
    if (site < 0 || site >= n_sites_) throw ValidationError("basis index: site out of range");
    if (occupations.size() != modes_.size()) {
        throw ValidationError("basis index: occupation vector length mismatch");
    }
    std::size_t phonon = 0;
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        const int n = occupations[m];
        if (n < 0 || n >= n_states_) {
            throw ValidationError("basis index: occupation outside truncation");
        }
        phonon += static_cast<std::size_t>(n) * strides_[m];
    }
    return static_cast<std::size_t>(site) * phonon_dim_ + phonon;
}

void BasisIndex::occupations_of(std::size_t idx, std::span<int> out) const {
    if (out.size() != modes_.size()) {
        throw ValidationError("basis index: occupation vector length mismatch");
    }
    std::size_t phonon = phonon_index_of(idx);
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        out[m] = static_cast<int>(phonon / strides_[m]);
        phonon %= strides_[m];
    }
}

int BasisIndex::mode_position(ModeKind kind, int site) const {
    for (std::size_t m = 0; m < modes_.size(); ++m) {
        if (modes_[m].kind == kind && modes_[m].site == site) return static_cast<int>(m);
    }
    return -1;
}

std::vector<Mode> active_modes(int n_sites, PhononKind kind) {
    std::vector<Mode> modes;
    if (kind == PhononKind::Holstein || kind == PhononKind::Both) {
        for (int i = 0; i < n_sites; ++i) modes.push_back({ModeKind::Holstein, i});
    }
    if (kind == PhononKind::Peierls || kind == PhononKind::Both) {
        for (int i = 0; i < n_sites; ++i) modes.push_back({ModeKind::Peierls, i});
    }
    return modes;
}

BasisIndex build_basis(int n_sites, PhononKind kind, int n_phonon_states, std::size_t dim_cap) {
    return BasisIndex(n_sites, active_modes(n_sites, kind), n_phonon_states, dim_cap);
}

double displacement_element(int n_from, int n_to, int n_max) {
    if (n_from < 0 || n_to < 0 || n_from >= n_max || n_to >= n_max) return 0.0;
    if (n_to == n_from + 1) return std::sqrt(static_cast<double>(n_to));
    if (n_to == n_from - 1) return std::sqrt(static_cast<double>(n_from));
    return 0.0;
}

} // namespace qnet
