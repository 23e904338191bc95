#include "doctest.h"

#include <cmath>
#include <vector>

#include "qnet/hilbert.hpp"

using namespace qnet;

TEST_CASE("basis dimensions are site count times states^modes") {
    CHECK(build_basis(7, PhononKind::Holstein, 3).dim() == 7u * 2187u); // 7 * 3^7 = 15309
    CHECK(build_basis(2, PhononKind::None, 3).dim() == 2u);
    CHECK(build_basis(4, PhononKind::Peierls, 4).dim() == 4u * 256u); // 4 * 4^4 = 1024
    CHECK(build_basis(3, PhononKind::Both, 2).dim() == 3u * 64u);     // 3 * 2^6
}

TEST_CASE("a dimension beyond the cap raises a capacity error") {
    CHECK_THROWS_AS(build_basis(8, PhononKind::Both, 4), CapacityError);
    CHECK_THROWS_AS(build_basis(8, PhononKind::Holstein, 3, 1000), CapacityError);
}

TEST_CASE("index round-trips through (site, occupations)") {
    const auto basis = build_basis(4, PhononKind::Holstein, 3);
    std::vector<int> occ(basis.n_modes());
    for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
        basis.occupations_of(idx, occ);
        CHECK(basis.index(basis.site_of(idx), occ) == idx);
    }
}

TEST_CASE("enumeration is site-major with lexicographic occupations") {
    const auto basis = build_basis(2, PhononKind::Holstein, 2); // modes (H,0), (H,1)
    CHECK(basis.index(0, std::vector<int>{0, 0}) == 0u);
    CHECK(basis.index(0, std::vector<int>{0, 1}) == 1u);
    CHECK(basis.index(0, std::vector<int>{1, 0}) == 2u);
    CHECK(basis.index(1, std::vector<int>{0, 0}) == 4u);
}

TEST_CASE("mode positions order holstein before peierls") {
    const auto basis = build_basis(3, PhononKind::Both, 2);
    CHECK(basis.mode_position(ModeKind::Holstein, 0) == 0);
    CHECK(basis.mode_position(ModeKind::Holstein, 2) == 2);
    CHECK(basis.mode_position(ModeKind::Peierls, 0) == 3);
    CHECK(basis.mode_position(ModeKind::Peierls, 2) == 5);
    CHECK(build_basis(3, PhononKind::Holstein, 2).mode_position(ModeKind::Peierls, 0) == -1);
}

TEST_CASE("displacement elements carry the ladder square roots") {
    CHECK(displacement_element(0, 1, 3) == doctest::Approx(1.0));
    CHECK(displacement_element(1, 2, 3) == doctest::Approx(std::sqrt(2.0)));
    CHECK(displacement_element(0, 0, 3) == 0.0);
    CHECK(displacement_element(0, 2, 3) == 0.0);
    CHECK(displacement_element(2, 3, 3) == 0.0); // truncated away
    CHECK(displacement_element(2, 1, 3) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("displacement matrix on one mode is symmetric tridiagonal") {
    const int n_max = 5;
    Eigen::MatrixXd d(n_max, n_max);
    for (int a = 0; a < n_max; ++a) {
        for (int b = 0; b < n_max; ++b) d(a, b) = displacement_element(b, a, n_max);
    }
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int a = 0; a < n_max; ++a) {
        for (int b = 0; b < n_max; ++b) {
            if (std::abs(a - b) != 1) CHECK(d(a, b) == 0.0);
        }
    }
}
