#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "qnet/dynamics.hpp"
#include "qnet/krylov.hpp"

using namespace qnet;

namespace {

AssembledHamiltonian two_site(double gamma) {
    PhononSpec spec;
    spec.n_phonon_states = 1;
    return assemble(make_config(200.0, {}), spec, PhononKind::None, gamma);
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
    return out;
}

PhononSpec random_freq_spec(int n, std::uint64_t seed, PhononKind kind, int n_states) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> omega(1.25, 125.0);
    PhononSpec spec;
    spec.n_phonon_states = n_states;
    if (kind == PhononKind::Holstein || kind == PhononKind::Both) {
        for (int i = 0; i < n; ++i) spec.holstein_freqs.push_back(omega(rng));
    }
    if (kind == PhononKind::Peierls || kind == PhononKind::Both) {
        for (int i = 0; i < n; ++i) spec.peierls_freqs.push_back(omega(rng));
    }
    return spec;
}

constexpr double kV = 0.125; // two-site hopping at D = 200 A, c = 1e6

} // namespace

TEST_CASE("closed two-site network shows the exact Rabi oscillation") {
    const auto h = two_site(0.0);
    const auto psi0 = initial_state(*h.basis);
    const auto times = linspace(0.0, 8.0 * kPi, 57);
    const auto states = propagate(h, psi0, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double p_out = std::norm(states[k](1));
        const double expected = std::pow(std::sin(kV * times[k]), 2);
        CHECK(std::abs(p_out - expected) < 1e-10);
        CHECK(std::abs(states[k].squaredNorm() - 1.0) < 1e-10); // unitary when closed
    }
    // first output maximum at the benchmark time T = 4*pi
    const auto peak = propagate(h, psi0, std::vector<double>{4.0 * kPi});
    CHECK(std::norm(peak[0](1)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("propagation at t = 0 is the identity") {
    const auto h = two_site(0.7);
    const auto psi0 = initial_state(*h.basis);
    const auto states = propagate(h, psi0, std::vector<double>{0.0});
    CHECK((states[0] - psi0).norm() < 1e-14);
}

TEST_CASE("propagator satisfies the semigroup property on random states") {
    const auto config = sample_config(5, 3, 200.0);
    const auto spec = random_freq_spec(3, 7, PhononKind::Holstein, 2);
    const auto h = assemble(config, spec, PhononKind::Holstein, 0.9);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 3; ++rep) {
        Eigen::VectorXcd psi(h.dim);
        for (auto& a : psi) a = cplx(g(rng), g(rng));
        psi.normalize();
        const double t1 = 0.37, t2 = 1.21;
        const auto direct = propagate(h, psi, std::vector<double>{t1 + t2})[0];
        const auto first = propagate(h, psi, std::vector<double>{t1})[0];
        const auto chained = propagate(h, first, std::vector<double>{t2})[0];
        CHECK((direct - chained).norm() / direct.norm() < 1e-8);
    }
}

TEST_CASE("site populations trace out phonons and sum to the surviving norm") {
    const auto config = sample_config(11, 3, 200.0);
    const auto spec = random_freq_spec(3, 8, PhononKind::Peierls, 3);
    const auto h = assemble(config, spec, PhononKind::Peierls, 1.5);
    const auto psi0 = initial_state(*h.basis);

    auto pops0 = site_populations(psi0, *h.basis);
    CHECK(pops0(0) == doctest::Approx(1.0));
    CHECK(pops0.sum() == doctest::Approx(1.0));

    const auto states = propagate(h, psi0, linspace(0.1, 3.0, 7));
    for (const auto& psi : states) {
        const auto pops = site_populations(psi, *h.basis);
        CHECK(pops.minCoeff() >= 0.0);
        CHECK(pops.sum() == doctest::Approx(psi.squaredNorm()).epsilon(1e-12));
        CHECK(pops.sum() + sink_population(psi) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("populations ignore per-amplitude phases") {
    const auto h = two_site(0.0);
    Eigen::VectorXcd psi(2);
    psi << cplx(std::sqrt(0.5), 0.0), cplx(0.0, -std::sqrt(0.5));
    const auto pops = site_populations(psi, *h.basis);
    CHECK(pops(0) == doctest::Approx(0.5));
    CHECK(pops(1) == doctest::Approx(0.5));
}

TEST_CASE("norm decay is monotone and the sink population mirrors it") {
    const auto config = sample_config(19, 4, 200.0);
    const auto spec = random_freq_spec(4, 9, PhononKind::Holstein, 2);
    const auto h = assemble(config, spec, PhononKind::Holstein, 2.0);
    const auto psi0 = initial_state(*h.basis);
    const auto times = linspace(0.0, 10.0, 101);
    const auto states = propagate(h, psi0, times);
    double prev = 1.0 + 1e-15;
    for (const auto& psi : states) {
        const double n2 = psi.squaredNorm();
        CHECK(n2 <= prev + 1e-12);
        prev = n2;
    }
    CHECK(sink_population(states.front()) == doctest::Approx(0.0));

    // d p_sink/dt = Gamma * output population (finite-difference check)
    const double t = 2.0, dt = 1e-5;
    const auto s = propagate(h, psi0, std::vector<double>{t - dt, t, t + dt});
    const double dp = (sink_population(s[2]) - sink_population(s[0])) / (2.0 * dt);
    const double p_out = site_populations(s[1], *h.basis)(3);
    CHECK(dp == doctest::Approx(2.0 * p_out).epsilon(1e-5));
}

TEST_CASE("two-site transfer time matches the damped Rabi closed form") {
    // damped two-level model: TT = 2/Gamma + Gamma/(4 V^2)
    for (double gamma : {0.05, 0.35355339, 1.0, 5.0}) {
        const auto h = two_site(gamma);
        const auto psi0 = initial_state(*h.basis);
        const double expected = 2.0 / gamma + gamma / (4.0 * kV * kV);
        const auto analytic = transfer_time_analytic(h, psi0);
        CHECK_FALSE(analytic.divergent);
        CHECK(analytic.t_ps == doctest::Approx(expected).epsilon(1e-9));
        const auto quad = transfer_time_quadrature(h, psi0);
        CHECK_FALSE(quad.divergent);
        CHECK(quad.t_ps == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("transfer time is minimal at gamma = 2 sqrt(2) V") {
    const double gamma_star = 2.0 * std::sqrt(2.0) * kV;
    const double t_star = transfer_time(two_site(gamma_star), initial_state(*two_site(0.0).basis)).t_ps;
    CHECK(t_star == doctest::Approx(std::sqrt(2.0) / kV).epsilon(1e-9));
    // (2 sqrt(2) / pi) * T with T = 4 pi
    CHECK(t_star == doctest::Approx((2.0 * std::sqrt(2.0) / kPi) * 4.0 * kPi).epsilon(1e-9));
    for (double factor : {0.7, 1.3}) {
        CHECK(transfer_time(two_site(gamma_star * factor), initial_state(*two_site(0.0).basis)).t_ps >
              t_star);
    }
}

TEST_CASE("a vanishing sink rate makes the transfer time diverge") {
    const auto h = two_site(0.0);
    const auto result = transfer_time(h, initial_state(*h.basis));
    CHECK(result.divergent);
    CHECK(std::isinf(result.t_ps));

    const auto analytic = transfer_time_analytic(h, initial_state(*h.basis));
    CHECK(analytic.divergent);
}

TEST_CASE("analytic and quadrature transfer times agree on random instances") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const int n = 3 + static_cast<int>(seed % 2);
        const auto config = sample_config(100 + seed, n, 200.0);
        const auto kind = (seed % 2 == 0) ? PhononKind::Holstein : PhononKind::Peierls;
        const auto spec = random_freq_spec(n, 200 + seed, kind, 2);
        const auto h = assemble(config, spec, kind, 1.0 + 0.5 * seed);
        const auto psi0 = initial_state(*h.basis);
        const auto analytic = transfer_time_analytic(h, psi0);
        const auto quad = transfer_time_quadrature(h, psi0);
        REQUIRE_FALSE(analytic.divergent);
        REQUIRE_FALSE(quad.divergent);
        CHECK(std::abs(analytic.t_ps - quad.t_ps) / analytic.t_ps < 1e-6);
    }
}

TEST_CASE("dense and krylov propagation agree on states") {
    const auto config = sample_config(42, 4, 200.0);
    const auto spec = random_freq_spec(4, 43, PhononKind::Holstein, 3); // dim 324
    const auto h = assemble(config, spec, PhononKind::Holstein, 1.0);
    const auto psi0 = initial_state(*h.basis);
    const auto times = linspace(0.25, 2.0, 4);
    const auto dense_states = propagate_dense(h, psi0, times);
    const auto krylov_states = propagate_krylov(h.matrix, psi0, times, KrylovOptions{});
    for (std::size_t k = 0; k < times.size(); ++k) {
        CHECK((dense_states[k] - krylov_states[k]).norm() < 1e-8);
    }
}

TEST_CASE("decoupled phonons reproduce the phonon-free transfer time") {
    const auto config = sample_config(77, 4, 200.0);
    PhononSpec bare;
    bare.n_phonon_states = 1;
    const double gamma = 1.2;
    const auto h_free = assemble(config, bare, PhononKind::None, gamma);
    const double t_free = transfer_time(h_free, initial_state(*h_free.basis)).t_ps;

    auto spec = random_freq_spec(4, 5, PhononKind::Both, 2);
    spec.g_holstein = 0.0;
    spec.alpha = 0.0;
    const auto h = assemble(config, spec, PhononKind::Both, gamma); // dim 4 * 2^8
    const double t_coupled = transfer_time(h, initial_state(*h.basis)).t_ps;
    CHECK(std::abs(t_coupled - t_free) / t_free < 1e-10);
}

TEST_CASE("transfer time is invariant under relabeling and axial rotation") {
    const Vec3 a(30, 40, -40), b(-50, 10, 70);
    const double gamma = 1.0;
    PhononSpec bare;
    bare.n_phonon_states = 1;

    const auto h_ab = assemble(make_config(200.0, {a, b}), bare, PhononKind::None, gamma);
    const auto h_ba = assemble(make_config(200.0, {b, a}), bare, PhononKind::None, gamma);
    const double t_ab = transfer_time(h_ab, initial_state(*h_ab.basis)).t_ps;
    const double t_ba = transfer_time(h_ba, initial_state(*h_ba.basis)).t_ps;
    CHECK(t_ab == doctest::Approx(t_ba).epsilon(1e-10));

    const double angle = 1.1;
    const double c = std::cos(angle), s = std::sin(angle);
    auto rot = [&](const Vec3& p) { return Vec3(p.x(), c * p.y() - s * p.z(), s * p.y() + c * p.z()); };
    const auto h_rot =
        assemble(make_config(200.0, {rot(a), rot(b)}), bare, PhononKind::None, gamma);
    const double t_rot = transfer_time(h_rot, initial_state(*h_rot.basis)).t_ps;
    CHECK(t_ab == doctest::Approx(t_rot).epsilon(1e-9));
}

TEST_CASE("population trace rows are consistent and exportable") {
    const auto h = two_site(0.5);
    const auto psi0 = initial_state(*h.basis);
    const auto times = linspace(0.0, 5.0, 6);
    const auto trace = population_trace(h, psi0, times, 4.0 * kPi);
    REQUIRE(trace.times_ps.size() == 6);
    for (std::size_t k = 0; k < 6; ++k) {
        const double total =
            trace.site_pops.row(static_cast<Eigen::Index>(k)).sum() + trace.sink[k];
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
    std::ostringstream os;
    write_trace_csv(trace, os);
    CHECK(os.str().substr(0, 45) == "time_ps,time_over_T,p_site_1,p_site_2,p_sink\n");
}
