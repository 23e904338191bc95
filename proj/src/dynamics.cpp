#include "qnet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "qnet/krylov.hpp"
#include "qnet/linalg.hpp"

namespace qnet {

namespace {

struct EigCache {
    DenseEig eig;
    Eigen::VectorXcd weights; // S^-1 psi0
};

EigCache decompose(const AssembledHamiltonian& h, const Eigen::VectorXcd& psi0) {
    EigCache cache;
    cache.eig = eig_nonhermitian(Eigen::MatrixXcd(h.matrix));
    cache.weights = cache.eig.vectors.partialPivLu().solve(psi0);
    return cache;
}

Eigen::VectorXcd evolve_from_eig(const EigCache& cache, double t) {
    const auto n = cache.eig.values.size();
    Eigen::VectorXcd coeffs(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        coeffs(k) = cache.weights(k) * std::exp(cplx(0.0, -t) * cache.eig.values(k));
    }
    return cache.eig.vectors * coeffs;
}

void check_times(std::span<const double> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1])) {
            throw ValidationError("propagate: times must be non-negative and increasing");
        }
    }
}

} // namespace

Eigen::VectorXcd initial_state(const BasisIndex& basis) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dim()));
    psi(0) = 1.0; // input site, vacuum occupations
    return psi;
}

std::vector<Eigen::VectorXcd> propagate_dense(const AssembledHamiltonian& h,
                                              const Eigen::VectorXcd& psi0,
                                              std::span<const double> times) {
    check_times(times);
    const EigCache cache = decompose(h, psi0);
    std::vector<Eigen::VectorXcd> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(evolve_from_eig(cache, t));
    return out;
}

std::vector<Eigen::VectorXcd> propagate(const AssembledHamiltonian& h,
                                        const Eigen::VectorXcd& psi0,
                                        std::span<const double> times,
                                        const EvolverOptions& opts) {
    if (static_cast<Eigen::Index>(h.dim) != psi0.size()) {
        throw ValidationError("propagate: state dimension mismatch");
    }
    if (h.dim <= static_cast<std::size_t>(opts.dense_threshold)) {
        return propagate_dense(h, psi0, times);
    }
    return propagate_krylov(h.matrix, psi0, times, opts.krylov());
}

Eigen::VectorXd site_populations(const Eigen::VectorXcd& psi, const BasisIndex& basis) {
    if (psi.size() != static_cast<Eigen::Index>(basis.dim())) {
        throw ValidationError("site_populations: state dimension mismatch");
    }
    const auto pd = static_cast<Eigen::Index>(basis.phonon_dim());
    Eigen::VectorXd pops(basis.n_sites());
    for (int i = 0; i < basis.n_sites(); ++i) {
        pops(i) = psi.segment(static_cast<Eigen::Index>(i) * pd, pd).squaredNorm();
    }
    return pops;
}

double sink_population(const Eigen::VectorXcd& psi) { return 1.0 - psi.squaredNorm(); }

PopulationTrace population_trace(const AssembledHamiltonian& h, const Eigen::VectorXcd& psi0,
                                 std::span<const double> times, double benchmark_T,
                                 const EvolverOptions& opts) {
    const auto states = propagate(h, psi0, times, opts);
    PopulationTrace trace;
    trace.times_ps.assign(times.begin(), times.end());
    trace.benchmark_T = benchmark_T;
    trace.site_pops.resize(static_cast<Eigen::Index>(times.size()), h.basis->n_sites());
    trace.sink.resize(times.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        trace.site_pops.row(static_cast<Eigen::Index>(k)) =
            site_populations(states[k], *h.basis).transpose();
        trace.sink[k] = sink_population(states[k]);
    }
    return trace;
}

void write_trace_csv(const PopulationTrace& trace, std::ostream& os) {
    const auto n_sites = trace.site_pops.cols();
    os << "time_ps,time_over_T";
    for (Eigen::Index i = 0; i < n_sites; ++i) os << ",p_site_" << (i + 1);
    os << ",p_sink\n";
    os << std::setprecision(12);
    for (std::size_t k = 0; k < trace.times_ps.size(); ++k) {
        const double t = trace.times_ps[k];
        os << t << "," << t / trace.benchmark_T;
        for (Eigen::Index i = 0; i < n_sites; ++i) {
            os << "," << trace.site_pops(static_cast<Eigen::Index>(k), i);
        }
        os << "," << trace.sink[k] << "\n";
    }
}

TransferTime transfer_time_analytic(const AssembledHamiltonian& h,
                                    const Eigen::VectorXcd& psi0,
                                    const EvolverOptions& opts) {
    TransferTime result;
    result.method = "analytic-eig";

    const EigCache cache = decompose(h, psi0);
    const auto& lambda = cache.eig.values;
    const auto n = lambda.size();
    for (Eigen::Index k = 0; k < n; ++k) {
        if (std::abs(lambda(k).imag()) < opts.dark_tol) {
            result.divergent = true;
            result.t_ps = std::numeric_limits<double>::infinity();
            return result;
        }
    }

    // TT = sum_{n,m} conj(w_n) G_nm w_m / (i (lambda_m - conj(lambda_n))),
    // G = S^dag S. Every mode decays, so each denominator has |Im| > 0.
    const Eigen::MatrixXcd gram = cache.eig.vectors.adjoint() * cache.eig.vectors;
    const Eigen::VectorXcd& w = cache.weights;
    cplx total = 0.0;
    for (Eigen::Index row = 0; row < n; ++row) {
        const cplx wn = std::conj(w(row));
        const cplx ln = std::conj(lambda(row));
        cplx acc = 0.0;
        for (Eigen::Index col = 0; col < n; ++col) {
            acc += gram(row, col) * w(col) / (cplx(0.0, 1.0) * (lambda(col) - ln));
        }
        total += wn * acc;
    }
    result.t_ps = total.real();
    if (!(result.t_ps >= 0.0) || !std::isfinite(result.t_ps)) {
        std::ostringstream msg;
        msg << "analytic transfer time is not a finite non-negative number: " << total;
        throw NumericalError(msg.str());
    }
    return result;
}

namespace {

// Recursive adaptive Simpson with the standard |S2 - S1|/15 error estimate.
// Subdivision is forced down to min_depth so that a panel spanning many
// oscillation periods cannot be accepted off an aliased sample.
template <typename F>
double adaptive_simpson(const F& f, double a, double fa, double b, double fb, double fm,
                        double whole, double abs_tol, int depth, int force) {
    const double m = (a + b) / 2.0;
    const double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || (force <= 0 && std::abs(diff) <= 15.0 * abs_tol)) {
        return left + right + diff / 15.0;
    }
    return adaptive_simpson(f, a, fa, m, fm, flm, left, abs_tol / 2.0, depth - 1,
                            force - 1) +
           adaptive_simpson(f, m, fm, b, fb, frm, right, abs_tol / 2.0, depth - 1,
                            force - 1);
}

template <typename F>
double integrate_segment(const F& f, double a, double b, double rel_tol, double floor,
                         int min_depth = 6) {
    const double fa = f(a), fb = f(b), fm = f((a + b) / 2.0);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double abs_tol = std::max(rel_tol * std::max(std::abs(whole), floor), 1e-300);
    return adaptive_simpson(f, a, fa, b, fb, fm, whole, abs_tol, 48, min_depth);
}

// Dense variant: the eigendecomposition makes |psi(t)|^2 cheap at arbitrary t,
// and the slowest mode gives the exact asymptotic decay rate for the tail.
TransferTime quadrature_dense(const AssembledHamiltonian& h, const Eigen::VectorXcd& psi0,
                              const EvolverOptions& opts) {
    TransferTime result;
    result.method = "quadrature-dense";

    const EigCache cache = decompose(h, psi0);
    double slowest = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < cache.eig.values.size(); ++k) {
        const double decay = -cache.eig.values(k).imag();
        if (std::abs(decay) < opts.dark_tol) {
            result.divergent = true;
            result.t_ps = std::numeric_limits<double>::infinity();
            return result;
        }
        slowest = std::min(slowest, decay);
    }
    const double r_slow = 2.0 * slowest; // |psi|^2 decays twice as fast as psi

    const auto norm2 = [&](double t) { return evolve_from_eig(cache, t).squaredNorm(); };

    double accum = 0.0;
    double t = 0.0;
    double seg = 0.25 / r_slow;
    while (true) {
        accum += integrate_segment(norm2, t, t + seg, opts.quad_rel_tol, 0.05 * accum);
        t += seg;
        const double tail = norm2(t) / r_slow;
        if (tail < opts.tail_rel_tol * accum) {
            accum += tail;
            break;
        }
        if (accum >= opts.accum_cap) break;
        if (t > opts.t_max) {
            result.divergent = true;
            result.t_ps = std::numeric_limits<double>::infinity();
            return result;
        }
        seg *= 2.0;
    }
    result.t_ps = accum;
    return result;
}

// Least-squares slope of log(norm^2) over samples with time >= t_lo.
double fit_decay_rate(const std::vector<std::pair<double, double>>& history, double t_lo) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& [t, n2] : history) {
        if (t < t_lo || n2 <= 0.0) continue;
        const double y = std::log(n2);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++n;
    }
    if (n < 3) return std::numeric_limits<double>::quiet_NaN();
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return -(n * sxy - sx * sy) / denom;
}

// Krylov variant: march, integrate each committed step at sampled nodes, and
// stop once the accumulated integral plus the exponential tail stabilizes.
TransferTime quadrature_krylov(const AssembledHamiltonian& h, const Eigen::VectorXcd& psi0,
                               const EvolverOptions& opts) {
    TransferTime result;
    result.method = "quadrature-krylov";

    KrylovStepper stepper(h.matrix, psi0, opts.krylov());
    double accum = 0.0;

    std::vector<std::pair<double, double>> history = {{0.0, psi0.squaredNorm()}};
    double next_check = 0.0;
    int stable_checks = 0;
    double last_total_est = std::numeric_limits<double>::quiet_NaN();

    while (true) {
        const auto info = stepper.step(std::numeric_limits<double>::max());
        const double t_now = stepper.time();
        const double norm2_now = stepper.state().squaredNorm();
        const double t_prev = t_now - info.dt;
        const auto norm2_local = [&](double t) {
            return stepper.norm2_within_last(t - t_prev);
        };
        accum += integrate_segment(norm2_local, t_prev, t_now, opts.quad_rel_tol,
                                   0.05 * accum);

        history.emplace_back(t_now, norm2_now);
        if (history.size() > 4096) { // decimate, keeping the newest point
            std::vector<std::pair<double, double>> keep;
            keep.reserve(history.size() / 2 + 1);
            for (std::size_t k = 0; k < history.size(); k += 2) keep.push_back(history[k]);
            if (keep.back() != history.back()) keep.push_back(history.back());
            history.swap(keep);
        }

        if (norm2_now < 1e-16) break;       // nothing measurable left
        if (accum >= opts.accum_cap) break; // caller only needs "at least this large"

        if (t_now >= next_check) {
            next_check = std::max(t_now * 1.25, next_check + info.dt);
            const double rate = fit_decay_rate(history, t_now / 2.0);
            if (std::isfinite(rate) && rate > 0.0) {
                const double tail = norm2_now / rate;
                if (tail < opts.tail_rel_tol * accum) {
                    accum += tail;
                    break;
                }
                // Fallback exit: the total estimate (integral plus tail) has
                // stopped moving at the requested resolution.
                const double total_est = accum + tail;
                if (std::isfinite(last_total_est) &&
                    std::abs(total_est - last_total_est) < opts.tail_rel_tol * total_est) {
                    if (++stable_checks >= 3) {
                        accum = total_est;
                        break;
                    }
                } else {
                    stable_checks = 0;
                }
                last_total_est = total_est;
                // A surviving mode decaying slower than the dark-state
                // tolerance will never drain.
                if (rate < 2.0 * opts.dark_tol && t_now > 100.0) {
                    result.divergent = true;
                    result.t_ps = std::numeric_limits<double>::infinity();
                    return result;
                }
            }
            if (t_now >= opts.t_max) {
                result.divergent = true;
                result.t_ps = std::numeric_limits<double>::infinity();
                return result;
            }
        }
    }

    result.t_ps = accum;
    return result;
}

} // namespace

TransferTime transfer_time_quadrature(const AssembledHamiltonian& h,
                                      const Eigen::VectorXcd& psi0,
                                      const EvolverOptions& opts) {
    if (h.dim <= static_cast<std::size_t>(opts.dense_threshold)) {
        return quadrature_dense(h, psi0, opts);
    }
    return quadrature_krylov(h, psi0, opts);
}

TransferTime transfer_time(const AssembledHamiltonian& h, const Eigen::VectorXcd& psi0,
                           const EvolverOptions& opts) {
    if (!h.has_sink()) {
        TransferTime result;
        result.divergent = true;
        result.t_ps = std::numeric_limits<double>::infinity();
        result.method = "no-sink";
        return result;
    }
    if (h.dim <= static_cast<std::size_t>(opts.dense_threshold)) {
        return transfer_time_analytic(h, psi0, opts);
    }
    return transfer_time_quadrature(h, psi0, opts);
}

} // namespace qnet
