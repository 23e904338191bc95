#include "qnet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qnet {

NetworkConfig make_config(double cube_edge, const std::vector<Vec3>& intermediates,
                          double min_separation, double dipole_constant) {
    NetworkConfig config;
    config.n_sites = static_cast<int>(intermediates.size()) + 2;
    config.cube_edge = cube_edge;
    config.min_separation = min_separation;
    config.dipole_constant = dipole_constant;
    config.positions.reserve(config.n_sites);
    config.positions.push_back(config.input_position());
    config.positions.insert(config.positions.end(), intermediates.begin(), intermediates.end());
    config.positions.push_back(config.output_position());
    return config;
}

std::vector<Violation> validate(const NetworkConfig& config) {
    std::vector<Violation> out;
    const int n = config.n_sites;
    if (n < 2 || static_cast<int>(config.positions.size()) != n) {
        std::ostringstream msg;
        msg << "expected " << n << " site positions, got " << config.positions.size();
        out.push_back({Violation::Kind::SiteCount, -1, -1,
                       static_cast<double>(config.positions.size()), msg.str()});
        return out;
    }

    const double half = config.cube_edge / 2.0;
    auto check_endpoint = [&](int idx, const Vec3& expected) {
        const double off = (config.positions[idx] - expected).norm();
        if (off > 1e-9) {
            std::ostringstream msg;
            msg << "site " << idx << " must sit at (" << expected.x() << ", " << expected.y()
                << ", " << expected.z() << "); displaced by " << off << " A";
            out.push_back({Violation::Kind::EndpointMoved, idx, -1, off, msg.str()});
        }
    };
    check_endpoint(0, config.input_position());
    check_endpoint(n - 1, config.output_position());

    for (int i = 1; i + 1 < n; ++i) {
        for (int axis = 0; axis < 3; ++axis) {
            const double coord = config.positions[i][axis];
            if (coord < -half || coord > half) {
                std::ostringstream msg;
                msg << "site " << i << " coordinate " << "xyz"[axis] << " = " << coord
                    << " outside [" << -half << ", " << half << "]";
                out.push_back({Violation::Kind::OutOfBox, i, -1, coord, msg.str()});
            }
        }
    }

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double r = (config.positions[i] - config.positions[j]).norm();
            if (r <= config.min_separation) {
                std::ostringstream msg;
                msg << "sites " << i << " and " << j << " are " << r << " A apart (min "
                    << config.min_separation << " A)";
                out.push_back({Violation::Kind::TooClose, i, j, r, msg.str()});
            }
        }
    }
    return out;
}

bool is_valid(const NetworkConfig& config) { return validate(config).empty(); }

Eigen::MatrixXd coupling_matrix(const NetworkConfig& config) {
    const int n = config.n_sites;
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double r = (config.positions[i] - config.positions[j]).norm();
            if (r <= 0.0) {
                std::ostringstream msg;
                msg << "degenerate geometry: sites " << i << " and " << j << " coincide";
                throw ValidationError(msg.str());
            }
            const double val = config.dipole_constant / (r * r * r);
            v(i, j) = val;
            v(j, i) = val;
        }
    }
    return v;
}

double benchmark_time(const NetworkConfig& config) {
    const double d = config.cube_edge;
    const double v_inout = config.dipole_constant / (d * d * d);
    return kPi / (2.0 * v_inout);
}

PhononKind phonon_kind_from_string(const std::string& name) {
    if (name == "none") return PhononKind::None;
    if (name == "holstein") return PhononKind::Holstein;
    if (name == "peierls") return PhononKind::Peierls;
    if (name == "both") return PhononKind::Both;
    throw ValidationError("unknown phonon kind '" + name +
                          "' (expected none|holstein|peierls|both)");
}

std::string to_string(PhononKind kind) {
    switch (kind) {
        case PhononKind::None: return "none";
        case PhononKind::Holstein: return "holstein";
        case PhononKind::Peierls: return "peierls";
        case PhononKind::Both: return "both";
    }
    return "none";
}

std::vector<double> effective_lambdas(const NetworkConfig& config, const PhononSpec& spec,
                                      PhononKind kind) {
    if (kind != PhononKind::Holstein && kind != PhononKind::Peierls) {
        throw ValidationError("effective_lambdas: kind must be holstein or peierls");
    }
    const int n = config.n_sites;
    const Eigen::MatrixXd v = coupling_matrix(config);
    const double v_max = v.maxCoeff();
    if (v_max <= 0.0) {
        throw NumericalError("effective_lambdas: maximum hopping amplitude is not positive");
    }

    const auto& freqs =
        (kind == PhononKind::Holstein) ? spec.holstein_freqs : spec.peierls_freqs;
    if (static_cast<int>(freqs.size()) != n) {
        throw ValidationError("effective_lambdas: need one frequency per site");
    }
    for (double w : freqs) {
        if (w <= 0.0) throw ValidationError("effective_lambdas: frequencies must be positive");
    }

    std::vector<double> lambdas(n, 0.0);
    if (kind == PhononKind::Holstein) {
        const double g2 = spec.g_holstein * spec.g_holstein;
        for (int i = 0; i < n; ++i) lambdas[i] = 2.0 * g2 / (freqs[i] * v_max);
    } else {
        const double a2 = spec.alpha * spec.alpha;
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const double r = (config.positions[i] - config.positions[j]).norm();
                const double r6 = std::pow(r, 6);
                sum += 2.0 * a2 / (freqs[i] * r6 * v_max);
            }
            lambdas[i] = sum / static_cast<double>(n - 1);
        }
    }
    return lambdas;
}

NetworkConfig sample_config(std::uint64_t seed, int n_sites, double cube_edge,
                            double min_separation, double dipole_constant, int max_attempts) {
    if (n_sites < 2) throw ValidationError("sample_config: need at least 2 sites");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-cube_edge / 2.0, cube_edge / 2.0);

    std::vector<Vec3> placed;
    placed.emplace_back(-cube_edge / 2.0, 0.0, 0.0);
    placed.emplace_back(+cube_edge / 2.0, 0.0, 0.0);

    std::vector<Vec3> intermediates;
    for (int i = 0; i < n_sites - 2; ++i) {
        bool ok = false;
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            const Vec3 candidate(coord(rng), coord(rng), coord(rng));
            bool clear = true;
            for (const Vec3& p : placed) {
                if ((candidate - p).norm() <= min_separation) {
                    clear = false;
                    break;
                }
            }
            if (clear) {
                placed.push_back(candidate);
                intermediates.push_back(candidate);
                ok = true;
                break;
            }
        }
        if (!ok) {
            std::ostringstream msg;
            msg << "sample_config: could not place site " << (i + 2) << " of " << n_sites
                << " after " << max_attempts << " attempts (D = " << cube_edge
                << " A, r_min = " << min_separation << " A)";
            throw ValidationError(msg.str());
        }
    }
    return make_config(cube_edge, intermediates, min_separation, dipole_constant);
}

double linearity_diagnostic(const NetworkConfig& config) {
    double max_perp = 0.0;
    for (int i = 1; i + 1 < config.n_sites; ++i) {
        const Vec3& p = config.positions[i];
        const double perp = std::hypot(p.y(), p.z());
        max_perp = std::max(max_perp, perp);
    }
    return max_perp / config.cube_edge;
}

} // namespace qnet
