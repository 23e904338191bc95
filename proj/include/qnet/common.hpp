// common.hpp — Shared aliases, constants, and the error hierarchy mapped to CLI exit codes

#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qnet {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// Exit codes used by the command-line tool.
enum class ExitCode : int {
    Ok = 0,
    Failure = 1,
    Validation = 2,
    Numerical = 3,
    Capacity = 4,
};

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual ExitCode exit_code() const { return ExitCode::Failure; }
};

// Bad input: constraint violations, malformed configs, infeasible requests.
struct ValidationError : Error {
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::Validation; }
};

// Solver breakdowns: factorization failures, non-convergence, divergent integrals.
struct NumericalError : Error {
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::Numerical; }
};

// Requests exceeding configured resource caps (basis size, path enumeration).
struct CapacityError : Error {
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::Capacity; }
};

// Mix a seed and a stream index into an independent 64-bit seed (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace qnet
