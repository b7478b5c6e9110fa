// types.hpp — shared scalar/matrix aliases and the error type used across gsb.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace gsb {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;
using Index = Eigen::Index;

/// Error with a stable machine-readable code alongside the human message.
/// Codes in use: "inconclusive-convergence", "basis-too-large",
/// "form-factor-too-singular", "not-excitation-preserving",
/// "requires-renormalization", "spectral-point", "schedule-required",
/// "config-error", "domain-error".
class Error : public std::runtime_error {
public:
    Error(std::string_view code, const std::string& message)
        : std::runtime_error(std::string(code) + ": " + message), code_(code) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

inline constexpr double kDivergent = std::numeric_limits<double>::infinity();

inline bool is_divergent(double x) noexcept { return std::isinf(x); }

/// Strict total order on complex numbers, for deterministic map keys.
struct ComplexLess {
    bool operator()(const Complex& a, const Complex& b) const noexcept {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    }
};

} // namespace gsb
