// linalg.hpp — power iteration for operator norms and seeded random vectors.

#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "gsb/types.hpp"

namespace gsb {

/// Complex standard-normal vector; deterministic for a fixed seed and stdlib.
Vector random_vector(std::mt19937_64& rng, Index dim);

/// Largest singular value of the map given by apply/apply_adjoint, via power
/// iteration on M†M. The Rayleigh estimate converges from below, so using the
/// result in "norm ≤ bound" assertions is safe even when under-converged.
double operator_norm_estimate(const std::function<Vector(const Vector&)>& apply,
                              const std::function<Vector(const Vector&)>& apply_adjoint,
                              Index domain_dim, std::uint64_t seed = 7,
                              int max_iterations = 600, double rel_tol = 1e-12);

/// Convenience overload for an explicit sparse matrix.
double operator_norm_estimate(const SparseMatrix& m, std::uint64_t seed = 7,
                              int max_iterations = 600, double rel_tol = 1e-12);

} // namespace gsb
