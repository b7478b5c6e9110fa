// model_builder.hpp — composite-space Hamiltonians on ℂ^dim ⊗ F: the free
// part, the four named models, excitation sectors of the rotating-wave model,
// and the KLMN smallness threshold estimator.

#pragma once

#include <optional>
#include <vector>

#include "gsb/field_model.hpp"
#include "gsb/fock_space.hpp"
#include "gsb/ladder_ops.hpp"
#include "gsb/types.hpp"

namespace gsb {

/// Atomic system: free Hamiltonian A (hermitian, nonnegative) and couplings
/// B_j paired with their form factors.
struct SpinSystem {
    DenseMatrix free_h;
    struct Coupling {
        DenseMatrix op;
        FormFactor form_factor;
    };
    std::vector<Coupling> couplings;

    int dim() const { return static_cast<int>(free_h.rows()); }

    /// diag(ω_e, ω_g); the excited level comes first.
    static SpinSystem two_level(double omega_e, double omega_g = 0.0);
};

DenseMatrix pauli_x();
DenseMatrix pauli_z();
DenseMatrix pauli_plus();
DenseMatrix pauli_minus();

/// Sparse operator on the tensor-product index set.
/// Composite index = spin_index · dim(F) + fock_index.
struct CompositeOperator {
    int spin_dim = 0;
    const FockBasis* basis = nullptr;
    SparseMatrix entries;
    bool hermitian = false;

    Index dimension() const { return entries.rows(); }
};

inline Index composite_index(int spin, Index fock, Index fock_dim) {
    return static_cast<Index>(spin) * fock_dim + fock;
}

/// H₀ = A ⊗ I + I ⊗ dΓ(ω).
CompositeOperator build_h0(const SpinSystem& sys, const FieldModel& model,
                           const FockBasis& basis);

/// H = H₀ + λ Σ_j (B_j ⊗ a†(f_j) + B_j* ⊗ a(f_j)). Requires every ‖f_j‖₋₁
/// finite ("form-factor-too-singular" otherwise); hermitian by construction.
CompositeOperator build_gsb(const SpinSystem& sys, double lambda,
                            const FockBasis& basis, const FieldModel& model);

/// Spin-boson: B = σ_x with a single form factor.
CompositeOperator build_spin_boson(const SpinSystem& sys, double lambda,
                                   const FockBasis& basis, const FieldModel& model);

/// Rotating-wave model [[ω_e + dΓ, λ a(f)], [λ a†(f), dΓ]] on F ⊕ F; the
/// ground-state energy is fixed to zero, and no ‖f‖₋₁ condition is imposed
/// (the grid matrix exists for any amplitudes).
CompositeOperator build_rwa(const SpinSystem& sys, double lambda,
                            const FockBasis& basis, const FieldModel& model);

/// Dephasing model: B = σ_z; block-diagonal in the spin index.
CompositeOperator build_dephasing(const SpinSystem& sys, double lambda,
                                  const FockBasis& basis, const FieldModel& model);

/// N_exc = diag(N+1, N) on F ⊕ F.
RealVector excitation_number_diagonal(const FockBasis& basis);

/// Restriction of an excitation-preserving H to 𝔥^{(n)} = H^{(n−1)} ⊕ H^{(n)}.
/// n ranges over 0..n_max+1; the top value covers the excited ⊗ n_max
/// remainder so the sector direct sum reproduces H. Raises
/// "not-excitation-preserving" when H couples distinct sectors.
struct SectorBlock {
    int n = 0;
    SparseMatrix entries;
    std::vector<Index> composite_indices;   // block row/col -> composite index

    DenseMatrix dense() const { return DenseMatrix(entries); }
};

SectorBlock excitation_sector(const CompositeOperator& h, int n);

/// Max |entry| of H between distinct excitation sectors (0 for RWA models).
double excitation_cross_coupling(const CompositeOperator& h);

/// Reciprocal of the power-iteration estimate of
/// ‖(H₀+1)^{−1/2} V (H₀+1)^{−1/2}‖: the guaranteed self-adjointness
/// threshold for H₀ + λV. Returns +inf for V = 0. A truncated
/// lower-confidence estimate: the true norm is over the untruncated space.
double klmn_threshold(const CompositeOperator& h0, const CompositeOperator& v,
                      std::uint64_t seed = 11);

} // namespace gsb
