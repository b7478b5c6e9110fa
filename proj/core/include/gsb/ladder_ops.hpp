// ladder_ops.hpp — creation/annihilation operators on the truncated basis,
// the Segal field, and the boundedness/adjointness/commutation checks
// including the singular-case weighted norm bounds.

#pragma once

#include <cstdint>

#include "gsb/field_model.hpp"
#include "gsb/fock_space.hpp"
#include "gsb/types.hpp"

namespace gsb {

/// a(f) and a†(f) as sparse matrices on one FockBasis. create is the exact
/// conjugate transpose of annihilate; creation amplitudes that would leave
/// the top sector are dropped, which keeps every assembled Hamiltonian
/// hermitian and confines the truncation error to the top sector.
struct LadderPair {
    BlockOperator annihilate;   // sector n -> n-1
    BlockOperator create;       // sector n -> n+1
    FormFactor form_factor;
};

/// Mode form: a(f) = Σ_j conj(f(k_j))·√μ_j·b_j. Normalizability of f is not
/// required; only finite grid amplitudes are.
LadderPair build_ladder(const FormFactor& f, const FockBasis& basis,
                        const FieldModel& model);

/// φ(f) = (a(f) + a†(f))/√2.
BlockOperator segal_field(const LadderPair& pair);

/// [a(f), a†(g)] = ⟨f,g⟩·I on sectors n ≤ n_max−1; the top sector is polluted
/// by truncation and reported separately.
struct CommutatorReport {
    Complex inner_product;        // grid ⟨f,g⟩
    double max_deviation_safe = 0.0;
    double top_sector_deviation = 0.0;
    bool pass = false;
};

CommutatorReport commutator_check(const FormFactor& f, const FormFactor& g,
                                  const FockBasis& basis, const FieldModel& model,
                                  double tolerance = 1e-12);

/// Nelson-style bounds: ‖a(f)Ψ‖ ≤ ‖f‖₋ₛ‖Ψ‖_{F₊ₛ}, the dual bound
/// ‖(dΓ+1)^{−s/2}a†(f)Ψ‖ ≤ ‖f‖₋ₛ‖Ψ‖, and a power-iteration estimate of the
/// weighted operator norm against the same constant.
struct NelsonBoundReport {
    double bound = 0.0;               // grid ‖f‖₋ₛ (the exact discrete constant)
    double bound_refined = 0.0;       // tail-corrected value, for reporting
    int trials = 0;
    int violations = 0;
    double max_annihilate_ratio = 0.0;
    double max_create_ratio = 0.0;
    double operator_norm_estimate = 0.0;
    bool pass = false;
};

NelsonBoundReport nelson_bound_check(const LadderPair& pair, double s, int trials,
                                     const FieldModel& model, std::uint64_t seed = 1);

/// Weighted operator-norm distances ‖a(f) − a(f^i)‖ as maps F₊ₛ → F along a
/// cutoff sequence, each checked against ‖f − f^i‖₋ₛ.
struct LadderApproximationReport {
    std::vector<double> distances;
    std::vector<double> bounds;       // grid ‖f − f^i‖₋ₛ
    std::vector<double> ratios;       // distance / bound (0 when bound is 0)
    bool pass = false;
};

LadderApproximationReport ladder_approximation_check(const RegularizationSequence& seq,
                                                     double s, const FockBasis& basis,
                                                     const FieldModel& model,
                                                     std::uint64_t seed = 1);

/// Grid inner product ⟨f,g⟩ = Σ_j conj(f_j) g_j μ_j.
Complex grid_inner_product(const FieldModel& model, const FormFactor& f,
                           const FormFactor& g);

} // namespace gsb
