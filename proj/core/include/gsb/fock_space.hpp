// fock_space.hpp — truncated symmetric Fock space over the grid modes:
// occupation-number basis with combinatorial rank/unrank, second-quantized
// diagonal operators, scale norms and the number-operator inequality.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gsb/field_model.hpp"
#include "gsb/types.hpp"

namespace gsb {

/// Occupation-number basis of ⊕_{n≤n_max} S_n H^{(n)} over G grid modes.
/// Enumeration is sector-major, lexicographic within each sector, so sector
/// blocks are contiguous. Immutable after build.
class FockBasis {
public:
    static FockBasis build(int mode_count, int n_max,
                           std::size_t dimension_limit = 2'000'000);

    int mode_count() const { return mode_count_; }
    int max_particles() const { return n_max_; }
    Index dimension() const { return static_cast<Index>(sector_offsets_.back()); }

    /// Total particle number of basis state i.
    int sector_of(Index i) const;
    std::span<const std::uint16_t> occupation(Index i) const {
        return {occupations_.data() + static_cast<std::size_t>(i) * mode_count_,
                static_cast<std::size_t>(mode_count_)};
    }

    /// Contiguous index range [begin, end) of the n-particle sector.
    std::pair<Index, Index> sector_range(int n) const;
    Index sector_dimension(int n) const;

    /// Combinatorial rank of an occupation vector (inverse of occupation()).
    Index rank(std::span<const std::uint16_t> occ) const;
    /// Rank of occ with mode `lowered` decremented by one; avoids a copy.
    Index rank_lowered(std::span<const std::uint16_t> occ, int lowered) const;

private:
    FockBasis() = default;

    // number of occupation vectors over `modes` modes summing exactly to `total`
    std::uint64_t count_states(int modes, int total) const;

    int mode_count_ = 0;
    int n_max_ = 0;
    std::vector<std::uint64_t> sector_offsets_;   // size n_max + 2
    std::vector<std::uint16_t> occupations_;      // dim × mode_count, flattened
    std::vector<std::uint64_t> binomial_;         // C(a, b) table, b <= n_max + 1
    int binomial_cols_ = 0;
};

/// Coefficient vector over a FockBasis.
struct FockVector {
    const FockBasis* basis = nullptr;
    Vector coefficients;

    double norm() const { return coefficients.norm(); }
};

/// Sparse operator tagged with its domain/codomain bases.
struct BlockOperator {
    const FockBasis* domain = nullptr;
    const FockBasis* codomain = nullptr;
    SparseMatrix entries;
    bool hermitian = false;
};

/// Second quantization of the dispersion: diagonal with entry Σ_j n_j ω_j.
BlockOperator dgamma(const FieldModel& model, const FockBasis& basis);
RealVector dgamma_diagonal(const FieldModel& model, const FockBasis& basis);

/// Second quantization of the identity: diagonal with entry Σ_j n_j.
BlockOperator number_operator(const FockBasis& basis);
RealVector number_diagonal(const FockBasis& basis);

/// ‖Ψ‖_{F_s} = ‖(dΓ(ω)+1)^{s/2} Ψ‖, computed eigenvalue-wise on the diagonal.
double scale_norm(const FockVector& psi, double s, const FieldModel& model);

/// Report for ‖dΓ(ω)^{s/2}Ψ‖ ≥ m^{s/2}‖N^{s/2}Ψ‖.
struct NumberBoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
};

NumberBoundReport numb_inequality_check(const FockVector& psi, double s,
                                        const FieldModel& model);

} // namespace gsb
