#include "gsb/fock_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace gsb {

namespace {

// Sector dimension C(modes + total - 1, total) in floating point, for the
// overflow guard before anything is allocated.
long double sector_count_ld(int modes, int total) {
    long double c = 1.0L;
    for (int i = 1; i <= total; ++i)
        c = c * (modes - 1 + i) / i;
    return c;
}

} // namespace

FockBasis FockBasis::build(int mode_count, int n_max, std::size_t dimension_limit) {
    if (mode_count < 1) throw Error("domain-error", "basis needs at least one mode");
    if (n_max < 0) throw Error("domain-error", "n_max must be nonnegative");

    long double dim_ld = 0.0L;
    for (int n = 0; n <= n_max; ++n) dim_ld += sector_count_ld(mode_count, n);
    if (dim_ld > static_cast<long double>(dimension_limit))
        throw Error("basis-too-large",
                    "basis dimension " + std::to_string(static_cast<double>(dim_ld)) +
                        " exceeds limit " + std::to_string(dimension_limit));

    FockBasis basis;
    basis.mode_count_ = mode_count;
    basis.n_max_ = n_max;

    // binomial table C(a, b) for a <= mode_count + n_max, b <= n_max + 1
    basis.binomial_cols_ = n_max + 2;
    const int rows = mode_count + n_max + 1;
    basis.binomial_.assign(static_cast<std::size_t>(rows) * basis.binomial_cols_, 0);
    for (int a = 0; a < rows; ++a) {
        basis.binomial_[static_cast<std::size_t>(a) * basis.binomial_cols_] = 1;
        for (int b = 1; b < basis.binomial_cols_ && b <= a; ++b) {
            const auto at = [&](int aa, int bb) -> std::uint64_t {
                if (bb < 0 || bb > aa) return 0;
                if (bb >= basis.binomial_cols_) return 0;
                return basis.binomial_[static_cast<std::size_t>(aa) * basis.binomial_cols_ + bb];
            };
            basis.binomial_[static_cast<std::size_t>(a) * basis.binomial_cols_ + b] =
                at(a - 1, b - 1) + at(a - 1, b);
        }
    }

    basis.sector_offsets_.assign(n_max + 2, 0);
    for (int n = 0; n <= n_max; ++n)
        basis.sector_offsets_[n + 1] =
            basis.sector_offsets_[n] + basis.count_states(mode_count, n);

    const std::size_t dim = basis.sector_offsets_.back();
    basis.occupations_.assign(dim * mode_count, 0);

    // enumerate each sector in ascending lexicographic order
    std::vector<std::uint16_t> occ(mode_count, 0);
    std::size_t row = 0;
    const auto emit = [&] {
        std::copy(occ.begin(), occ.end(), basis.occupations_.begin() + row * mode_count);
        ++row;
    };
    const std::function<void(int, int)> generate = [&](int pos, int remaining) {
        if (pos == mode_count - 1) {
            occ[pos] = static_cast<std::uint16_t>(remaining);
            emit();
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            occ[pos] = static_cast<std::uint16_t>(c);
            generate(pos + 1, remaining - c);
        }
    };
    for (int n = 0; n <= n_max; ++n) generate(0, n);

    return basis;
}

std::uint64_t FockBasis::count_states(int modes, int total) const {
    // C(total + modes - 1, total) with total <= n_max + 1
    const int a = total + modes - 1;
    if (total < 0) return 0;
    if (total == 0) return 1;
    return binomial_[static_cast<std::size_t>(a) * binomial_cols_ + total];
}

int FockBasis::sector_of(Index i) const {
    const auto it = std::upper_bound(sector_offsets_.begin(), sector_offsets_.end(),
                                     static_cast<std::uint64_t>(i));
    return static_cast<int>(it - sector_offsets_.begin()) - 1;
}

std::pair<Index, Index> FockBasis::sector_range(int n) const {
    if (n < 0 || n > n_max_) throw Error("domain-error", "sector out of range");
    return {static_cast<Index>(sector_offsets_[n]), static_cast<Index>(sector_offsets_[n + 1])};
}

Index FockBasis::sector_dimension(int n) const {
    const auto [b, e] = sector_range(n);
    return e - b;
}

Index FockBasis::rank(std::span<const std::uint16_t> occ) const {
    int total = 0;
    for (auto v : occ) total += v;
    std::uint64_t r = sector_offsets_[total];
    int remaining = total;
    for (int j = 0; j < mode_count_ - 1; ++j) {
        const int v = mode_count_ - 1 - j;  // modes after position j
        for (int c = 0; c < occ[j]; ++c)
            r += count_states(v, remaining - c);
        remaining -= occ[j];
    }
    return static_cast<Index>(r);
}

Index FockBasis::rank_lowered(std::span<const std::uint16_t> occ, int lowered) const {
    int total = -1;
    for (auto v : occ) total += v;
    std::uint64_t r = sector_offsets_[total];
    int remaining = total;
    for (int j = 0; j < mode_count_ - 1; ++j) {
        const int nj = occ[j] - (j == lowered ? 1 : 0);
        const int v = mode_count_ - 1 - j;
        for (int c = 0; c < nj; ++c)
            r += count_states(v, remaining - c);
        remaining -= nj;
    }
    return static_cast<Index>(r);
}

BlockOperator dgamma(const FieldModel& model, const FockBasis& basis) {
    if (model.mode_count() != basis.mode_count())
        throw Error("domain-error", "field model and basis mode counts differ");
    const RealVector diag = dgamma_diagonal(model, basis);
    SparseMatrix mat(basis.dimension(), basis.dimension());
    mat.reserve(Eigen::VectorXi::Constant(basis.dimension(), 1));
    for (Index i = 0; i < basis.dimension(); ++i)
        if (diag[i] != 0.0) mat.insert(i, i) = diag[i];
    mat.makeCompressed();
    return {&basis, &basis, std::move(mat), true};
}

RealVector dgamma_diagonal(const FieldModel& model, const FockBasis& basis) {
    RealVector diag(basis.dimension());
    for (Index i = 0; i < basis.dimension(); ++i) {
        const auto occ = basis.occupation(i);
        double e = 0.0;
        for (int j = 0; j < basis.mode_count(); ++j)
            if (occ[j]) e += occ[j] * model.dispersion()[j];
        diag[i] = e;
    }
    return diag;
}

BlockOperator number_operator(const FockBasis& basis) {
    const RealVector diag = number_diagonal(basis);
    SparseMatrix mat(basis.dimension(), basis.dimension());
    mat.reserve(Eigen::VectorXi::Constant(basis.dimension(), 1));
    for (Index i = 0; i < basis.dimension(); ++i)
        if (diag[i] != 0.0) mat.insert(i, i) = diag[i];
    mat.makeCompressed();
    return {&basis, &basis, std::move(mat), true};
}

RealVector number_diagonal(const FockBasis& basis) {
    RealVector diag(basis.dimension());
    for (Index i = 0; i < basis.dimension(); ++i)
        diag[i] = static_cast<double>(basis.sector_of(i));
    return diag;
}

double scale_norm(const FockVector& psi, double s, const FieldModel& model) {
    const RealVector e = dgamma_diagonal(model, *psi.basis);
    double sum = 0.0;
    for (Index i = 0; i < psi.coefficients.size(); ++i)
        sum += std::norm(psi.coefficients[i]) * std::pow(e[i] + 1.0, s);
    return std::sqrt(sum);
}

NumberBoundReport numb_inequality_check(const FockVector& psi, double s,
                                        const FieldModel& model) {
    if (s < 0.0) throw Error("domain-error", "s must be nonnegative");
    const RealVector e = dgamma_diagonal(model, *psi.basis);
    double lhs = 0.0, rhs = 0.0;
    const double m = model.mass_gap();
    for (Index i = 0; i < psi.coefficients.size(); ++i) {
        const double w = std::norm(psi.coefficients[i]);
        if (w == 0.0) continue;
        lhs += w * std::pow(e[i], s);
        rhs += w * std::pow(m * psi.basis->sector_of(i), s);
    }
    NumberBoundReport report;
    report.lhs = std::sqrt(lhs);
    report.rhs = std::sqrt(rhs);
    report.margin = report.lhs - report.rhs;
    report.pass = report.margin >= -1e-12 * std::max(1.0, report.rhs);
    return report;
}

} // namespace gsb
