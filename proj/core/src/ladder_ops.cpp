#include "gsb/ladder_ops.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "gsb/linalg.hpp"

namespace gsb {

Vector random_vector(std::mt19937_64& rng, Index dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v[i] = Complex(re, im);
    }
    return v;
}

double operator_norm_estimate(const std::function<Vector(const Vector&)>& apply,
                              const std::function<Vector(const Vector&)>& apply_adjoint,
                              Index domain_dim, std::uint64_t seed,
                              int max_iterations, double rel_tol) {
    std::mt19937_64 rng(seed);
    Vector v = random_vector(rng, domain_dim);
    double nv = v.norm();
    if (nv == 0.0) return 0.0;
    v /= nv;

    double sigma2 = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        Vector w = apply_adjoint(apply(v));
        const double rayleigh = w.norm();  // = v†M†Mv since ‖v‖=1 after normalization... see below
        // Rayleigh quotient v†(M†M)v equals real(v.dot(w)); ‖w‖ overestimates it,
        // so track the quotient itself for the from-below guarantee.
        const double quotient = std::real(v.dot(w));
        if (rayleigh == 0.0) return 0.0;
        w /= rayleigh;
        const bool converged = std::abs(quotient - sigma2) <= rel_tol * std::max(quotient, 1e-300);
        sigma2 = quotient;
        v = std::move(w);
        if (converged && it > 2) break;
    }
    return std::sqrt(std::max(sigma2, 0.0));
}

double operator_norm_estimate(const SparseMatrix& m, std::uint64_t seed,
                              int max_iterations, double rel_tol) {
    const SparseMatrix adj = m.adjoint();
    return operator_norm_estimate(
        [&m](const Vector& v) { return Vector(m * v); },
        [&adj](const Vector& v) { return Vector(adj * v); },
        m.cols(), seed, max_iterations, rel_tol);
}

Complex grid_inner_product(const FieldModel& model, const FormFactor& f,
                           const FormFactor& g) {
    Complex sum(0.0);
    for (int j = 0; j < model.mode_count(); ++j)
        sum += std::conj(f.amplitudes()[j]) * g.amplitudes()[j] * model.weights()[j];
    return sum;
}

LadderPair build_ladder(const FormFactor& f, const FockBasis& basis,
                        const FieldModel& model) {
    if (static_cast<int>(f.amplitudes().size()) != basis.mode_count())
        throw Error("domain-error", "form factor and basis mode counts differ");

    // mode amplitudes c_j = f(k_j)·√μ_j keep ⟨f,g⟩ and ‖f‖₋ₛ quadrature-consistent
    std::vector<Complex> c(basis.mode_count());
    for (int j = 0; j < basis.mode_count(); ++j)
        c[j] = f.amplitudes()[j] * std::sqrt(model.weights()[j]);

    std::vector<Triplet> triplets;
    for (Index i = 0; i < basis.dimension(); ++i) {
        const auto occ = basis.occupation(i);
        for (int j = 0; j < basis.mode_count(); ++j) {
            if (occ[j] == 0 || c[j] == Complex(0.0)) continue;
            const Index target = basis.rank_lowered(occ, j);
            triplets.emplace_back(target, i,
                                  std::conj(c[j]) * std::sqrt(static_cast<double>(occ[j])));
        }
    }

    SparseMatrix annihilate(basis.dimension(), basis.dimension());
    annihilate.setFromTriplets(triplets.begin(), triplets.end());
    annihilate.makeCompressed();
    SparseMatrix create = annihilate.adjoint();
    create.makeCompressed();

    LadderPair pair;
    pair.annihilate = {&basis, &basis, std::move(annihilate), false};
    pair.create = {&basis, &basis, std::move(create), false};
    pair.form_factor = f;
    return pair;
}

BlockOperator segal_field(const LadderPair& pair) {
    SparseMatrix phi = (pair.annihilate.entries + pair.create.entries) * (1.0 / std::sqrt(2.0));
    phi.makeCompressed();
    return {pair.annihilate.domain, pair.annihilate.domain, std::move(phi), true};
}

CommutatorReport commutator_check(const FormFactor& f, const FormFactor& g,
                                  const FockBasis& basis, const FieldModel& model,
                                  double tolerance) {
    const LadderPair lf = build_ladder(f, basis, model);
    const LadderPair lg = build_ladder(g, basis, model);

    SparseMatrix comm = SparseMatrix(lf.annihilate.entries * lg.create.entries) -
                        SparseMatrix(lg.create.entries * lf.annihilate.entries);
    comm.makeCompressed();

    CommutatorReport report;
    report.inner_product = grid_inner_product(model, f, g);

    const int top = basis.max_particles();
    for (int k = 0; k < comm.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(comm, k); it; ++it) {
            Complex expected(0.0);
            if (it.row() == it.col()) expected = report.inner_product;
            const double dev = std::abs(it.value() - expected);
            const bool in_top = basis.sector_of(it.row()) == top || basis.sector_of(it.col()) == top;
            if (in_top) report.top_sector_deviation = std::max(report.top_sector_deviation, dev);
            else report.max_deviation_safe = std::max(report.max_deviation_safe, dev);
        }
    }
    // diagonal entries that are structurally absent still deviate by ⟨f,g⟩
    if (std::abs(report.inner_product) > 0.0) {
        for (Index i = 0; i < basis.dimension(); ++i) {
            if (std::abs(comm.coeff(i, i)) == 0.0) {
                const double dev = std::abs(report.inner_product);
                if (basis.sector_of(i) == top)
                    report.top_sector_deviation = std::max(report.top_sector_deviation, dev);
                else
                    report.max_deviation_safe = std::max(report.max_deviation_safe, dev);
            }
        }
    }
    report.pass = report.max_deviation_safe <= tolerance;
    return report;
}

NelsonBoundReport nelson_bound_check(const LadderPair& pair, double s, int trials,
                                     const FieldModel& model, std::uint64_t seed) {
    if (s < 1.0) throw Error("domain-error", "nelson bound needs s >= 1");
    const FockBasis& basis = *pair.annihilate.domain;
    const FormFactor& f = pair.form_factor;

    NelsonBoundReport report;
    // pure grid constant: the exact discrete Nelson bound
    report.bound = std::sqrt(grid_norm_squared(model, f, s));
    report.bound_refined = f.has_profile() ? weighted_norm(model, f, s, NormMode::Refined)
                                           : report.bound;
    report.trials = trials;

    const RealVector e = dgamma_diagonal(model, basis);
    RealVector up(e.size()), down(e.size());
    for (Index i = 0; i < e.size(); ++i) {
        up[i] = std::pow(e[i] + 1.0, s / 2.0);
        down[i] = 1.0 / up[i];
    }

    std::mt19937_64 rng(seed);
    const double slack = 1e-12;
    for (int t = 0; t < trials; ++t) {
        const Vector psi = random_vector(rng, basis.dimension());
        const double psi_norm = psi.norm();
        const double psi_scale = (up.array() * psi.array().abs()).matrix().norm();
        // ‖a(f)Ψ‖ vs ‖f‖₋ₛ·‖Ψ‖_{F₊ₛ}
        const double lhs_a = (pair.annihilate.entries * psi).norm();
        const double rhs_a = report.bound * psi_scale;
        // dual: ‖(dΓ+1)^{−s/2}a†(f)Ψ‖ vs ‖f‖₋ₛ·‖Ψ‖
        const Vector created = pair.create.entries * psi;
        const double lhs_c = (down.array() * created.array().abs()).matrix().norm();
        const double rhs_c = report.bound * psi_norm;

        if (rhs_a > 0.0) report.max_annihilate_ratio = std::max(report.max_annihilate_ratio, lhs_a / rhs_a);
        if (rhs_c > 0.0) report.max_create_ratio = std::max(report.max_create_ratio, lhs_c / rhs_c);
        if (lhs_a > rhs_a + slack * std::max(1.0, rhs_a)) ++report.violations;
        if (lhs_c > rhs_c + slack * std::max(1.0, rhs_c)) ++report.violations;
    }

    // weighted operator norm of a(f)(dΓ+1)^{−s/2} by power iteration
    const SparseMatrix& a = pair.annihilate.entries;
    const SparseMatrix adag = a.adjoint();
    report.operator_norm_estimate = operator_norm_estimate(
        [&](const Vector& v) { return Vector(a * (down.array() * v.array()).matrix()); },
        [&](const Vector& v) { return Vector((down.array() * (adag * v).array()).matrix()); },
        basis.dimension(), seed + 1);

    report.pass = report.violations == 0 &&
                  report.operator_norm_estimate <= report.bound + 1e-8;
    return report;
}

LadderApproximationReport ladder_approximation_check(const RegularizationSequence& seq,
                                                     double s, const FockBasis& basis,
                                                     const FieldModel& model,
                                                     std::uint64_t seed) {
    const RealVector e = dgamma_diagonal(model, basis);
    RealVector down(e.size());
    for (Index i = 0; i < e.size(); ++i)
        down[i] = std::pow(e[i] + 1.0, -s / 2.0);

    LadderApproximationReport report;
    report.pass = true;
    for (std::size_t step = 0; step < seq.generated.size(); ++step) {
        std::vector<Complex> diff(seq.base.amplitudes());
        for (std::size_t j = 0; j < diff.size(); ++j)
            diff[j] -= seq.generated[step].amplitudes()[j];
        const FormFactor df = FormFactor::from_amplitudes(std::move(diff),
                                                          TailDescriptor{0.0, 0.0}, s);
        const LadderPair pair = build_ladder(df, basis, model);
        const SparseMatrix& a = pair.annihilate.entries;
        const SparseMatrix adag = a.adjoint();
        const double distance = operator_norm_estimate(
            [&](const Vector& v) { return Vector(a * (down.array() * v.array()).matrix()); },
            [&](const Vector& v) { return Vector((down.array() * (adag * v).array()).matrix()); },
            basis.dimension(), seed + step);
        const double bound = std::sqrt(grid_norm_squared(model, df, s));

        report.distances.push_back(distance);
        report.bounds.push_back(bound);
        report.ratios.push_back(bound > 0.0 ? distance / bound : 0.0);
        if (distance > bound + 1e-10 * std::max(1.0, bound)) report.pass = false;
        if (step > 0 && report.distances[step] > report.distances[step - 1] * (1.0 + 1e-10))
            report.pass = false;
    }
    return report;
}

} // namespace gsb
