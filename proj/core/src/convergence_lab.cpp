#include "gsb/convergence_lab.hpp"

#include <Eigen/LU>
#include <cmath>
#include <memory>
#include <random>

#include "gsb/linalg.hpp"
#include "gsb/quadrature.hpp"

namespace gsb {

double resolvent_distance(const ResolventOperator& a, const ResolventOperator& b,
                          DistanceMode mode, const std::vector<Vector>& probes,
                          std::uint64_t seed) {
    if (a.dim != b.dim) throw Error("domain-error", "resolvent dimensions differ");

    if (mode == DistanceMode::Norm) {
        return operator_norm_estimate(
            [&](const Vector& v) { return Vector(a.apply(v) - b.apply(v)); },
            [&](const Vector& v) { return Vector(a.apply_adjoint(v) - b.apply_adjoint(v)); },
            a.dim, seed);
    }

    std::vector<Vector> set = probes;
    if (set.empty()) {
        std::mt19937_64 rng(seed);
        for (int i = 0; i < 64; ++i) set.push_back(random_vector(rng, a.dim));
    }
    double worst = 0.0;
    for (const Vector& v : set) {
        const double nv = v.norm();
        if (nv == 0.0) continue;
        worst = std::max(worst, (a.apply(v) - b.apply(v)).norm() / nv);
    }
    return worst;
}

ResolventOperator dense_resolvent(const CompositeOperator& h, Complex z) {
    const Index dim = h.dimension();
    DenseMatrix shifted = DenseMatrix(h.entries);
    shifted.diagonal().array() -= z;
    auto lu = std::make_shared<Eigen::PartialPivLU<DenseMatrix>>(shifted);
    shifted.diagonal().array() += z - std::conj(z);
    auto lu_adj = std::make_shared<Eigen::PartialPivLU<DenseMatrix>>(shifted);

    ResolventOperator op;
    op.dim = dim;
    op.apply = [lu](const Vector& v) { return Vector(lu->solve(v)); };
    op.apply_adjoint = [lu_adj](const Vector& v) { return Vector(lu_adj->solve(v)); };
    return op;
}

ResolventOperator formula_resolvent(const RwaResolvent& r, Complex z) {
    ResolventOperator op;
    op.dim = 2 * r.basis().dimension();
    op.apply = [&r, z](const Vector& v) { return r.apply_flat(z, v); };
    op.apply_adjoint = [&r, z](const Vector& v) { return r.apply_flat(std::conj(z), v); };
    return op;
}

double resolvent_distance(const CompositeOperator& ha, const CompositeOperator& hb,
                          Complex z, DistanceMode mode, std::uint64_t seed) {
    return resolvent_distance(dense_resolvent(ha, z), dense_resolvent(hb, z),
                              mode, {}, seed);
}

std::vector<Vector> standard_probe_set(const FockBasis& basis, std::uint64_t seed,
                                       int random_count) {
    const Index fd = basis.dimension();
    std::vector<Vector> probes;

    const auto unit = [&](Index i) {
        Vector v = Vector::Zero(2 * fd);
        v[i] = 1.0;
        return v;
    };
    probes.push_back(unit(0));        // (Ω, 0): excited atom, vacuum field
    probes.push_back(unit(fd));       // (0, Ω)
    for (int n = 1; n <= std::min(2, basis.max_particles()); ++n) {
        const auto [b, e] = basis.sector_range(n);
        for (Index i = b; i < e; ++i) {
            probes.push_back(unit(i));
            probes.push_back(unit(fd + i));
        }
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < random_count; ++i)
        probes.push_back(random_vector(rng, 2 * fd));
    return probes;
}

namespace {

// sup over E ≥ 0 of (E+1)^{power}/|E−z|, by scan plus local refinement
double weighted_sup(Complex z, double power) {
    const auto value = [&](double e) {
        return std::pow(e + 1.0, power) / std::abs(Complex(e, 0.0) - z);
    };
    double best = value(0.0);
    double arg = 0.0;
    const double e_max = std::max(10.0, 4.0 * std::abs(z));
    for (int i = 1; i <= 4000; ++i) {
        const double e = e_max * i / 4000.0;
        const double v = value(e);
        if (v > best) { best = v; arg = e; }
    }
    double lo = std::max(0.0, arg - e_max / 4000.0), hi = arg + e_max / 4000.0;
    for (int it = 0; it < 120; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (value(m1) < value(m2)) lo = m1; else hi = m2;
    }
    best = std::max(best, value(0.5 * (lo + hi)));
    if (power >= 1.0) best = std::max(best, 1.0);   // E → ∞ limit for power 1
    return best;
}

} // namespace

ConvergenceReport run_convergence(const RegularizationSequence& seq, RunKind kind,
                                  const FieldModel& model, const FockBasis& basis,
                                  const ConvergenceOptions& options,
                                  const std::vector<double>* schedule) {
    if (kind == RunKind::RwaRenormalized && (!schedule || schedule->empty()))
        throw Error("schedule-required",
                    "the renormalized kind needs a bare-energy schedule");
    if (schedule && schedule->size() != seq.generated.size())
        throw Error("domain-error", "schedule length does not match the sequence");
    if (options.z.imag() == 0.0)
        throw Error("domain-error", "convergence run needs nonreal z");

    const Complex z = options.z;
    const double lambda = options.lambda;

    // limit resolvent
    std::optional<RwaResolvent> limit_formula;
    std::optional<CompositeOperator> limit_matrix;
    const bool renormalized_limit =
        kind == RunKind::RwaRenormalized || options.control_against_renormalized;
    if (renormalized_limit) {
        limit_formula.emplace(seq.base, options.omega_e, lambda,
                              DressingKind::Renormalized, basis, model);
    } else {
        SpinSystem sys = SpinSystem::two_level(options.omega_e);
        sys.couplings.push_back({DenseMatrix(), seq.base});
        limit_matrix = (kind == RunKind::Gsb)
                           ? build_spin_boson(sys, lambda, basis, model)
                           : build_rwa(sys, lambda, basis, model);
    }
    const ResolventOperator limit = renormalized_limit
                                        ? formula_resolvent(*limit_formula, z)
                                        : dense_resolvent(*limit_matrix, z);

    const std::vector<Vector> probes = standard_probe_set(basis, options.seed);

    // Theorem-chain constants (grid norms are the exact discrete ones)
    const double k_half = weighted_sup(z, 0.5);
    const double kappa = weighted_sup(z, 1.0);
    const double y = std::abs(z.imag());
    const double base_norm = std::sqrt(grid_norm_squared(model, seq.base, 1.0));

    ConvergenceReport report;
    report.kind = kind;
    report.z = z;
    report.lambda = lambda;
    report.distance_s = seq.distance_s;

    for (std::size_t i = 0; i < seq.generated.size(); ++i) {
        const FormFactor& fi = seq.generated[i];
        const double energy_i = (kind == RunKind::RwaRenormalized)
                                    ? (*schedule)[i]
                                    : options.omega_e;

        SpinSystem sys = SpinSystem::two_level(energy_i);
        sys.couplings.push_back({DenseMatrix(), fi});
        const CompositeOperator hi = (kind == RunKind::Gsb)
                                         ? build_spin_boson(sys, lambda, basis, model)
                                         : build_rwa(sys, lambda, basis, model);
        const ResolventOperator ri = dense_resolvent(hi, z);

        ConvergenceStep step;
        step.cutoff = seq.cutoffs[i];
        step.form_distance = seq.distances[i];
        step.schedule_energy = energy_i;
        step.distance_norm = resolvent_distance(ri, limit, DistanceMode::Norm, {},
                                                options.seed + i);
        step.distance_strong = resolvent_distance(ri, limit, DistanceMode::Strong,
                                                  probes, options.seed + i);
        if (seq.base.has_profile()) {
            const auto& disp = model.dispersion_relation();
            const auto& base = seq.base;
            step.vacuum_self_energy = adaptive_integrate<double>(
                [&base, &disp](double k) {
                    return std::norm(base.profile(k)) / (disp(k) + 1.0);
                },
                -seq.cutoffs[i], seq.cutoffs[i], 1e-12);
        } else {
            step.vacuum_self_energy =
                self_energy_grid(fi, Complex(-1.0, 0.0), DressingKind::Plain, model).real();
        }

        if (kind != RunKind::RwaRenormalized && !options.control_against_renormalized) {
            // ‖R_a−R_b‖ ≤ ‖δf‖₋₁ · C_chain from the Theorem 5.4(iii) proof chain
            const double fi_norm = std::sqrt(grid_norm_squared(model, fi, 1.0));
            std::vector<Complex> d(seq.base.amplitudes());
            for (std::size_t j = 0; j < d.size(); ++j) d[j] -= fi.amplitudes()[j];
            const FormFactor df =
                FormFactor::from_amplitudes(std::move(d), TailDescriptor{0.0, 0.0}, 1.0);
            const double delta_norm = std::sqrt(grid_norm_squared(model, df, 1.0));
            const double alpha = lambda * std::max(base_norm, fi_norm) * k_half;
            const double dtop = (1.0 + alpha) *
                                    (lambda * lambda * (base_norm + fi_norm) * kappa *
                                     (1.0 + alpha) / (y * y)) +
                                lambda * k_half / y;
            const double chain =
                (dtop + lambda * k_half * (1.0 + alpha) / y) * (1.0 + alpha) +
                lambda * k_half * (1.0 + alpha) / y;
            step.chain_bound = delta_norm * chain;
            step.bound_ratio = step.chain_bound > 0.0
                                   ? step.distance_norm / step.chain_bound
                                   : 0.0;
        }
        report.steps.push_back(std::move(step));
    }

    report.monotone = true;
    for (std::size_t i = 1; i < report.steps.size(); ++i)
        if (report.steps[i].distance_norm >
            report.steps[i - 1].distance_norm * (1.0 + options.wobble) + 1e-14)
            report.monotone = false;

    report.fitted_constant = 0.0;
    for (const auto& step : report.steps)
        if (step.form_distance > 0.0)
            report.fitted_constant = std::max(report.fitted_constant,
                                              step.distance_norm / step.form_distance);
    if (!report.steps.empty()) {
        report.final_norm = report.steps.back().distance_norm;
        report.final_strong = report.steps.back().distance_strong;
        const double first = std::abs(report.steps.front().vacuum_self_energy);
        const double last = std::abs(report.steps.back().vacuum_self_energy);
        report.vacuum_growth = first > 0.0 ? last / first : kDivergent;
    }

    bool bounds_ok = true;
    for (const auto& step : report.steps)
        if (step.chain_bound > 0.0 && step.distance_norm > step.chain_bound * (1.0 + 1e-6))
            bounds_ok = false;
    report.pass = report.monotone && bounds_ok &&
                  report.final_norm <= options.final_target &&
                  report.final_strong <= options.final_target;
    return report;
}

} // namespace gsb
