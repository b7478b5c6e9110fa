#include "gsb/experiments.hpp"

#include <cmath>
#include <random>

#include "gsb/convergence_lab.hpp"
#include "gsb/ladder_ops.hpp"
#include "gsb/linalg.hpp"
#include "gsb/model_builder.hpp"
#include "gsb/resolvent_engine.hpp"

namespace gsb {

namespace {

Json config_echo(const ExperimentConfig& cfg) {
    Json j;
    j["field"] = {{"dispersion", cfg.dispersion_family}, {"mass", cfg.mass},
                  {"half_width", cfg.half_width}, {"modes", cfg.modes}};
    j["form_factor"] = {{"family", cfg.family},
                        {"declared_s", cfg.declared_s.value_or(-1.0)}};
    j["truncation"] = {{"n_max", cfg.n_max}};
    j["model"] = {{"kind", cfg.model_kind}, {"lambda", cfg.lambda},
                  {"omega_e", cfg.omega_e}, {"renormalized", cfg.renormalized}};
    j["seed"] = cfg.seed;
    return j;
}

Json check_record(const std::string& name, bool pass, Json details) {
    Json j;
    j["check"] = name;
    j["pass"] = pass;
    j["details"] = std::move(details);
    return j;
}

std::vector<Complex> z_list_or_default(const ExperimentConfig& cfg) {
    if (!cfg.z_list.empty()) return cfg.z_list;
    return {Complex(1.0, 1.0), Complex(-0.5, 0.25)};
}

DenseMatrix square_matrix_from(const std::vector<Complex>& entries,
                               const std::string& key) {
    const auto dim = static_cast<Index>(std::llround(std::sqrt(double(entries.size()))));
    if (dim * dim != static_cast<Index>(entries.size()))
        throw Error("config-error", "field '" + key + "': needs a square matrix "
                                        "(row-major complex entries)");
    DenseMatrix m(dim, dim);
    for (Index r = 0; r < dim; ++r)
        for (Index c = 0; c < dim; ++c)
            m(r, c) = entries[static_cast<std::size_t>(r * dim + c)];
    return m;
}

// atomic system from the model section: explicit matrices win over the
// two-level convenience keys
SpinSystem configured_spin_system(const ExperimentConfig& cfg, const FormFactor& f) {
    SpinSystem sys;
    sys.free_h = cfg.a_matrix.empty()
                     ? SpinSystem::two_level(cfg.omega_e, cfg.omega_g).free_h
                     : square_matrix_from(cfg.a_matrix, "model.a");
    DenseMatrix b = cfg.b_matrix.empty()
                        ? pauli_x()
                        : square_matrix_from(cfg.b_matrix, "model.b");
    if (b.rows() != sys.free_h.rows())
        throw Error("config-error", "model.a and model.b dimensions differ");
    sys.couplings.push_back({std::move(b), f});
    return sys;
}

} // namespace

ExperimentResult run_verify_bounds(const ExperimentConfig& cfg) {
    const FieldModel model = cfg.make_field_model();
    const FockBasis basis = cfg.make_basis();
    const FormFactor f = cfg.make_form_factor(model);

    ExperimentResult result;
    result.summary["schema_version"] = kSchemaVersion;
    result.summary["subcommand"] = "verify-bounds";
    result.summary["config"] = config_echo(cfg);
    Json checks = Json::array();
    bool all_pass = true;

    // number-operator inequality on seeded random states, s ∈ {1, 2}
    {
        std::mt19937_64 rng(cfg.seed);
        int violations = 0;
        double min_margin = kDivergent;
        const int trials = std::max(1, cfg.trials / 10);
        for (int t = 0; t < trials; ++t) {
            FockVector psi{&basis, random_vector(rng, basis.dimension())};
            for (double s : {1.0, 2.0}) {
                const auto rep = numb_inequality_check(psi, s, model);
                min_margin = std::min(min_margin, rep.margin);
                if (!rep.pass) ++violations;
            }
        }
        const bool pass = violations == 0;
        all_pass &= pass;
        checks.push_back(check_record("number-inequality", pass,
                                      {{"trials", trials}, {"violations", violations},
                                       {"min_margin", min_margin}}));
    }

    // ladder bounds
    {
        LadderPair pair = build_ladder(f, basis, model);
        if (cfg.fault_injection == "corrupt-adjoint") {
            // test fixture: break the adjoint pairing to prove the suite can fail
            SparseMatrix broken = pair.create.entries;
            broken.coeffRef(0, 0) += Complex(0.0, 0.25);
            pair.create.entries = broken;
        }
        for (double s : {1.0, 2.0}) {
            if (is_divergent(weighted_norm_squared(model, f, s, NormMode::Grid))) continue;
            const auto rep = nelson_bound_check(pair, s, cfg.trials, model, cfg.seed);
            all_pass &= rep.pass;
            checks.push_back(check_record(
                "nelson-bound-s" + std::to_string(static_cast<int>(s)), rep.pass,
                {{"bound", rep.bound}, {"bound_refined", rep.bound_refined},
                 {"violations", rep.violations}, {"operator_norm", rep.operator_norm_estimate},
                 {"max_annihilate_ratio", rep.max_annihilate_ratio},
                 {"max_create_ratio", rep.max_create_ratio}}));
        }
        // adjoint pairing: ⟨Φ, aΨ⟩ = ⟨a†Φ, Ψ⟩ on random pairs
        {
            std::mt19937_64 rng(cfg.seed + 2);
            double max_dev = 0.0;
            for (int t = 0; t < 32; ++t) {
                const Vector phi = random_vector(rng, basis.dimension());
                const Vector psi = random_vector(rng, basis.dimension());
                const Complex lhs = phi.dot(pair.annihilate.entries * psi);
                const Complex rhs = (pair.create.entries * phi).dot(psi);
                max_dev = std::max(max_dev, std::abs(lhs - rhs) /
                                                std::max(1.0, std::abs(lhs)));
            }
            const bool pass = max_dev <= cfg.tolerance;
            all_pass &= pass;
            checks.push_back(check_record("adjoint-pairing", pass, {{"max_deviation", max_dev}}));
        }
    }

    // commutation relation
    {
        const auto rep = commutator_check(f, f, basis, model, 1e-12);
        all_pass &= rep.pass;
        checks.push_back(check_record("commutator", rep.pass,
                                      {{"max_deviation_safe", rep.max_deviation_safe},
                                       {"top_sector_deviation", rep.top_sector_deviation},
                                       {"inner_product_re", rep.inner_product.real()}}));
    }

    // generic GSB assembly: hermiticity and the KLMN threshold estimate
    if (cfg.model_kind == "gsb") {
        const SpinSystem sys = configured_spin_system(cfg, f);
        const CompositeOperator h = build_gsb(sys, cfg.lambda, basis, model);
        const CompositeOperator h0 = build_h0(sys, model, basis);
        const double herm_dev =
            SparseMatrix(SparseMatrix(h.entries.adjoint()) - h.entries)
                .coeffs().abs().maxCoeff();
        CompositeOperator v = h;
        v.entries = h.entries - h0.entries;
        const double threshold =
            cfg.lambda != 0.0 ? klmn_threshold(h0, v, cfg.seed + 5) * cfg.lambda
                              : kDivergent;
        const bool pass = herm_dev == 0.0;
        all_pass &= pass;
        checks.push_back(check_record(
            "gsb-assembly", pass,
            {{"hermiticity_deviation", herm_dev},
             {"klmn_threshold_truncated_estimate", threshold},
             {"dim", sys.dim()}}));
        if (cfg.export_operator) result.operator_dumps.emplace_back("hamiltonian", h.entries);
    }

    // relative bounds of the renormalized dressing split
    if (const double ds = cfg.effective_declared_s(f); ds >= 1.0 && ds <= 2.0) {
        const double s = ds;
        const double r = 1.0;
        const auto rep = relative_bound_check(f, s, r, basis, model,
                                              std::max(1, cfg.trials / 2), cfg.seed + 3);
        all_pass &= rep.pass;
        checks.push_back(check_record("relative-bounds", rep.pass,
                                      {{"s", s}, {"r", r},
                                       {"t_constant", rep.t_constant},
                                       {"r_constant", rep.r_constant},
                                       {"max_t_ratio", rep.max_t_ratio},
                                       {"max_r_ratio", rep.max_r_ratio},
                                       {"violations", rep.violations}}));
    }

    result.summary["checks"] = checks;
    result.summary["pass"] = all_pass;
    result.exit_code = all_pass ? 0 : 1;
    return result;
}

ExperimentResult run_resolvent_check(const ExperimentConfig& cfg) {
    const FieldModel model = cfg.make_field_model();
    const FockBasis basis = cfg.make_basis();
    const FormFactor f = cfg.make_form_factor(model);
    const Index fd = basis.dimension();

    ExperimentResult result;
    result.summary["schema_version"] = kSchemaVersion;
    result.summary["subcommand"] = "resolvent-check";
    result.summary["config"] = config_echo(cfg);

    const std::vector<Complex> zs = z_list_or_default(cfg);
    std::vector<double> lambdas = cfg.lambdas;
    if (lambdas.empty()) lambdas = {cfg.lambda};

    CsvTable table;
    table.columns = {"lambda", "re_z", "im_z", "max_relative_residual"};
    double worst = 0.0;
    std::mt19937_64 rng(cfg.seed);

    for (double lambda : lambdas) {
        SpinSystem sys = SpinSystem::two_level(cfg.renormalized ? cfg.omega_e_tilde : cfg.omega_e);
        sys.couplings.push_back({pauli_minus(), f});
        const DressingKind kind = cfg.renormalized ? DressingKind::Renormalized
                                                   : DressingKind::Plain;
        const RwaResolvent resolvent(f, sys.free_h(0, 0).real(), lambda, kind, basis, model);

        // reference Hamiltonian: for the renormalized kind this is the
        // sector-assembled renormalized matrix, i.e. the plain model at the
        // exactly shifted bare energy ω̃_e + λ²‖f‖²₋₁
        double energy = sys.free_h(0, 0).real();
        if (cfg.renormalized)
            energy += lambda * lambda * grid_norm_squared(model, f, 1.0);
        SpinSystem ref_sys = SpinSystem::two_level(energy);
        ref_sys.couplings.push_back({pauli_minus(), f});
        const CompositeOperator h = build_rwa(ref_sys, lambda, basis, model);
        if (cfg.export_operator && result.operator_dumps.empty())
            result.operator_dumps.emplace_back("hamiltonian", h.entries);

        for (const Complex z : zs) {
            double max_rel = 0.0;
            for (int t = 0; t < 8; ++t) {
                const Vector rhs = random_vector(rng, 2 * fd);
                const Vector x = resolvent.apply_flat(z, rhs);
                Vector residual = h.entries * x - z * x - rhs;
                max_rel = std::max(max_rel, residual.norm() / rhs.norm());
            }
            worst = std::max(worst, max_rel);
            table.rows.push_back({lambda, z.real(), z.imag(), max_rel});
        }
    }

    result.summary["max_relative_residual"] = worst;
    result.summary["threshold"] = cfg.tolerance;
    const bool pass = worst <= cfg.tolerance;
    result.summary["pass"] = pass;
    result.exit_code = pass ? 0 : 1;
    result.tables.emplace_back("data", std::move(table));
    return result;
}

ExperimentResult run_self_energy(const ExperimentConfig& cfg) {
    const FieldModel model = cfg.make_field_model();
    const FormFactor f = cfg.make_form_factor(model);
    const DressingKind kind = cfg.renormalized ? DressingKind::Renormalized
                                               : DressingKind::Plain;

    ExperimentResult result;
    result.summary["schema_version"] = kSchemaVersion;
    result.summary["subcommand"] = "self-energy";
    result.summary["config"] = config_echo(cfg);

    std::vector<Complex> zs = cfg.z_list;
    if (zs.empty()) zs = {Complex(-1.0, 0.0), Complex(0.5, 0.5), Complex(0.5, -0.5)};

    CsvTable table;
    table.columns = {"re_z", "im_z", "re_sigma", "im_sigma"};
    bool herglotz_ok = true;
    for (const Complex z : zs) {
        const SelfEnergyScalar sigma = self_energy(f, z, kind, model);
        table.rows.push_back({z.real(), z.imag(), sigma.value.real(), sigma.value.imag()});
        if (z.imag() != 0.0 && sigma.value.imag() * z.imag() < -1e-12)
            herglotz_ok = false;
    }

    result.summary["herglotz"] = herglotz_ok;
    result.summary["kind"] = cfg.renormalized ? "renormalized" : "plain";
    result.summary["pass"] = herglotz_ok;
    result.exit_code = herglotz_ok ? 0 : 1;
    result.tables.emplace_back("data", std::move(table));
    return result;
}

ExperimentResult run_bound_state(const ExperimentConfig& cfg) {
    const FieldModel model = cfg.make_field_model();
    const FormFactor f = cfg.make_form_factor(model);

    ExperimentResult result;
    result.summary["schema_version"] = kSchemaVersion;
    result.summary["subcommand"] = "bound-state";
    result.summary["config"] = config_echo(cfg);

    std::vector<double> lambdas = cfg.lambdas;
    if (lambdas.empty()) lambdas = {cfg.lambda};

    CsvTable table;
    table.columns = {"lambda", "energy", "residual", "iterations"};
    Json reports = Json::array();
    bool pass = true;
    double previous = kDivergent;
    for (double lambda : lambdas) {
        const auto root = bound_state(f, cfg.omega_e, lambda, model);
        Json r;
        r["lambda"] = lambda;
        r["omega_e"] = cfg.omega_e;
        if (root) {
            r["energy"] = root->energy;
            r["residual"] = root->residual;
            r["iterations"] = root->iterations;
            table.rows.push_back({lambda, root->energy, root->residual,
                                  static_cast<double>(root->iterations)});
            // Σ_f > 0 below the gap: stronger coupling pushes the root down
            if (previous != kDivergent && root->energy > previous + 1e-12) pass = false;
            previous = root->energy;
        } else {
            r["energy"] = nullptr;
        }
        reports.push_back(r);
    }

    result.summary["reports"] = reports;
    result.summary["pass"] = pass;
    result.exit_code = pass ? 0 : 1;
    result.tables.emplace_back("data", std::move(table));
    return result;
}

ExperimentResult run_growth_cert(const ExperimentConfig& cfg) {
    const FieldModel model = cfg.make_field_model();
    const FormFactor f = cfg.make_form_factor(model);
    const double s = std::clamp(cfg.effective_declared_s(f), 1.0, 2.0);

    const GrowthCertificate cert = growth_certificate(model, f, s, cfg.n_points);

    ExperimentResult result;
    result.summary["schema_version"] = kSchemaVersion;
    result.summary["subcommand"] = "growth-cert";
    result.summary["config"] = config_echo(cfg);
    result.summary["s"] = cert.s;
    result.summary["r"] = cert.r;
    result.summary["constant"] = cert.constant;
    result.summary["fitted_decay"] = cert.fitted_decay;
    result.summary["hypothesis_holds"] = cert.hypothesis_holds;
    result.summary["max_bound_violation"] = cert.max_bound_violation;
    result.summary["pass"] = cert.hypothesis_holds;
    result.exit_code = cert.hypothesis_holds ? 0 : 1;

    CsvTable table;
    table.columns = {"n", "integral", "bound", "margin"};
    for (std::size_t i = 0; i < cert.integrals.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double bound = cert.constant * std::pow(n, cert.r - cert.s);
        table.rows.push_back({n, cert.integrals[i], bound, bound - cert.integrals[i]});
    }
    result.tables.emplace_back("data", std::move(table));
    return result;
}

ExperimentResult run_converge(const ExperimentConfig& cfg) {
    const FieldModel model = cfg.make_field_model();
    const FockBasis basis = cfg.make_basis();
    const FormFactor f = cfg.make_form_factor(model);

    if (cfg.cutoffs.empty())
        throw Error("config-error", "converge needs experiment.cutoffs");
    const RegularizationSequence seq = make_cutoff_sequence(model, f, cfg.cutoffs);

    ConvergenceOptions options;
    options.z = cfg.z_list.empty() ? Complex(1.0, 1.0) : cfg.z_list.front();
    options.lambda = cfg.lambda;
    options.omega_e = cfg.renormalized ? cfg.omega_e_tilde : cfg.omega_e;
    options.final_target = cfg.final_target;
    options.seed = cfg.seed;

    RunKind kind = RunKind::RwaPlain;
    if (cfg.renormalized) kind = RunKind::RwaRenormalized;
    else if (cfg.model_kind == "gsb" || cfg.model_kind == "spin-boson") kind = RunKind::Gsb;

    std::vector<double> schedule;
    const std::vector<double>* schedule_ptr = nullptr;
    if (kind == RunKind::RwaRenormalized) {
        schedule = renormalization_schedule(model, seq, cfg.omega_e_tilde, cfg.lambda);
        schedule_ptr = &schedule;
    }

    const ConvergenceReport report =
        run_convergence(seq, kind, model, basis, options, schedule_ptr);

    ExperimentResult result;
    result.summary["schema_version"] = kSchemaVersion;
    result.summary["subcommand"] = "converge";
    result.summary["config"] = config_echo(cfg);
    result.summary["z"] = {{"re", report.z.real()}, {"im", report.z.imag()}};
    result.summary["fitted_constant"] = report.fitted_constant;
    result.summary["final_norm_distance"] = report.final_norm;
    result.summary["final_strong_distance"] = report.final_strong;
    result.summary["monotone"] = report.monotone;
    result.summary["vacuum_self_energy_growth"] = report.vacuum_growth;
    result.summary["pass"] = report.pass;
    result.exit_code = report.pass ? 0 : 1;

    CsvTable table;
    table.columns = {"cutoff", "form_distance", "distance_norm", "distance_strong",
                     "chain_bound", "bound_ratio", "abs_vacuum_self_energy",
                     "schedule_energy"};
    for (const auto& step : report.steps)
        table.rows.push_back({step.cutoff, step.form_distance, step.distance_norm,
                              step.distance_strong, step.chain_bound, step.bound_ratio,
                              std::abs(step.vacuum_self_energy), step.schedule_energy});
    result.tables.emplace_back("data", std::move(table));
    return result;
}

ExperimentResult run_spectrum_scan(const ExperimentConfig& cfg) {
    const FieldModel model = cfg.make_field_model();
    const FockBasis basis = cfg.make_basis();
    const FormFactor f = cfg.make_form_factor(model);
    const DressingKind kind = cfg.renormalized ? DressingKind::Renormalized
                                               : DressingKind::Plain;
    const double energy = cfg.renormalized ? cfg.omega_e_tilde : cfg.omega_e;

    ExperimentResult result;
    result.summary["schema_version"] = kSchemaVersion;
    result.summary["subcommand"] = "spectrum-scan";
    result.summary["config"] = config_echo(cfg);

    std::vector<Complex> zs = cfg.z_list;
    if (zs.empty()) {
        // default scan: two rows of nonreal points around the spectrum
        for (int i = 0; i < cfg.n_points; ++i) {
            const double re = -1.0 + 4.0 * i / std::max(1, cfg.n_points - 1);
            zs.emplace_back(re, 0.5);
            zs.emplace_back(re, -0.25);
        }
    }

    CsvTable table;
    table.columns = {"re_z", "im_z", "re_sigma", "im_sigma",
                     "propagator_inverse_norm", "norm_times_imz"};
    double worst_product = 0.0;
    for (const Complex z : zs) {
        if (z.imag() == 0.0)
            throw Error("config-error", "spectrum-scan needs nonreal z points");
        const Complex sigma = self_energy_grid(f, z, kind, model);
        const PropagatorHandle g =
            propagator(f, z, energy, cfg.lambda, kind, basis, model);
        const double inverse_norm = g.inverse_norm_estimate(cfg.seed);
        const double product = inverse_norm * std::abs(z.imag());
        worst_product = std::max(worst_product, product);
        table.rows.push_back({z.real(), z.imag(), sigma.real(), sigma.imag(),
                              inverse_norm, product});
    }

    result.summary["max_norm_times_imz"] = worst_product;
    const bool pass = worst_product <= 1.0 + 1e-8;
    result.summary["pass"] = pass;
    result.exit_code = pass ? 0 : 1;
    result.tables.emplace_back("data", std::move(table));
    return result;
}

ExperimentResult run_experiment(const std::string& subcommand, const ExperimentConfig& cfg) {
    if (subcommand == "verify-bounds") return run_verify_bounds(cfg);
    if (subcommand == "resolvent-check") return run_resolvent_check(cfg);
    if (subcommand == "self-energy") return run_self_energy(cfg);
    if (subcommand == "bound-state") return run_bound_state(cfg);
    if (subcommand == "growth-cert") return run_growth_cert(cfg);
    if (subcommand == "converge") return run_converge(cfg);
    if (subcommand == "spectrum-scan") return run_spectrum_scan(cfg);
    throw Error("config-error", "unknown subcommand '" + subcommand + "'");
}

void write_result(const std::string& subcommand, const ExperimentConfig& cfg,
                  const ExperimentResult& result) {
    std::filesystem::create_directories(cfg.out_dir);
    write_json(cfg.out_dir / (subcommand + "_summary.json"), result.summary);
    for (const auto& [name, table] : result.tables)
        write_csv(cfg.out_dir / (subcommand + "_" + name + ".csv"), table);
    for (const auto& [name, matrix] : result.operator_dumps)
        export_coordinate(cfg.out_dir / (subcommand + "_" + name + ".coo"), matrix);
}

} // namespace gsb
