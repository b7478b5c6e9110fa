#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "gsb/config.hpp"
#include "gsb/experiments.hpp"

using namespace gsb;

namespace {

const char* kBaseConfig = R"(# laboratory defaults for the test run
[field]
dispersion = klein-gordon
mass = 1.0
half_width = 10.0
modes = 8

[form_factor]
family = wqed
declared_s = 1.0

[truncation]
n_max = 2

[model]
kind = rwa
lambda = 0.4
omega_e = 0.9

[experiment]
seed = 31
trials = 100
tolerance = 1e-10

[output]
dir = out-test
)";

ExperimentConfig base_config() {
    return ExperimentConfig::from_file(ConfigFile::parse_string(kBaseConfig, "test.ini"));
}

} // namespace

TEST_CASE("config parsing") {
    const ConfigFile file = ConfigFile::parse_string(kBaseConfig, "test.ini");
    CHECK(file.get("field.dispersion", "") == "klein-gordon");
    CHECK(file.get_double("model.lambda", 0.0) == 0.4);
    CHECK(file.get_int("truncation.n_max", 0) == 2);

    const ExperimentConfig cfg = base_config();
    CHECK(cfg.modes == 8);
    CHECK(cfg.family == "wqed");
    CHECK(cfg.seed == 31);
}

TEST_CASE("config diagnostics carry line numbers") {
    CHECK_THROWS_WITH_AS(
        static_cast<void>(ConfigFile::parse_string("[field]\nno equals here\n", "bad.ini")),
        doctest::Contains("bad.ini:2"), Error);
    CHECK_THROWS_WITH_AS(
        static_cast<void>(ConfigFile::parse_string("key = 1\n", "bad.ini")),
        doctest::Contains("outside any [section]"), Error);
    const ConfigFile file = ConfigFile::parse_string("[a]\nx = nope\n", "bad.ini");
    CHECK_THROWS_WITH_AS(static_cast<void>(file.get_double("a.x", 0.0)),
                         doctest::Contains("expected a number"), Error);
}

TEST_CASE("complex literals") {
    CHECK(parse_complex("1.5") == Complex(1.5, 0.0));
    CHECK(parse_complex("1+1i") == Complex(1.0, 1.0));
    CHECK(parse_complex("-0.5+0.25i") == Complex(-0.5, 0.25));
    CHECK(parse_complex("2-3i") == Complex(2.0, -3.0));
    CHECK(parse_complex("0.7i") == Complex(0.0, 0.7));
    CHECK(parse_complex("-i") == Complex(0.0, -1.0));
    CHECK(parse_complex("1e-2+1e-3i") == Complex(0.01, 0.001));
    CHECK_THROWS_AS(static_cast<void>(parse_complex("pear")), Error);
}

TEST_CASE("tabulated CSV round trip") {
    const auto path = std::filesystem::temp_directory_path() / "gsb_tab_test.csv";
    {
        std::ofstream out(path);
        out << "k,re,im\n";
        for (int i = 0; i <= 20; ++i) {
            const double k = -5.0 + 0.5 * i;
            out << k << "," << 1.0 / (1.0 + k * k) << "," << 0.1 * k << "\n";
        }
    }
    std::vector<double> k;
    std::vector<Complex> values;
    load_tabulated_csv(path, k, values);
    CHECK(k.size() == 21);
    CHECK(values[10] == Complex(1.0, 0.0));

    const FieldModel model = FieldModel::uniform(Dispersion::klein_gordon(1.0), 5.0, 40);
    const FormFactor f = FormFactor::tabulated(model, k, values,
                                               TailDescriptor{2.0, 1.0}, 1.0);
    CHECK(f.amplitudes().size() == 40);
    CHECK(!is_divergent(weighted_norm_squared(model, f, 1.0)));
    std::filesystem::remove(path);
}

TEST_CASE("verify-bounds runner") {
    ExperimentConfig cfg = base_config();

    SUBCASE("default config passes") {
        const ExperimentResult result = run_verify_bounds(cfg);
        CHECK(result.exit_code == 0);
        CHECK(result.summary["pass"] == true);
        for (const auto& check : result.summary["checks"])
            CHECK(check["pass"] == true);
    }

    SUBCASE("corrupted adjoint pairing fails") {
        cfg.fault_injection = "corrupt-adjoint";
        const ExperimentResult result = run_verify_bounds(cfg);
        CHECK(result.exit_code == 1);
        CHECK(result.summary["pass"] == false);
    }

    SUBCASE("zero form factor passes trivially") {
        cfg.family = "zero";
        const ExperimentResult result = run_verify_bounds(cfg);
        CHECK(result.exit_code == 0);
    }
}

TEST_CASE("resolvent-check runner") {
    ExperimentConfig cfg = base_config();
    cfg.z_list = {Complex(1.0, 1.0), Complex(-0.5, 0.25)};

    const ExperimentResult result = run_resolvent_check(cfg);
    CHECK(result.exit_code == 0);
    CHECK(result.summary["max_relative_residual"].get<double>() <= 1e-10);

    SUBCASE("lambda = 0 residuals at machine scale") {
        cfg.lambdas = {0.0};
        const ExperimentResult free = run_resolvent_check(cfg);
        CHECK(free.summary["max_relative_residual"].get<double>() <= 1e-13);
    }

    SUBCASE("real z below the sector spectrum still succeeds") {
        cfg.z_list = {Complex(-2.0, 0.0)};
        const ExperimentResult real_z = run_resolvent_check(cfg);
        CHECK(real_z.exit_code == 0);
    }
}

TEST_CASE("self-energy, bound-state and growth-cert runners") {
    ExperimentConfig cfg = base_config();

    SUBCASE("self-energy emits the z table and passes Herglotz") {
        cfg.z_list = {Complex(-1.0, 0.0), Complex(0.5, 0.5), Complex(0.5, -0.5)};
        const ExperimentResult result = run_self_energy(cfg);
        CHECK(result.exit_code == 0);
        CHECK(result.tables.at(0).second.rows.size() == 3);
    }

    SUBCASE("bound-state sweep is monotone") {
        cfg.half_width = 20.0;
        cfg.modes = 200;
        cfg.omega_e = 0.5;
        cfg.lambdas = {0.1, 0.2, 0.3};
        const ExperimentResult result = run_bound_state(cfg);
        CHECK(result.exit_code == 0);
        const auto& rows = result.tables.at(0).second.rows;
        REQUIRE(rows.size() == 3);
        CHECK(rows[0][1] > rows[1][1]);
        CHECK(rows[1][1] > rows[2][1]);
    }

    SUBCASE("growth certificate on the flat coupling") {
        cfg.family = "flat";
        cfg.declared_s = 2.0;
        cfg.n_points = 32;
        const ExperimentResult result = run_growth_cert(cfg);
        CHECK(result.exit_code == 0);
        CHECK(result.summary["r"].get<double>() == doctest::Approx(1.0));
    }
}

TEST_CASE("converge and spectrum-scan runners") {
    ExperimentConfig cfg = base_config();
    cfg.half_width = 20.0;
    cfg.modes = 10;
    cfg.cutoffs = {4.0, 10.0, 20.0};
    cfg.final_target = 1e-9;

    SUBCASE("wqed plain converge passes") {
        const ExperimentResult result = run_converge(cfg);
        CHECK(result.exit_code == 0);
        CHECK(result.summary["monotone"] == true);
    }

    SUBCASE("missing cutoffs is a config error") {
        cfg.cutoffs.clear();
        CHECK_THROWS_WITH_AS(static_cast<void>(run_converge(cfg)),
                             doctest::Contains("cutoffs"), Error);
    }

    SUBCASE("spectrum scan keeps the propagator bound") {
        cfg.n_points = 10;
        const ExperimentResult result = run_spectrum_scan(cfg);
        CHECK(result.exit_code == 0);
        CHECK(result.summary["max_norm_times_imz"].get<double>() <= 1.0 + 1e-8);
    }
}

TEST_CASE("deterministic payloads for a fixed seed") {
    ExperimentConfig cfg = base_config();
    cfg.z_list = {Complex(0.4, 0.7)};

    for (const std::string sub : {"verify-bounds", "self-energy", "spectrum-scan"}) {
        const ExperimentResult a = run_experiment(sub, cfg);
        const ExperimentResult b = run_experiment(sub, cfg);
        CHECK(json_payload(a.summary) == json_payload(b.summary));
        REQUIRE(a.tables.size() == b.tables.size());
        for (std::size_t i = 0; i < a.tables.size(); ++i)
            CHECK(a.tables[i].second.payload() == b.tables[i].second.payload());
    }

    SUBCASE("different seeds change random-trial summaries") {
        const ExperimentResult a = run_experiment("verify-bounds", cfg);
        cfg.seed += 1;
        const ExperimentResult b = run_experiment("verify-bounds", cfg);
        CHECK(json_payload(a.summary) != json_payload(b.summary));
    }
}

TEST_CASE("write_result layout") {
    ExperimentConfig cfg = base_config();
    cfg.out_dir = std::filesystem::temp_directory_path() / "gsb_out_test";
    std::filesystem::remove_all(cfg.out_dir);
    cfg.z_list = {Complex(-1.0, 0.0)};

    const ExperimentResult result = run_self_energy(cfg);
    write_result("self-energy", cfg, result);

    CHECK(std::filesystem::exists(cfg.out_dir / "self-energy_summary.json"));
    CHECK(std::filesystem::exists(cfg.out_dir / "self-energy_data.csv"));

    // timestamp is isolated: JSON first key line, CSV first comment line
    std::ifstream json_in(cfg.out_dir / "self-energy_summary.json");
    std::string line;
    std::getline(json_in, line);
    CHECK(line == "{");
    std::getline(json_in, line);
    CHECK(line.find("generated_at") != std::string::npos);

    std::ifstream csv_in(cfg.out_dir / "self-energy_data.csv");
    std::getline(csv_in, line);
    CHECK(line.rfind("# generated", 0) == 0);
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("unknown subcommand") {
    CHECK_THROWS_WITH_AS(static_cast<void>(run_experiment("fly", base_config())),
                         doctest::Contains("unknown subcommand"), Error);
}

TEST_CASE("declared_s cross-check rejects misdeclared form factors") {
    ExperimentConfig cfg = base_config();
    cfg.family = "flat";
    cfg.declared_s = 1.0;   // flat coupling only lives in H_{-s} for s > 1
    const FieldModel model = cfg.make_field_model();
    CHECK_THROWS_WITH_AS(static_cast<void>(cfg.make_form_factor(model)),
                         doctest::Contains("diverges"), Error);

    cfg.declared_s = 2.0;
    CHECK_NOTHROW(static_cast<void>(cfg.make_form_factor(model)));
}

TEST_CASE("generic GSB model spec with operator export") {
    ExperimentConfig cfg = base_config();
    cfg.model_kind = "gsb";
    cfg.declared_s = 1.0;
    // explicit two-level matrices: A = diag(0.9, 0.1), B = σ_x with a phase
    cfg.a_matrix = {Complex(0.9), Complex(0.0), Complex(0.0), Complex(0.1)};
    cfg.b_matrix = {Complex(0.0), Complex(0.0, 1.0), Complex(0.0, -1.0), Complex(0.0)};
    cfg.export_operator = true;
    cfg.out_dir = std::filesystem::temp_directory_path() / "gsb_export_test";
    std::filesystem::remove_all(cfg.out_dir);

    const ExperimentResult result = run_verify_bounds(cfg);
    CHECK(result.exit_code == 0);
    REQUIRE(result.operator_dumps.size() == 1);

    bool saw_assembly = false;
    for (const auto& check : result.summary["checks"]) {
        if (check["check"] == "gsb-assembly") {
            saw_assembly = true;
            CHECK(check["pass"] == true);
            CHECK(check["details"]["hermiticity_deviation"].get<double>() == 0.0);
            CHECK(check["details"]["klmn_threshold_truncated_estimate"].get<double>() > 0.0);
        }
    }
    CHECK(saw_assembly);

    write_result("verify-bounds", cfg, result);
    const auto coo = cfg.out_dir / "verify-bounds_hamiltonian.coo";
    REQUIRE(std::filesystem::exists(coo));
    // header row: rows cols nnz consistent with the dump
    std::ifstream in(coo);
    Index rows = 0, cols = 0;
    long long nnz = 0;
    in >> rows >> cols >> nnz;
    CHECK(rows == cols);
    CHECK(rows == 2 * cfg.make_basis().dimension());
    CHECK(nnz == static_cast<long long>(result.operator_dumps[0].second.nonZeros()));
    std::filesystem::remove_all(cfg.out_dir);

    SUBCASE("non-square matrix spec is rejected") {
        cfg.a_matrix.pop_back();
        CHECK_THROWS_WITH_AS(static_cast<void>(run_verify_bounds(cfg)),
                             doctest::Contains("square matrix"), Error);
    }
}
