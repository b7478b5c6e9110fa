// config.hpp — experiment configuration: INI-style sectioned key/value files
// with line-level diagnostics, and the assembled experiment inputs.

#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsb/field_model.hpp"
#include "gsb/fock_space.hpp"
#include "gsb/types.hpp"

namespace gsb {

/// Raw sectioned key/value view of a config file. Keys are "section.key".
class ConfigFile {
public:
    static ConfigFile parse_file(const std::filesystem::path& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key) const;          // empty when absent
    std::vector<Complex> get_complex_list(const std::string& key) const; // "a+bi" entries

    void set(const std::string& key, const std::string& value);   // flag overrides
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

Complex parse_complex(const std::string& text);   // "a+bi" / "a-bi" / "a"

/// Fully assembled experiment inputs, deterministic given the seed.
struct ExperimentConfig {
    // field
    std::string dispersion_family = "klein-gordon";
    double mass = 1.0;
    double half_width = 25.0;
    int modes = 16;
    // form factor
    std::string family = "wqed";
    Complex amplitude{1.0, 0.0};
    double emitter_position = 0.0;
    double width = 1.0;                 // gaussian
    std::string tabulated_path;
    std::optional<double> tail_exponent;
    std::optional<double> tail_coefficient;
    std::optional<double> declared_s;   // overrides the family default
    // truncation
    int n_max = 3;
    std::size_t basis_limit = 2'000'000;
    // model
    std::string model_kind = "rwa";     // gsb | spin-boson | rwa | dephasing
    double lambda = 0.5;
    double omega_e = 1.0;
    double omega_g = 0.0;
    double omega_e_tilde = 1.0;
    bool renormalized = false;
    std::vector<Complex> a_matrix;      // row-major atomic Hamiltonian (optional)
    std::vector<Complex> b_matrix;      // row-major coupling matrix (optional)
    // experiment
    std::uint64_t seed = 1;
    int trials = 1000;
    std::vector<Complex> z_list;
    std::vector<double> cutoffs;
    std::vector<double> lambdas;
    double tolerance = 1e-10;
    double final_target = 1e-3;
    int n_points = 64;
    std::string fault_injection;        // test fixture hooks, e.g. "corrupt-adjoint"
    // output
    std::filesystem::path out_dir = "out";
    bool export_operator = false;       // coordinate text dump of the Hamiltonian

    static ExperimentConfig from_file(const ConfigFile& file);

    FieldModel make_field_model() const;
    FormFactor make_form_factor(const FieldModel& model) const;
    FockBasis make_basis() const;
    /// Config override if present, else the family's declared scale.
    double effective_declared_s(const FormFactor& f) const {
        return declared_s.value_or(f.declared_s());
    }
};

/// CSV with columns k, Re f, Im f.
void load_tabulated_csv(const std::filesystem::path& path, std::vector<double>& k,
                        std::vector<Complex>& values);

} // namespace gsb
