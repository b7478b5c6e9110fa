#include "gsb/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace gsb {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("config-error", "cannot open config " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path.string());
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw Error("config-error", origin + ":" + std::to_string(line_no) +
                                                ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw Error("config-error", origin + ":" + std::to_string(line_no) +
                                                ": empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error("config-error", origin + ":" + std::to_string(line_no) +
                                            ": expected key = value, got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw Error("config-error", origin + ":" + std::to_string(line_no) +
                                            ": empty key");
        if (section.empty())
            throw Error("config-error", origin + ":" + std::to_string(line_no) +
                                            ": key '" + key + "' outside any [section]");
        cfg.values_[section + "." + key] = value;
    }
    return cfg;
}

bool ConfigFile::has(const std::string& key) const { return values_.count(key) > 0; }

std::string ConfigFile::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw Error("config-error", "field '" + key + "': expected a number, got '" +
                                        it->second + "'");
    }
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw Error("config-error", "field '" + key + "': expected an integer, got '" +
                                        it->second + "'");
    }
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error("config-error", "field '" + key + "': expected a boolean, got '" + it->second + "'");
}

std::vector<double> ConfigFile::get_list(const std::string& key) const {
    std::vector<double> out;
    const auto it = values_.find(key);
    if (it == values_.end()) return out;
    for (const auto& item : split_list(it->second)) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error("config-error", "field '" + key + "': bad list entry '" + item + "'");
        }
    }
    return out;
}

std::vector<Complex> ConfigFile::get_complex_list(const std::string& key) const {
    std::vector<Complex> out;
    const auto it = values_.find(key);
    if (it == values_.end()) return out;
    for (const auto& item : split_list(it->second)) out.push_back(parse_complex(item));
    return out;
}

void ConfigFile::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

Complex parse_complex(const std::string& text) {
    // forms: "a", "a+bi", "a-bi", "bi"
    std::string t = trim(text);
    if (t.empty()) throw Error("config-error", "empty complex literal");
    const bool has_i = t.back() == 'i' || t.back() == 'I';
    if (!has_i) {
        try {
            std::size_t pos = 0;
            const double re = std::stod(t, &pos);
            if (pos != t.size()) throw std::invalid_argument("trailing");
            return Complex(re, 0.0);
        } catch (const std::exception&) {
            throw Error("config-error", "bad complex literal '" + text + "'");
        }
    }
    t.pop_back();  // strip i
    // split at the last +/- not in position 0 and not part of an exponent
    std::size_t split = std::string::npos;
    for (std::size_t p = t.size(); p-- > 1;) {
        if ((t[p] == '+' || t[p] == '-') && t[p - 1] != 'e' && t[p - 1] != 'E') {
            split = p;
            break;
        }
    }
    try {
        if (split == std::string::npos) {
            const std::string imag = (t.empty() || t == "+" || t == "-") ? t + "1" : t;
            return Complex(0.0, std::stod(imag));
        }
        const double re = std::stod(t.substr(0, split));
        std::string imag = t.substr(split);
        if (imag == "+" || imag == "-") imag += "1";
        return Complex(re, std::stod(imag));
    } catch (const std::exception&) {
        throw Error("config-error", "bad complex literal '" + text + "'");
    }
}

ExperimentConfig ExperimentConfig::from_file(const ConfigFile& file) {
    ExperimentConfig cfg;
    cfg.dispersion_family = file.get("field.dispersion", cfg.dispersion_family);
    cfg.mass = file.get_double("field.mass", cfg.mass);
    cfg.half_width = file.get_double("field.half_width", cfg.half_width);
    cfg.modes = file.get_int("field.modes", cfg.modes);

    cfg.family = file.get("form_factor.family", cfg.family);
    if (file.has("form_factor.amplitude"))
        cfg.amplitude = parse_complex(file.get("form_factor.amplitude", "1"));
    cfg.emitter_position = file.get_double("form_factor.emitter_position", cfg.emitter_position);
    cfg.width = file.get_double("form_factor.width", cfg.width);
    cfg.tabulated_path = file.get("form_factor.path", cfg.tabulated_path);
    if (file.has("form_factor.tail_exponent"))
        cfg.tail_exponent = file.get_double("form_factor.tail_exponent", 0.0);
    if (file.has("form_factor.tail_coefficient"))
        cfg.tail_coefficient = file.get_double("form_factor.tail_coefficient", 0.0);
    if (file.has("form_factor.declared_s"))
        cfg.declared_s = file.get_double("form_factor.declared_s", 0.0);

    cfg.n_max = file.get_int("truncation.n_max", cfg.n_max);
    cfg.basis_limit = static_cast<std::size_t>(
        file.get_double("truncation.basis_limit", static_cast<double>(cfg.basis_limit)));

    cfg.model_kind = file.get("model.kind", cfg.model_kind);
    cfg.lambda = file.get_double("model.lambda", cfg.lambda);
    cfg.omega_e = file.get_double("model.omega_e", cfg.omega_e);
    cfg.omega_g = file.get_double("model.omega_g", cfg.omega_g);
    cfg.omega_e_tilde = file.get_double("model.omega_e_tilde", cfg.omega_e);
    cfg.renormalized = file.get_bool("model.renormalized", cfg.renormalized);
    cfg.a_matrix = file.get_complex_list("model.a");
    cfg.b_matrix = file.get_complex_list("model.b");

    cfg.seed = static_cast<std::uint64_t>(
        file.get_double("experiment.seed", static_cast<double>(cfg.seed)));
    cfg.trials = file.get_int("experiment.trials", cfg.trials);
    cfg.z_list = file.get_complex_list("experiment.z");
    cfg.cutoffs = file.get_list("experiment.cutoffs");
    cfg.lambdas = file.get_list("experiment.lambdas");
    cfg.tolerance = file.get_double("experiment.tolerance", cfg.tolerance);
    cfg.final_target = file.get_double("experiment.final_target", cfg.final_target);
    cfg.n_points = file.get_int("experiment.n_points", cfg.n_points);
    cfg.fault_injection = file.get("experiment.fault_injection", cfg.fault_injection);

    cfg.out_dir = file.get("output.dir", cfg.out_dir.string());
    cfg.export_operator = file.get_bool("output.export_operator", cfg.export_operator);
    return cfg;
}

FieldModel ExperimentConfig::make_field_model() const {
    if (dispersion_family == "klein-gordon")
        return FieldModel::uniform(Dispersion::klein_gordon(mass), half_width, modes);
    if (dispersion_family == "constant")
        return FieldModel::uniform(Dispersion::constant(mass), half_width, modes);
    throw Error("config-error", "unknown dispersion family '" + dispersion_family + "'");
}

FormFactor ExperimentConfig::make_form_factor(const FieldModel& model) const {
    const auto cross_check = [&model, this](const FormFactor& f) {
        // declared_s is metadata, not trusted: ‖f‖₋ₛ must be finite there
        const double s = effective_declared_s(f);
        if (is_divergent(weighted_norm_squared(model, f, s)))
            throw Error("config-error",
                        "form factor declared s = " + std::to_string(s) +
                            " but ‖f‖₋ₛ diverges at that scale");
        return f;
    };
    if (family == "flat") return cross_check(FormFactor::flat(model, amplitude));
    if (family == "wqed") return cross_check(FormFactor::wqed(model, emitter_position));
    if (family == "gaussian") return cross_check(FormFactor::gaussian(model, width, amplitude));
    if (family == "zero") return cross_check(FormFactor::zero(model));
    if (family == "tabulated") {
        if (tabulated_path.empty())
            throw Error("config-error", "tabulated form factor needs form_factor.path");
        std::vector<double> k;
        std::vector<Complex> values;
        load_tabulated_csv(tabulated_path, k, values);
        std::optional<TailDescriptor> tail;
        if (tail_exponent && tail_coefficient)
            tail = TailDescriptor{*tail_exponent, *tail_coefficient};
        return cross_check(FormFactor::tabulated(model, k, values, tail,
                                                  declared_s.value_or(0.0)));
    }
    throw Error("config-error", "unknown form factor family '" + family + "'");
}

FockBasis ExperimentConfig::make_basis() const {
    return FockBasis::build(modes, n_max, basis_limit);
}

void load_tabulated_csv(const std::filesystem::path& path, std::vector<double>& k,
                        std::vector<Complex>& values) {
    std::ifstream in(path);
    if (!in) throw Error("config-error", "cannot open CSV " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        // allow a header row
        if (line_no == 1 && t.find_first_not_of("0123456789+-.eE, \t") != std::string::npos)
            continue;
        const auto parts = split_list(t);
        if (parts.size() != 3)
            throw Error("config-error", path.string() + ":" + std::to_string(line_no) +
                                            ": expected 'k, Re f, Im f'");
        try {
            k.push_back(std::stod(parts[0]));
            values.emplace_back(std::stod(parts[1]), std::stod(parts[2]));
        } catch (const std::exception&) {
            throw Error("config-error", path.string() + ":" + std::to_string(line_no) +
                                            ": bad numeric field");
        }
    }
    if (k.size() < 2)
        throw Error("config-error", path.string() + ": needs at least two rows");
}

} // namespace gsb
