#include "gsb/field_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gsb/quadrature.hpp"

namespace gsb {

Dispersion Dispersion::klein_gordon(double mass) {
    if (!(mass > 0.0)) throw Error("domain-error", "klein-gordon dispersion needs m > 0");
    return Dispersion(Family::KleinGordon, mass);
}

Dispersion Dispersion::constant(double value) {
    if (!(value > 0.0)) throw Error("domain-error", "constant dispersion needs m > 0");
    return Dispersion(Family::Constant, value);
}

double Dispersion::operator()(double k) const {
    switch (family_) {
    case Family::KleinGordon: return std::sqrt(k * k + mass_ * mass_);
    case Family::Constant: return mass_;
    }
    return mass_;
}

double Dispersion::growth_exponent() const {
    return family_ == Family::KleinGordon ? 1.0 : 0.0;
}

double Dispersion::growth_coefficient() const {
    return family_ == Family::KleinGordon ? 1.0 : mass_;
}

std::string Dispersion::name() const {
    return family_ == Family::KleinGordon ? "klein-gordon" : "constant";
}

FieldModel::FieldModel(const Dispersion& d, double half_width,
                       std::vector<double> points, std::vector<double> weights)
    : dispersion_fn_(d), half_width_(half_width),
      points_(std::move(points)), weights_(std::move(weights)) {
    omega_.resize(points_.size());
    omega_min_ = kDivergent;
    for (std::size_t j = 0; j < points_.size(); ++j) {
        if (weights_[j] <= 0.0) throw Error("domain-error", "quadrature weights must be positive");
        if (j > 0 && points_[j] <= points_[j - 1])
            throw Error("domain-error", "grid points must be strictly increasing");
        omega_[j] = dispersion_fn_(points_[j]);
        if (omega_[j] < mass_gap() - 1e-14)
            throw Error("domain-error", "dispersion below the mass gap on the grid");
        omega_min_ = std::min(omega_min_, omega_[j]);
    }
}

FieldModel FieldModel::uniform(const Dispersion& dispersion, double half_width, int modes) {
    if (modes < 1) throw Error("domain-error", "need at least one grid mode");
    if (!(half_width > 0.0)) throw Error("domain-error", "grid half-width must be positive");
    const double h = 2.0 * half_width / modes;
    std::vector<double> pts(modes), w(modes, h);
    for (int j = 0; j < modes; ++j) pts[j] = -half_width + (j + 0.5) * h;
    return FieldModel(dispersion, half_width, std::move(pts), std::move(w));
}

FormFactor FormFactor::flat(const FieldModel& model, Complex amplitude) {
    FormFactor f;
    f.amplitudes_.assign(model.mode_count(), amplitude);
    f.declared_s_ = 2.0;
    f.tail_ = TailDescriptor{0.0, std::norm(amplitude)};
    f.profile_ = [amplitude](double) { return amplitude; };
    f.family_ = "flat";
    return f;
}

FormFactor FormFactor::wqed(const FieldModel& model, double emitter_position) {
    const double m = model.mass_gap();
    FormFactor f;
    f.amplitudes_.resize(model.mode_count());
    for (int j = 0; j < model.mode_count(); ++j) {
        const double k = model.points()[j];
        const double mag = std::pow(k * k + m * m, -0.25);
        f.amplitudes_[j] = std::polar(mag, -k * emitter_position);
    }
    f.declared_s_ = 1.0;
    f.tail_ = TailDescriptor{1.0, 1.0};
    f.profile_ = [m, emitter_position](double k) {
        return std::polar(std::pow(k * k + m * m, -0.25), -k * emitter_position);
    };
    f.family_ = "wqed";
    return f;
}

FormFactor FormFactor::gaussian(const FieldModel& model, double width, Complex amplitude) {
    if (!(width > 0.0)) throw Error("domain-error", "gaussian width must be positive");
    FormFactor f;
    f.amplitudes_.resize(model.mode_count());
    for (int j = 0; j < model.mode_count(); ++j) {
        const double k = model.points()[j];
        f.amplitudes_[j] = amplitude * std::exp(-k * k / (2.0 * width * width));
    }
    f.declared_s_ = 0.0;
    f.tail_ = TailDescriptor{0.0, 0.0};  // certified negligible
    f.profile_ = [width, amplitude](double k) {
        return amplitude * std::exp(-k * k / (2.0 * width * width));
    };
    f.family_ = "gaussian";
    return f;
}

FormFactor FormFactor::tabulated(const FieldModel& model,
                                 const std::vector<double>& k,
                                 const std::vector<Complex>& values,
                                 std::optional<TailDescriptor> tail,
                                 double declared_s) {
    if (k.size() != values.size() || k.size() < 2)
        throw Error("domain-error", "tabulated form factor needs matching k/value columns");
    for (std::size_t i = 1; i < k.size(); ++i)
        if (k[i] <= k[i - 1]) throw Error("domain-error", "tabulated k column must be increasing");

    FormFactor f;
    f.amplitudes_.resize(model.mode_count());
    for (int j = 0; j < model.mode_count(); ++j) {
        const double x = model.points()[j];
        if (x <= k.front()) { f.amplitudes_[j] = values.front(); continue; }
        if (x >= k.back()) { f.amplitudes_[j] = values.back(); continue; }
        const auto it = std::upper_bound(k.begin(), k.end(), x);
        const std::size_t hi = static_cast<std::size_t>(it - k.begin());
        const double t = (x - k[hi - 1]) / (k[hi] - k[hi - 1]);
        f.amplitudes_[j] = (1.0 - t) * values[hi - 1] + t * values[hi];
    }
    f.declared_s_ = declared_s;
    f.tail_ = tail;
    f.family_ = "tabulated";
    return f;
}

FormFactor FormFactor::zero(const FieldModel& model) {
    FormFactor f;
    f.amplitudes_.assign(model.mode_count(), Complex(0.0));
    f.declared_s_ = 0.0;
    f.tail_ = TailDescriptor{0.0, 0.0};
    f.profile_ = [](double) { return Complex(0.0); };
    f.family_ = "zero";
    return f;
}

FormFactor FormFactor::from_amplitudes(std::vector<Complex> amplitudes,
                                       std::optional<TailDescriptor> tail,
                                       double declared_s) {
    FormFactor f;
    f.amplitudes_ = std::move(amplitudes);
    f.tail_ = tail;
    f.declared_s_ = declared_s;
    return f;
}

namespace {

struct TailAlgebra {
    double exponent;     // integrand ≈ coefficient·|k|^{-exponent}
    double coefficient;
};

// Asymptotics of |f|²/ω^s from the form-factor tail and the dispersion growth.
TailAlgebra integrand_tail(const FieldModel& model, const TailDescriptor& tail, double s) {
    const auto& d = model.dispersion_relation();
    return {tail.exponent + s * d.growth_exponent(),
            tail.coefficient / std::pow(d.growth_coefficient(), s)};
}

double grid_sum(const FieldModel& model, const FormFactor& f, double s) {
    double sum = 0.0;
    for (int j = 0; j < model.mode_count(); ++j) {
        const double a2 = std::norm(f.amplitudes()[j]);
        if (a2 == 0.0) continue;
        sum += a2 / std::pow(model.dispersion()[j], s) * model.weights()[j];
    }
    return sum;
}

} // namespace

double weighted_norm_squared(const FieldModel& model, const FormFactor& f, double s,
                             NormMode mode) {
    if (s < 0.0) throw Error("domain-error", "scale index s must be nonnegative");
    const auto key = std::make_pair(s, static_cast<int>(mode));
    if (auto it = f.norm_cache_.find(key); it != f.norm_cache_.end()) return it->second;

    const double core = grid_sum(model, f, s);

    double value;
    if (!f.tail()) {
        // No certificate: accept only when the grid-edge integrand is negligible
        // against the accumulated sum; otherwise the integral is inconclusive.
        const double edge = std::norm(f.amplitudes().back()) /
                            std::pow(model.dispersion().back(), s);
        if (edge * model.grid_edge() > 1e-13 * std::max(core, 1e-300))
            throw Error("inconclusive-convergence",
                        "form factor has no tail descriptor and does not visibly decay");
        value = core;
    } else {
        const TailAlgebra tail = integrand_tail(model, *f.tail(), s);
        if (tail.coefficient != 0.0 && tail.exponent <= 1.0) {
            value = kDivergent;
        } else if (mode == NormMode::Refined && f.has_profile()) {
            const auto& disp = model.dispersion_relation();
            const std::function<double(double)> g = [&f, &disp, s](double k) {
                return std::norm(f.profile(k)) / std::pow(disp(k), s);
            };
            value = integrate_line(g, std::max(model.grid_edge(), 1.0), 1e-13);
        } else {
            // two-sided leading-order tail from the grid edge
            value = core + 2.0 * power_tail(tail.coefficient, tail.exponent, model.grid_edge());
        }
    }

    f.norm_cache_.emplace(key, value);
    return value;
}

double weighted_norm(const FieldModel& model, const FormFactor& f, double s, NormMode mode) {
    return std::sqrt(weighted_norm_squared(model, f, s, mode));
}

double grid_norm_squared(const FieldModel& model, const FormFactor& f, double s) {
    return grid_sum(model, f, s);
}

GrowthCertificate growth_certificate(const FieldModel& model, const FormFactor& f,
                                     double s, int n_max, NormMode mode) {
    if (s < 1.0 || s > 2.0) throw Error("domain-error", "growth certificate needs s in [1,2]");
    if (n_max < 2) throw Error("domain-error", "growth certificate needs n_max >= 2");

    const double m = model.mass_gap();
    GrowthCertificate cert;
    cert.s = s;
    cert.integrals.resize(n_max);

    const bool refined = (mode == NormMode::Refined) && f.has_profile();
    const auto& disp = model.dispersion_relation();
    for (int n = 1; n <= n_max; ++n) {
        const double shift = (n - 1) * m;
        if (refined) {
            const std::function<double(double)> g = [&f, &disp, s, shift](double k) {
                return std::norm(f.profile(k)) / std::pow(disp(k) + shift, s);
            };
            cert.integrals[n - 1] = integrate_line(g, std::max(model.grid_edge(), 1.0), 1e-13);
        } else {
            double sum = 0.0;
            for (int j = 0; j < model.mode_count(); ++j)
                sum += std::norm(f.amplitudes()[j]) /
                       std::pow(model.dispersion()[j] + shift, s) * model.weights()[j];
            if (f.tail()) {
                const TailAlgebra tail = integrand_tail(model, *f.tail(), s);
                sum += 2.0 * power_tail(tail.coefficient, tail.exponent, model.grid_edge());
            }
            cert.integrals[n - 1] = sum;
        }
    }

    // All-zero form factor: any r works, C_f = 0.
    const double imax = *std::max_element(cert.integrals.begin(), cert.integrals.end());
    if (imax == 0.0) {
        cert.fitted_decay = 0.0;
        cert.r = s - 1.0;
        cert.constant = 0.0;
        cert.hypothesis_holds = true;
        return cert;
    }
    if (is_divergent(imax)) {
        cert.hypothesis_holds = false;
        cert.r = 1.0;
        cert.constant = kDivergent;
        return cert;
    }

    // log-log slope over the upper half of the range, where the asymptotic
    // regime dominates
    const int lo = std::max(1, n_max / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int n = lo; n <= n_max; ++n) {
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(cert.integrals[n - 1]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++count;
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    cert.fitted_decay = -slope;

    constexpr double kFitSlack = 0.05;
    const double r_needed = s - cert.fitted_decay;
    cert.hypothesis_holds = r_needed <= 1.0 + kFitSlack;
    cert.r = std::clamp(r_needed, s - 1.0, 1.0);

    cert.constant = 0.0;
    for (int n = 1; n <= n_max; ++n)
        cert.constant = std::max(cert.constant,
                                 cert.integrals[n - 1] * std::pow(n, s - cert.r));
    cert.max_bound_violation = -kDivergent;
    for (int n = 1; n <= n_max; ++n)
        cert.max_bound_violation = std::max(
            cert.max_bound_violation,
            cert.integrals[n - 1] - cert.constant * std::pow(n, cert.r - s));
    return cert;
}

RegularizationSequence make_cutoff_sequence(const FieldModel& model, const FormFactor& f,
                                            std::vector<double> cutoffs) {
    for (std::size_t i = 1; i < cutoffs.size(); ++i)
        if (cutoffs[i] <= cutoffs[i - 1])
            throw Error("domain-error", "cutoffs must be strictly increasing");

    RegularizationSequence seq;
    seq.base = f;
    seq.cutoffs = std::move(cutoffs);
    seq.distance_s = f.declared_s();

    for (double cutoff : seq.cutoffs) {
        std::vector<Complex> inside(f.amplitudes().size(), Complex(0.0));
        std::vector<Complex> outside(f.amplitudes().size(), Complex(0.0));
        for (int j = 0; j < model.mode_count(); ++j) {
            if (std::abs(model.points()[j]) <= cutoff) inside[j] = f.amplitudes()[j];
            else outside[j] = f.amplitudes()[j];
        }
        // cutoff elements have compact support on the grid: no tail
        seq.generated.push_back(FormFactor::from_amplitudes(
            std::move(inside), TailDescriptor{0.0, 0.0}, f.declared_s()));
        const FormFactor diff = FormFactor::from_amplitudes(
            std::move(outside), TailDescriptor{0.0, 0.0}, f.declared_s());
        seq.distances.push_back(weighted_norm(model, diff, seq.distance_s, NormMode::Grid));
    }
    return seq;
}

std::vector<double> renormalization_schedule(const FieldModel& model,
                                             const RegularizationSequence& seq,
                                             double omega_e_tilde, double lambda) {
    std::vector<double> energies;
    energies.reserve(seq.generated.size());
    for (const auto& fi : seq.generated)
        energies.push_back(omega_e_tilde +
                           lambda * lambda * grid_norm_squared(model, fi, 1.0));
    return energies;
}

} // namespace gsb
