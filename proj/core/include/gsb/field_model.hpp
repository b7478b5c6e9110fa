// field_model.hpp — the discretized one-particle measure space: grid, weights,
// dispersion, form factors, weighted scale norms, growth certificates, cutoff
// sequences and renormalization schedules.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsb/types.hpp"

namespace gsb {

/// Power-law continuation of |f(k)|^2 beyond the grid edge:
/// |f(k)|^2 ≈ coefficient · |k|^{-exponent} for |k| >= the matching point.
/// A zero coefficient certifies a negligible tail (e.g. Gaussian profiles).
struct TailDescriptor {
    double exponent = 0.0;
    double coefficient = 0.0;
};

/// Dispersion relation ω(k) with the asymptotics needed for tail algebra:
/// ω(k) ≈ growth_coefficient · |k|^{growth_exponent} as |k| → ∞.
class Dispersion {
public:
    enum class Family { KleinGordon, Constant };

    static Dispersion klein_gordon(double mass);
    static Dispersion constant(double value);

    double operator()(double k) const;
    double mass_gap() const { return mass_; }
    double growth_exponent() const;
    double growth_coefficient() const;
    Family family() const { return family_; }
    std::string name() const;

private:
    Dispersion(Family family, double mass) : family_(family), mass_(mass) {}
    Family family_;
    double mass_;
};

/// Uniform symmetric midpoint grid on [-K, K] carrying the quadrature rule
/// and the sampled dispersion. Immutable after construction.
class FieldModel {
public:
    static FieldModel uniform(const Dispersion& dispersion, double half_width, int modes);

    int mode_count() const { return static_cast<int>(points_.size()); }
    double grid_edge() const { return half_width_; }
    double mass_gap() const { return dispersion_fn_.mass_gap(); }
    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& dispersion() const { return omega_; }
    const Dispersion& dispersion_relation() const { return dispersion_fn_; }
    double min_dispersion() const { return omega_min_; }

private:
    FieldModel(const Dispersion& d, double half_width,
               std::vector<double> points, std::vector<double> weights);

    Dispersion dispersion_fn_;
    double half_width_;
    std::vector<double> points_;
    std::vector<double> weights_;
    std::vector<double> omega_;
    double omega_min_;
};

/// Quadrature mode for scale norms. Grid: weighted sum over the grid plus the
/// leading power-law tail from the grid edge (consistent with the discrete
/// operators built on the same grid). Refined: adaptive quadrature of the
/// analytic profile over the whole line (1/k-mapped tails); falls back to
/// Grid when no profile is available.
enum class NormMode { Grid, Refined };

class FormFactor;
double weighted_norm_squared(const FieldModel& model, const FormFactor& f, double s,
                             NormMode mode);

/// Complex amplitudes on the grid plus the metadata needed to integrate past
/// it: an optional analytic profile (builtin families) and a tail descriptor.
/// declared_s is the user's claim for the smallest scale index with finite
/// ‖f‖₋ₛ; weighted_norm cross-checks it instead of trusting it.
class FormFactor {
public:
    static FormFactor flat(const FieldModel& model, Complex amplitude = 1.0);
    static FormFactor wqed(const FieldModel& model, double emitter_position = 0.0);
    static FormFactor gaussian(const FieldModel& model, double width, Complex amplitude = 1.0);
    static FormFactor tabulated(const FieldModel& model,
                                const std::vector<double>& k,
                                const std::vector<Complex>& values,
                                std::optional<TailDescriptor> tail = std::nullopt,
                                double declared_s = 0.0);
    static FormFactor zero(const FieldModel& model);
    /// Grid values only; used for algebraic combinations of form factors.
    static FormFactor from_amplitudes(std::vector<Complex> amplitudes,
                                      std::optional<TailDescriptor> tail,
                                      double declared_s);

    const std::vector<Complex>& amplitudes() const { return amplitudes_; }
    double declared_s() const { return declared_s_; }
    const std::optional<TailDescriptor>& tail() const { return tail_; }
    bool has_profile() const { return static_cast<bool>(profile_); }
    Complex profile(double k) const { return profile_(k); }
    const std::string& family() const { return family_; }

    /// Cached values of ∫|f|²/ω^s dμ keyed by (s, mode); filled by weighted_norm.
    const std::map<std::pair<double, int>, double>& norm_cache() const { return norm_cache_; }

private:
    friend double weighted_norm_squared(const FieldModel&, const FormFactor&, double,
                                        NormMode);

    std::vector<Complex> amplitudes_;
    double declared_s_ = 0.0;
    std::optional<TailDescriptor> tail_;
    std::function<Complex(double)> profile_;
    std::string family_ = "tabulated";
    mutable std::map<std::pair<double, int>, double> norm_cache_;
};

/// ∫ |f(k)|² / ω(k)^s dμ(k); returns the divergence sentinel (+inf) when the
/// tail descriptor certifies p ≤ 1 decay of the integrand. Throws
/// "inconclusive-convergence" when no tail descriptor is present and the
/// grid-edge integrand is not negligible.
inline double weighted_norm_squared(const FieldModel& model, const FormFactor& f,
                                    double s) {
    return weighted_norm_squared(model, f, s, NormMode::Grid);
}

/// ‖f‖₋ₛ = sqrt of the above.
double weighted_norm(const FieldModel& model, const FormFactor& f, double s,
                     NormMode mode = NormMode::Grid);

/// Pure discrete sum Σ_j |f_j|² μ_j / ω_j^s with no tail correction: the
/// exact constant of the truncated operators (always finite). Tail-corrected
/// classification belongs to weighted_norm.
double grid_norm_squared(const FieldModel& model, const FormFactor& f, double s);

/// I_n = ∫ |f(k)|² / [ω(k) + (n-1)m]^s dμ for n = 1..n_max, with the fitted
/// least r ∈ [s-1, 1] and constant C_f such that I_n ≤ C_f / n^{s-r}.
struct GrowthCertificate {
    double s = 0.0;
    std::vector<double> integrals;      // I_n, n = 1..n_max
    double fitted_decay = 0.0;          // β from log-log fit of I_n ~ n^{-β}
    double r = 0.0;                     // least admissible r, clamped to [s-1, 1]
    double constant = 0.0;              // C_f = max_n I_n n^{s-r}
    double max_bound_violation = 0.0;   // max_n (I_n - C_f n^{r-s}), ≤ 0 by construction
    bool hypothesis_holds = false;      // false = "hypothesis-violated" outcome
};

GrowthCertificate growth_certificate(const FieldModel& model, const FormFactor& f,
                                     double s, int n_max,
                                     NormMode mode = NormMode::Refined);

/// Sharp cutoff family f^i = f·1[|k| ≤ Λ_i] with the grid-restricted
/// distances ‖f^i − f‖₋ₛ at s = f.declared_s. Distances are pure grid
/// quantities: a cutoff at or beyond the grid edge reproduces f exactly.
struct RegularizationSequence {
    FormFactor base;
    std::vector<double> cutoffs;
    std::vector<FormFactor> generated;
    std::vector<double> distances;      // ‖f^i − f‖₋ₛ on the grid
    double distance_s = 0.0;
};

RegularizationSequence make_cutoff_sequence(const FieldModel& model, const FormFactor& f,
                                            std::vector<double> cutoffs);

/// Bare excitation energies ω_e^i = ω̃_e + λ²‖f^i‖²₋₁ making the regularized
/// models converge to the renormalized one at coupling λ (grid norms, so the
/// cancellation against the dressing is exact on the discrete space).
std::vector<double> renormalization_schedule(const FieldModel& model,
                                             const RegularizationSequence& seq,
                                             double omega_e_tilde,
                                             double lambda = 1.0);

} // namespace gsb
