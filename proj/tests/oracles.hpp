// oracles.hpp — test-only brute-force machinery, kept independent of the
// implementation paths it checks. n-particle states are dense functions on
// index tuples {0..G-1}^n with the weighted scalar product of the discrete
// measure; the ladder actions are transcribed literally from their pointwise
// definitions with explicit symmetrization bookkeeping.

#pragma once

#include <cmath>
#include <vector>

#include "gsb/field_model.hpp"
#include "gsb/types.hpp"

namespace gsb::oracle {

struct TupleSpace {
    const FieldModel* model;
    int n;                       // particle count
    std::vector<Complex> values; // size G^n (n = 0: one scalar)

    int modes() const { return model->mode_count(); }
    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < n; ++i) s *= modes();
        return s;
    }
    std::vector<int> tuple(std::size_t index) const {
        std::vector<int> t(n);
        for (int i = 0; i < n; ++i) {
            t[i] = static_cast<int>(index % modes());
            index /= modes();
        }
        return t;
    }
    std::size_t index(const std::vector<int>& t) const {
        std::size_t idx = 0;
        for (int i = n - 1; i >= 0; --i) idx = idx * modes() + t[i];
        return idx;
    }
};

inline Complex inner(const TupleSpace& a, const TupleSpace& b) {
    Complex sum(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        double w = 1.0;
        for (int j : a.tuple(i)) w *= a.model->weights()[j];
        sum += std::conj(a.values[i]) * b.values[i] * w;
    }
    return sum;
}

// (aΨ)(k_1..k_{n-1}) = √n ∫ conj(f(k_n)) Ψ(k_1..k_n) dμ(k_n)
inline TupleSpace annihilate(const FormFactor& f, const TupleSpace& psi) {
    TupleSpace out{psi.model, psi.n - 1, {}};
    out.values.assign(out.size(), Complex(0.0));
    const double root = std::sqrt(static_cast<double>(psi.n));
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::vector<int> t = out.tuple(i);
        t.push_back(0);
        Complex sum(0.0);
        for (int j = 0; j < psi.modes(); ++j) {
            t.back() = j;
            sum += std::conj(f.amplitudes()[j]) * psi.values[psi.index(t)] *
                   psi.model->weights()[j];
        }
        out.values[i] = root * sum;
    }
    return out;
}

// (a†Ψ)(k_1..k_{n+1}) = (1/√(n+1)) [ Σ_{p=1}^n Ψ(k_1..k_{n+1}@p..k_n) f(k_p)
//                                    + Ψ(k_1..k_n) f(k_{n+1}) ]
inline TupleSpace create(const FormFactor& f, const TupleSpace& psi) {
    TupleSpace out{psi.model, psi.n + 1, {}};
    out.values.assign(out.size(), Complex(0.0));
    const double root = 1.0 / std::sqrt(static_cast<double>(psi.n + 1));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::vector<int> t = out.tuple(i);   // k_1..k_{n+1}
        Complex sum(0.0);
        for (int p = 0; p < psi.n; ++p) {
            std::vector<int> replaced(t.begin(), t.begin() + psi.n);
            replaced[p] = t[psi.n];                // k_{n+1} at slot p
            sum += psi.values[psi.index(replaced)] * f.amplitudes()[t[p]];
        }
        const std::vector<int> head(t.begin(), t.begin() + psi.n);
        sum += psi.values[psi.index(head)] * f.amplitudes()[t[psi.n]];
        out.values[i] = root * sum;
    }
    return out;
}

// normalized symmetric basis function of an occupation vector:
// Φ_ν(tuple) = sqrt(Πν_l! / (n!·Πμ_l^{ν_l})) on tuples with counts ν
inline TupleSpace occupation_state(const FieldModel& model,
                                   const std::vector<int>& occ) {
    int n = 0;
    for (int v : occ) n += v;
    TupleSpace out{&model, n, {}};
    out.values.assign(out.size(), Complex(0.0));

    double log_c = 0.0;
    for (std::size_t l = 0; l < occ.size(); ++l) {
        for (int i = 2; i <= occ[l]; ++i) log_c += std::log(static_cast<double>(i));
        log_c -= occ[l] * std::log(model.weights()[l]);
    }
    for (int i = 2; i <= n; ++i) log_c -= std::log(static_cast<double>(i));
    const double c = std::exp(0.5 * log_c);

    std::vector<int> counts(occ.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::fill(counts.begin(), counts.end(), 0);
        for (int j : out.tuple(i)) ++counts[j];
        if (std::equal(counts.begin(), counts.end(), occ.begin())) out.values[i] = c;
    }
    return out;
}

} // namespace gsb::oracle
