#include "gsb/model_builder.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gsb/linalg.hpp"

namespace gsb {

SpinSystem SpinSystem::two_level(double omega_e, double omega_g) {
    SpinSystem sys;
    sys.free_h = DenseMatrix::Zero(2, 2);
    sys.free_h(0, 0) = omega_e;
    sys.free_h(1, 1) = omega_g;
    return sys;
}

DenseMatrix pauli_x() {
    DenseMatrix m = DenseMatrix::Zero(2, 2);
    m(0, 1) = 1.0; m(1, 0) = 1.0;
    return m;
}
DenseMatrix pauli_z() {
    DenseMatrix m = DenseMatrix::Zero(2, 2);
    m(0, 0) = 1.0; m(1, 1) = -1.0;
    return m;
}
DenseMatrix pauli_plus() {
    DenseMatrix m = DenseMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}
DenseMatrix pauli_minus() {
    DenseMatrix m = DenseMatrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

namespace {

void validate_spin_system(const SpinSystem& sys) {
    const double scale = std::max(1.0, sys.free_h.cwiseAbs().maxCoeff());
    if ((sys.free_h - sys.free_h.adjoint()).cwiseAbs().maxCoeff() > 1e-13 * scale)
        throw Error("domain-error", "atomic free Hamiltonian must be hermitian");
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(sys.free_h);
    if (es.eigenvalues().minCoeff() < -1e-12 * scale)
        throw Error("domain-error", "atomic free Hamiltonian must be nonnegative");
    for (const auto& c : sys.couplings)
        if (c.op.rows() != sys.free_h.rows() || c.op.cols() != sys.free_h.cols())
            throw Error("domain-error", "coupling matrix dimension mismatch");
}

} // namespace

CompositeOperator build_h0(const SpinSystem& sys, const FieldModel& model,
                           const FockBasis& basis) {
    validate_spin_system(sys);
    const Index fd = basis.dimension();
    const int sd = sys.dim();
    const RealVector e = dgamma_diagonal(model, basis);

    std::vector<Triplet> triplets;
    for (int su = 0; su < sd; ++su) {
        for (int sv = 0; sv < sd; ++sv) {
            const Complex a = sys.free_h(su, sv);
            if (a == Complex(0.0)) continue;
            for (Index i = 0; i < fd; ++i)
                triplets.emplace_back(composite_index(su, i, fd),
                                      composite_index(sv, i, fd), a);
        }
    }
    for (int su = 0; su < sd; ++su)
        for (Index i = 0; i < fd; ++i)
            if (e[i] != 0.0)
                triplets.emplace_back(composite_index(su, i, fd),
                                      composite_index(su, i, fd), Complex(e[i]));

    SparseMatrix h(sd * fd, sd * fd);
    h.setFromTriplets(triplets.begin(), triplets.end());
    h.makeCompressed();
    return {sd, &basis, std::move(h), true};
}

namespace {

// Interaction λ Σ_j (B_j ⊗ a†(f_j) + B_j* ⊗ a(f_j)), assembled so every
// entry has its exact conjugate mirror.
void add_interaction(std::vector<Triplet>& triplets, const SpinSystem& sys,
                     double lambda, const FockBasis& basis, const FieldModel& model) {
    const Index fd = basis.dimension();
    const int sd = sys.dim();
    for (const auto& coupling : sys.couplings) {
        const LadderPair pair = build_ladder(coupling.form_factor, basis, model);
        const SparseMatrix& create = pair.create.entries;
        for (int k = 0; k < create.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(create, k); it; ++it) {
                for (int su = 0; su < sd; ++su) {
                    for (int sv = 0; sv < sd; ++sv) {
                        const Complex b = coupling.op(su, sv);
                        if (b == Complex(0.0)) continue;
                        const Complex value = lambda * b * it.value();
                        triplets.emplace_back(composite_index(su, it.row(), fd),
                                              composite_index(sv, it.col(), fd), value);
                        triplets.emplace_back(composite_index(sv, it.col(), fd),
                                              composite_index(su, it.row(), fd),
                                              std::conj(value));
                    }
                }
            }
        }
    }
}

} // namespace

CompositeOperator build_gsb(const SpinSystem& sys, double lambda,
                            const FockBasis& basis, const FieldModel& model) {
    validate_spin_system(sys);
    for (const auto& coupling : sys.couplings) {
        const double n1 = weighted_norm_squared(model, coupling.form_factor, 1.0);
        if (is_divergent(n1))
            throw Error("form-factor-too-singular",
                        "generic GSB models support only H_{-1} form factors");
    }

    CompositeOperator h0 = build_h0(sys, model, basis);
    std::vector<Triplet> triplets;
    for (int k = 0; k < h0.entries.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(h0.entries, k); it; ++it)
            triplets.emplace_back(it.row(), it.col(), it.value());
    add_interaction(triplets, sys, lambda, basis, model);

    SparseMatrix h(h0.entries.rows(), h0.entries.cols());
    h.setFromTriplets(triplets.begin(), triplets.end());
    h.makeCompressed();
    return {sys.dim(), &basis, std::move(h), true};
}

CompositeOperator build_spin_boson(const SpinSystem& sys, double lambda,
                                   const FockBasis& basis, const FieldModel& model) {
    if (sys.couplings.size() != 1)
        throw Error("domain-error", "spin-boson model takes exactly one form factor");
    SpinSystem sb = sys;
    sb.couplings[0].op = pauli_x();
    return build_gsb(sb, lambda, basis, model);
}

CompositeOperator build_rwa(const SpinSystem& sys, double lambda,
                            const FockBasis& basis, const FieldModel& model) {
    if (sys.dim() != 2)
        throw Error("domain-error", "rotating-wave model needs a two-level system");
    if (std::abs(sys.free_h(1, 1)) != 0.0)
        throw Error("domain-error", "rotating-wave model fixes the ground energy to zero");
    if (sys.couplings.size() != 1)
        throw Error("domain-error", "rotating-wave model takes exactly one form factor");

    const Index fd = basis.dimension();
    const double omega_e = sys.free_h(0, 0).real();
    const RealVector e = dgamma_diagonal(model, basis);
    const LadderPair pair = build_ladder(sys.couplings[0].form_factor, basis, model);

    std::vector<Triplet> triplets;
    for (Index i = 0; i < fd; ++i) {
        triplets.emplace_back(i, i, Complex(omega_e + e[i]));
        if (e[i] != 0.0) triplets.emplace_back(fd + i, fd + i, Complex(e[i]));
    }
    const SparseMatrix& a = pair.annihilate.entries;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            const Complex value = lambda * it.value();
            triplets.emplace_back(it.row(), fd + it.col(), value);          // λ a(f)
            triplets.emplace_back(fd + it.col(), it.row(), std::conj(value)); // λ a†(f)
        }
    }

    SparseMatrix h(2 * fd, 2 * fd);
    h.setFromTriplets(triplets.begin(), triplets.end());
    h.makeCompressed();
    return {2, &basis, std::move(h), true};
}

CompositeOperator build_dephasing(const SpinSystem& sys, double lambda,
                                  const FockBasis& basis, const FieldModel& model) {
    if (sys.couplings.size() != 1)
        throw Error("domain-error", "dephasing model takes exactly one form factor");
    SpinSystem pd = sys;
    pd.couplings[0].op = pauli_z();
    return build_gsb(pd, lambda, basis, model);
}

RealVector excitation_number_diagonal(const FockBasis& basis) {
    const Index fd = basis.dimension();
    RealVector n(2 * fd);
    for (Index i = 0; i < fd; ++i) {
        n[i] = basis.sector_of(i) + 1.0;
        n[fd + i] = basis.sector_of(i);
    }
    return n;
}

namespace {

int excitation_of(const FockBasis& basis, Index composite) {
    const Index fd = basis.dimension();
    const int spin = static_cast<int>(composite / fd);
    const int bosons = basis.sector_of(composite % fd);
    return bosons + (spin == 0 ? 1 : 0);
}

} // namespace

double excitation_cross_coupling(const CompositeOperator& h) {
    if (h.spin_dim != 2)
        throw Error("domain-error", "excitation sectors are defined for two-level models");
    const FockBasis& basis = *h.basis;
    double max_cross = 0.0;
    for (int k = 0; k < h.entries.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(h.entries, k); it; ++it)
            if (excitation_of(basis, it.row()) != excitation_of(basis, it.col()))
                max_cross = std::max(max_cross, std::abs(it.value()));
    return max_cross;
}

SectorBlock excitation_sector(const CompositeOperator& h, int n) {
    const FockBasis& basis = *h.basis;
    if (n < 0 || n > basis.max_particles() + 1)
        throw Error("domain-error", "excitation sector out of range");
    if (excitation_cross_coupling(h) != 0.0)
        throw Error("not-excitation-preserving",
                    "operator couples distinct excitation sectors");

    const Index fd = basis.dimension();
    SectorBlock block;
    block.n = n;
    if (n >= 1 && n - 1 <= basis.max_particles()) {
        const auto [b, e] = basis.sector_range(n - 1);
        for (Index i = b; i < e; ++i)
            block.composite_indices.push_back(composite_index(0, i, fd));
    }
    if (n <= basis.max_particles()) {
        const auto [b, e] = basis.sector_range(n);
        for (Index i = b; i < e; ++i)
            block.composite_indices.push_back(composite_index(1, i, fd));
    }

    const Index bd = static_cast<Index>(block.composite_indices.size());
    std::vector<Index> inverse(2 * fd, -1);
    for (Index r = 0; r < bd; ++r) inverse[block.composite_indices[r]] = r;

    std::vector<Triplet> triplets;
    for (int k = 0; k < h.entries.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(h.entries, k); it; ++it) {
            const Index r = inverse[it.row()];
            const Index c = inverse[it.col()];
            if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
        }
    }
    block.entries.resize(bd, bd);
    block.entries.setFromTriplets(triplets.begin(), triplets.end());
    block.entries.makeCompressed();
    return block;
}

double klmn_threshold(const CompositeOperator& h0, const CompositeOperator& v,
                      std::uint64_t seed) {
    if (v.entries.nonZeros() == 0) return kDivergent;
    if (h0.entries.rows() != v.entries.rows())
        throw Error("domain-error", "H0 and V dimensions differ");

    // (H0+1)^{-1/2} through the eigendecomposition of H0; our H0 assemblies
    // are diagonal for diagonal A, but keep the general dense route for
    // small composite dimensions.
    const Index dim = h0.entries.rows();
    RealVector weight(dim);
    bool diagonal = true;
    for (int k = 0; k < h0.entries.outerSize() && diagonal; ++k)
        for (SparseMatrix::InnerIterator it(h0.entries, k); it; ++it)
            if (it.row() != it.col()) { diagonal = false; break; }

    std::function<Vector(const Vector&)> apply_w;
    DenseMatrix u;  // kept alive for the non-diagonal closure
    if (diagonal) {
        for (Index i = 0; i < dim; ++i)
            weight[i] = 1.0 / std::sqrt(h0.entries.coeff(i, i).real() + 1.0);
        apply_w = [weight](const Vector& x) {
            return Vector((weight.array() * x.array()).matrix());
        };
    } else {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(DenseMatrix(h0.entries));
        u = es.eigenvectors();
        RealVector w(dim);
        for (Index i = 0; i < dim; ++i)
            w[i] = 1.0 / std::sqrt(es.eigenvalues()[i] + 1.0);
        apply_w = [u, w](const Vector& x) {
            Vector y = u.adjoint() * x;
            y.array() *= w.array();
            return Vector(u * y);
        };
    }

    const SparseMatrix& vm = v.entries;
    const auto apply = [&](const Vector& x) { return apply_w(Vector(vm * apply_w(x))); };
    // V hermitian makes W V W hermitian; its norm via power iteration on M†M = M²
    const double norm = operator_norm_estimate(apply, apply, dim, seed);
    if (norm == 0.0) return kDivergent;
    return 1.0 / norm;
}

} // namespace gsb
