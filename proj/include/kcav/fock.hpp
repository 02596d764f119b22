#ifndef KCAV_FOCK_HPP
#define KCAV_FOCK_HPP

// Truncated Fock-space operator algebra for one and two bosonic modes.
//
// The composite basis ordering is fixed across the whole library: mode a is
// the slow index and mode b the fast one, i.e. |m,n> lives at index
// m*(n_max_b+1) + n.  All matrices are dense and complex.

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "kcav/errors.hpp"

namespace kcav {

template <class T>
using CMatrix = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using CVector = Eigen::Vector<std::complex<T>, Eigen::Dynamic>;

using Matrix = CMatrix<double>;
using Vector = CVector<double>;

// Photon-number cutoffs of the two-mode space.  Single-mode dimension is
// n_max+1; the composite dimension is the product.
struct Truncation {
    int n_max_a = 1;
    int n_max_b = 1;

    int dim_a() const { return n_max_a + 1; }
    int dim_b() const { return n_max_b + 1; }
    int dim() const { return dim_a() * dim_b(); }

    // Composite index of |m,n> (m photons in a, n in b).
    int index(int m, int n) const { return m * dim_b() + n; }

    void validate() const {
        if (n_max_a < 1 || n_max_b < 1)
            throw std::invalid_argument("Truncation: n_max must be >= 1 per mode");
    }

    bool operator==(const Truncation&) const = default;
};

// Single-mode annihilation operator: entries[k-1][k] = sqrt(k).
template <class T = double>
CMatrix<T> annihilation_op(int dim) {
    if (dim < 2) throw std::invalid_argument("annihilation_op: dim must be >= 2");
    CMatrix<T> a = CMatrix<T>::Zero(dim, dim);
    for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(T(k));
    return a;
}

template <class T = double>
CMatrix<T> creation_op(int dim) {
    return annihilation_op<T>(dim).adjoint();
}

template <class T = double>
CMatrix<T> number_op(int dim) {
    if (dim < 2) throw std::invalid_argument("number_op: dim must be >= 2");
    CMatrix<T> n = CMatrix<T>::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = T(k);
    return n;
}

template <class T = double>
CMatrix<T> identity_op(int dim) {
    if (dim < 1) throw std::invalid_argument("identity_op: dim must be >= 1");
    return CMatrix<T>::Identity(dim, dim);
}

// Kronecker product following the composite ordering (first factor slow).
template <class DerivedA, class DerivedB>
auto tensor(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y) {
    if (x.rows() != x.cols() || y.rows() != y.cols())
        throw std::invalid_argument("tensor: operators must be square");
    return Eigen::kroneckerProduct(x.derived(), y.derived()).eval();
}

// Embeddings of single-mode operators into the composite space.
template <class T>
CMatrix<T> embed_a(const CMatrix<T>& op, const Truncation& t) {
    if (op.rows() != t.dim_a())
        throw std::invalid_argument("embed_a: operator dimension does not match truncation");
    return tensor(op, identity_op<T>(t.dim_b()));
}

template <class T>
CMatrix<T> embed_b(const CMatrix<T>& op, const Truncation& t) {
    if (op.rows() != t.dim_b())
        throw std::invalid_argument("embed_b: operator dimension does not match truncation");
    return tensor(identity_op<T>(t.dim_a()), op);
}

template <class T = double>
CMatrix<T> annihilation_a(const Truncation& t) {
    return embed_a(annihilation_op<T>(t.dim_a()), t);
}

template <class T = double>
CMatrix<T> annihilation_b(const Truncation& t) {
    return embed_b(annihilation_op<T>(t.dim_b()), t);
}

// Total excitation number a^dag a + b^dag b.
template <class T = double>
CMatrix<T> total_number(const Truncation& t) {
    return embed_a(number_op<T>(t.dim_a()), t) + embed_b(number_op<T>(t.dim_b()), t);
}

template <class T = double>
CVector<T> fock_state(const Truncation& t, int m, int n) {
    if (m < 0 || m > t.n_max_a || n < 0 || n > t.n_max_b)
        throw std::invalid_argument("fock_state: occupation outside truncation");
    CVector<T> v = CVector<T>::Zero(t.dim());
    v(t.index(m, n)) = T(1);
    return v;
}

// Truncated coherent state |alpha>, renormalized on the cutoff space.
template <class T = double>
CVector<T> coherent_state(std::complex<T> alpha, int dim) {
    CVector<T> v(dim);
    std::complex<T> c(1, 0);
    v(0) = c;
    for (int n = 1; n < dim; ++n) {
        c *= alpha / std::sqrt(T(n));
        v(n) = c;
    }
    v /= v.norm();
    return v;
}

// Truncated single-mode thermal state, renormalized on the cutoff space.
template <class T = double>
CMatrix<T> thermal_density(T nbar, int dim) {
    if (nbar < T(0)) throw std::invalid_argument("thermal_density: nbar must be >= 0");
    CMatrix<T> rho = CMatrix<T>::Zero(dim, dim);
    if (nbar == T(0)) {
        rho(0, 0) = T(1);
        return rho;
    }
    const T q = nbar / (nbar + T(1));
    T w = T(1), norm = T(0);
    for (int n = 0; n < dim; ++n) {
        rho(n, n) = w;
        norm += w;
        w *= q;
    }
    rho /= norm;
    return rho;
}

// Validation tolerances for density matrices; the defaults are the module
// constants used throughout the library.
template <class T = double>
struct DensityTolerances {
    T hermiticity = T(1e-12);   // max-abs entry difference against adjoint
    T trace = T(1e-10);         // |tr(rho) - 1|
    T eigenvalue_floor = T(1e-9);  // min eigenvalue >= -floor
};

template <class T>
struct DensityMatrix {
    CMatrix<T> entries;
    Truncation truncation;

    int dim() const { return static_cast<int>(entries.rows()); }
};

template <class T>
T hermiticity_defect(const CMatrix<T>& m) {
    return (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
}

template <class T>
void validate_density(const DensityMatrix<T>& rho,
                      const DensityTolerances<T>& tol = {}) {
    if (rho.entries.rows() != rho.entries.cols())
        throw std::invalid_argument("DensityMatrix: matrix must be square");
    if (rho.entries.rows() != rho.truncation.dim())
        throw std::invalid_argument("DensityMatrix: dimension does not match truncation");
    if (hermiticity_defect(rho.entries) > tol.hermiticity)
        throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
    if (std::abs(rho.entries.trace() - std::complex<T>(1, 0)) > tol.trace)
        throw std::invalid_argument("DensityMatrix: trace differs from one");
    Eigen::SelfAdjointEigenSolver<CMatrix<T>> es(rho.entries, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol.eigenvalue_floor)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond floor");
}

template <class T>
DensityMatrix<T> make_density(CMatrix<T> entries, const Truncation& t,
                              const DensityTolerances<T>& tol = {}) {
    DensityMatrix<T> rho{std::move(entries), t};
    validate_density(rho, tol);
    return rho;
}

// tr(X rho).
template <class T>
std::complex<T> expectation(const CMatrix<T>& x, const DensityMatrix<T>& rho) {
    if (x.rows() != rho.entries.rows() || x.cols() != rho.entries.cols())
        throw std::invalid_argument("expectation: dimension mismatch");
    return (x * rho.entries).trace();
}

}  // namespace kcav

#endif
