#ifndef KCAV_LINDBLAD_HPP
#define KCAV_LINDBLAD_HPP

// Liouvillian construction for the thermal master equation
//   rho_dot = i[rho, H] + (kappa_a/2)(nbar_a+1) L_a + (kappa_a/2) nbar_a L_a^dag
//           + (kappa_b/2)(nbar_b+1) L_b + (kappa_b/2) nbar_b L_b^dag,
//   L_o[rho] = 2 o rho o^dag - o^dag o rho - rho o^dag o,
// together with the trace-constrained steady-state solve, g2(0) evaluation
// and truncation-convergence automation.
//
// Density matrices are vectorized by column stacking, so
// vec(A rho B) = (B^T kron A) vec(rho).

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "kcav/errors.hpp"
#include "kcav/fock.hpp"
#include "kcav/model.hpp"

namespace kcav {

template <class T = double>
struct Superoperator {
    CMatrix<T> entries;
    Truncation truncation;

    int hilbert_dim() const { return truncation.dim(); }
    int dim() const { return static_cast<int>(entries.rows()); }
};

template <class T = double>
struct BathSpec {
    T nbar_a = 0;
    T nbar_b = 0;

    void validate() const {
        if (nbar_a < T(0) || nbar_b < T(0))
            throw std::invalid_argument("BathSpec: thermal occupations must be >= 0");
    }
};

template <class T>
SystemParams<T> with_bath(SystemParams<T> p, const BathSpec<T>& bath) {
    bath.validate();
    p.nbar_a = bath.nbar_a;
    p.nbar_b = bath.nbar_b;
    return p;
}

// Bose-Einstein occupation 1/(exp(hbar omega / kB T) - 1); omega in rad/s,
// temperature in kelvin.  CODATA-2018 constants.
template <class T = double>
T thermal_occupation(T omega, T temperature) {
    constexpr double hbar = 1.054571817e-34;  // J s
    constexpr double k_boltzmann = 1.380649e-23;  // J / K
    if (!(omega > T(0))) throw std::invalid_argument("thermal_occupation: omega must be > 0");
    if (temperature < T(0))
        throw std::invalid_argument("thermal_occupation: temperature must be >= 0");
    if (temperature == T(0)) return T(0);
    const T x = T(hbar) * omega / (T(k_boltzmann) * temperature);
    return T(1) / std::expm1(x);
}

// Bath occupations from the lab-frame mode frequencies and bath temperatures.
template <class T>
BathSpec<T> bath_from_temperatures(T omega_a, T omega_b, T temp_a, T temp_b) {
    return {thermal_occupation(omega_a, temp_a), thermal_occupation(omega_b, temp_b)};
}

// Superoperator of L_o[rho] = 2 o rho o^dag - o^dag o rho - rho o^dag o.
template <class T>
CMatrix<T> lindblad_superop(const CMatrix<T>& o) {
    const int n = static_cast<int>(o.rows());
    const CMatrix<T> id = identity_op<T>(n);
    const CMatrix<T> odo = o.adjoint() * o;
    CMatrix<T> s = T(2) * tensor(o.conjugate(), o);
    s -= tensor(id, odo);
    s -= tensor(odo.transpose(), id);
    return s;
}

// Superoperator of the coherent part i[rho, H].
template <class T>
CMatrix<T> commutator_superop(const CMatrix<T>& h) {
    const int n = static_cast<int>(h.rows());
    const CMatrix<T> id = identity_op<T>(n);
    const std::complex<T> i(0, 1);
    return i * (tensor(h.transpose(), id) - tensor(id, h));
}

// Generator assembled from a Hamiltonian and (rate, jump operator) pairs,
// each contributing rate * L_o.
template <class T>
Superoperator<T> liouvillian_from_parts(const CMatrix<T>& h,
                                        const std::vector<std::pair<T, CMatrix<T>>>& decays,
                                        const Truncation& t) {
    Superoperator<T> l{commutator_superop(h), t};
    for (const auto& [rate, op] : decays) l.entries += rate * lindblad_superop(op);
    return l;
}

template <class T>
Superoperator<T> build_liouvillian(const SystemParams<T>& p, const Truncation& t) {
    p.validate();
    t.validate();
    const CMatrix<T> h = build_hamiltonian(p, t);
    const CMatrix<T> a = annihilation_a<T>(t);
    const CMatrix<T> b = annihilation_b<T>(t);
    std::vector<std::pair<T, CMatrix<T>>> decays;
    decays.emplace_back(p.kappa_a / T(2) * (p.nbar_a + T(1)), a);
    decays.emplace_back(p.kappa_b / T(2) * (p.nbar_b + T(1)), b);
    if (p.nbar_a > T(0)) decays.emplace_back(p.kappa_a / T(2) * p.nbar_a, a.adjoint().eval());
    if (p.nbar_b > T(0)) decays.emplace_back(p.kappa_b / T(2) * p.nbar_b, b.adjoint().eval());
    return liouvillian_from_parts(h, decays, t);
}

// Sparse twin of Superoperator for truncations whose squared dimension makes
// a dense generator impractical.  Same vectorization convention.
template <class T = double>
struct SparseLiouvillian {
    Eigen::SparseMatrix<std::complex<T>> entries;
    Truncation truncation;

    int hilbert_dim() const { return truncation.dim(); }
    int dim() const { return static_cast<int>(entries.rows()); }
};

namespace detail {

template <class T>
Eigen::SparseMatrix<std::complex<T>> spkron(const Eigen::SparseMatrix<std::complex<T>>& a,
                                            const Eigen::SparseMatrix<std::complex<T>>& b) {
    Eigen::SparseMatrix<std::complex<T>> out =
        Eigen::KroneckerProductSparse<Eigen::SparseMatrix<std::complex<T>>,
                                      Eigen::SparseMatrix<std::complex<T>>>(a, b);
    out.makeCompressed();
    return out;
}

}  // namespace detail

template <class T>
SparseLiouvillian<T> build_liouvillian_sparse(const SystemParams<T>& p, const Truncation& t) {
    p.validate();
    t.validate();
    using Sp = Eigen::SparseMatrix<std::complex<T>>;
    const int n = t.dim();
    const Sp h = build_hamiltonian(p, t).sparseView();
    const Sp a = Sp(annihilation_a<T>(t).sparseView());
    const Sp b = Sp(annihilation_b<T>(t).sparseView());
    const Sp id = Sp(CMatrix<T>::Identity(n, n).sparseView());

    const std::complex<T> i(0, 1);
    Sp l = i * (detail::spkron<T>(Sp(h.transpose()), id) - detail::spkron<T>(id, h));
    auto add_decay = [&](const Sp& o, T rate) {
        const Sp odo = Sp(o.adjoint()) * o;
        l = l + rate * Sp(T(2) * detail::spkron<T>(Sp(o.conjugate()), o) -
                          detail::spkron<T>(id, odo) -
                          detail::spkron<T>(Sp(odo.transpose()), id));
    };
    add_decay(a, p.kappa_a / T(2) * (p.nbar_a + T(1)));
    add_decay(b, p.kappa_b / T(2) * (p.nbar_b + T(1)));
    if (p.nbar_a > T(0)) add_decay(Sp(a.adjoint()), p.kappa_a / T(2) * p.nbar_a);
    if (p.nbar_b > T(0)) add_decay(Sp(b.adjoint()), p.kappa_b / T(2) * p.nbar_b);
    l.makeCompressed();
    return {std::move(l), t};
}

// Jaynes-Cummings generator: cavity decay kappa_a on a, qubit lowering decay
// kappa_b on sigma_-, zero-temperature baths.
template <class T>
Superoperator<T> jc_liouvillian(const SystemParams<T>& p, int cavity_truncation) {
    const Truncation t{cavity_truncation, 1};
    const CMatrix<T> h = build_jc_hamiltonian(p, cavity_truncation);
    const CMatrix<T> a = embed_a(annihilation_op<T>(t.dim_a()), t);
    const CMatrix<T> sm = embed_b(sigma_minus<T>(), t);
    std::vector<std::pair<T, CMatrix<T>>> decays;
    decays.emplace_back(p.kappa_a / T(2), a);
    decays.emplace_back(p.kappa_b / T(2), sm);
    return liouvillian_from_parts(h, decays, t);
}

template <class T = double>
struct SteadyStateReport {
    DensityMatrix<T> rho;
    T residual = 0;  // max-abs of L vec(rho)
    Truncation truncation_used;
    bool converged = false;
};

template <class T = double>
struct SteadyStateOptions {
    enum class Method { automatic, dense, sparse };
    Method method = Method::automatic;
    // Liouvillian dimension above which the automatic method switches to the
    // sparse solver; 300 keeps the (3,3) figure truncation on the dense path.
    int dense_limit = 300;
    T residual_tol = T(1e-9);
    DensityTolerances<T> density_tol{};
};

namespace detail {

// Two passes of iterative refinement.  The refinement is run even when the
// starting residual is already tiny: steady states near an interference null
// carry physically meaningful components many orders below the matrix scale,
// and the correction solve is what makes those components accurate.
template <class T, class Solver, class MatLike>
CVector<T> solve_refined(const Solver& solver, const MatLike& a, const CVector<T>& b) {
    CVector<T> x = solver.solve(b);
    T residual = (b - a * x).template lpNorm<Eigen::Infinity>();
    for (int pass = 0; pass < 2; ++pass) {
        const CVector<T> r = b - a * x;
        const CVector<T> candidate = x + solver.solve(r).eval();
        const T next = (b - a * candidate).template lpNorm<Eigen::Infinity>();
        if (!candidate.allFinite() || next > residual) break;
        x = candidate;
        residual = next;
    }
    return x;
}

// Shared tail of the steady-state solves: reshape, Hermitize, validate and
// measure the residual against the unconstrained generator.
template <class T, class MatLike>
SteadyStateReport<T> finalize_steady_state(const CVector<T>& x, const MatLike& l,
                                           const Truncation& trunc,
                                           const SteadyStateOptions<T>& opt) {
    const int n = trunc.dim();
    if (!x.allFinite())
        throw NonUniqueSteadyStateError("steady_state: solve produced non-finite entries");
    CMatrix<T> rho = Eigen::Map<const CMatrix<T>>(x.data(), n, n);
    rho = ((rho + rho.adjoint()) / T(2)).eval();

    SteadyStateReport<T> report{make_density(std::move(rho), trunc, opt.density_tol), T(0),
                                trunc, false};
    const Eigen::Map<const CVector<T>> vec_rho(report.rho.entries.data(), n * n);
    report.residual = (l * vec_rho).template lpNorm<Eigen::Infinity>();
    report.converged = report.residual <= opt.residual_tol;
    return report;
}

}  // namespace detail

// Solves L x = 0 with the first row replaced by the trace-one constraint,
// then Hermitizes the reconstruction as (rho + rho^dag)/2.  Positivity
// violations beyond the floor are an error, not a silent projection.
template <class T>
SteadyStateReport<T> steady_state(const Superoperator<T>& l,
                                  const SteadyStateOptions<T>& opt = {}) {
    const int n = l.hilbert_dim();
    const int n2 = l.dim();
    if (n2 != n * n)
        throw std::invalid_argument("steady_state: superoperator dimension mismatch");

    CMatrix<T> a = l.entries;
    a.row(0).setZero();
    for (int i = 0; i < n; ++i) a(0, i * n + i) = std::complex<T>(1, 0);
    CVector<T> b = CVector<T>::Zero(n2);
    b(0) = std::complex<T>(1, 0);

    const bool use_sparse =
        opt.method == SteadyStateOptions<T>::Method::sparse ||
        (opt.method == SteadyStateOptions<T>::Method::automatic && n2 > opt.dense_limit);

    CVector<T> x;
    if (use_sparse) {
        Eigen::SparseMatrix<std::complex<T>> as = a.sparseView(T(0), T(0));
        as.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<std::complex<T>>> lu;
        lu.compute(as);
        if (lu.info() != Eigen::Success)
            throw NonUniqueSteadyStateError(
                "steady_state: singular constrained system (sparse factorization failed)");
        x = detail::solve_refined(lu, a, b);
    } else {
        Eigen::PartialPivLU<CMatrix<T>> lu(a);
        const auto pivots = lu.matrixLU().diagonal().cwiseAbs().eval();
        if (pivots.minCoeff() <= T(1e-14) * pivots.maxCoeff())
            throw NonUniqueSteadyStateError(
                "steady_state: singular constrained system (near-zero pivot)");
        x = detail::solve_refined(lu, a, b);
    }
    if (!x.allFinite())
        throw NonUniqueSteadyStateError("steady_state: solve produced non-finite entries");
    if ((b - a * x).template lpNorm<Eigen::Infinity>() > T(1e-8))
        throw NonUniqueSteadyStateError("steady_state: constrained solve did not converge");

    return detail::finalize_steady_state(x, l.entries, l.truncation, opt);
}

// Steady state from a sparse generator: an incomplete-LU preconditioned
// BiCGSTAB solve of the trace-constrained system, with a SparseLU fallback
// when the iteration stalls.
template <class T>
SteadyStateReport<T> steady_state(const SparseLiouvillian<T>& l,
                                  const SteadyStateOptions<T>& opt = {}) {
    using Sp = Eigen::SparseMatrix<std::complex<T>>;
    const int n = l.hilbert_dim();
    const int n2 = l.dim();
    if (n2 != n * n)
        throw std::invalid_argument("steady_state: superoperator dimension mismatch");

    std::vector<Eigen::Triplet<std::complex<T>>> triplets;
    triplets.reserve(l.entries.nonZeros() + n);
    for (int k = 0; k < l.entries.outerSize(); ++k)
        for (typename Sp::InnerIterator it(l.entries, k); it; ++it)
            if (it.row() != 0) triplets.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < n; ++i) triplets.emplace_back(0, i * n + i, std::complex<T>(1, 0));
    Sp a(n2, n2);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    CVector<T> b = CVector<T>::Zero(n2);
    b(0) = std::complex<T>(1, 0);

    CVector<T> x;
    Eigen::BiCGSTAB<Sp, Eigen::IncompleteLUT<std::complex<T>>> iterative;
    iterative.preconditioner().setDroptol(T(1e-5));
    iterative.preconditioner().setFillfactor(12);
    iterative.setTolerance(T(1e-13));
    iterative.setMaxIterations(400);
    iterative.compute(a);
    bool solved = false;
    if (iterative.info() == Eigen::Success) {
        x = detail::solve_refined(iterative, a, b);
        solved = x.allFinite() &&
                 (b - a * x).template lpNorm<Eigen::Infinity>() <= T(1e-10);
    }
    if (!solved) {
        Eigen::SparseLU<Sp> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success)
            throw NonUniqueSteadyStateError(
                "steady_state: singular constrained system (sparse factorization failed)");
        x = detail::solve_refined(lu, a, b);
        if (!x.allFinite() || (b - a * x).template lpNorm<Eigen::Infinity>() > T(1e-8))
            throw NonUniqueSteadyStateError("steady_state: constrained solve did not converge");
    }
    return detail::finalize_steady_state(x, l.entries, l.truncation, opt);
}

// Builds the generator in whichever representation suits the truncation and
// solves for the steady state.
template <class T>
SteadyStateReport<T> solve_steady_state(const SystemParams<T>& p, const Truncation& t,
                                        const SteadyStateOptions<T>& opt = {}) {
    const bool dense =
        opt.method == SteadyStateOptions<T>::Method::dense ||
        (opt.method == SteadyStateOptions<T>::Method::automatic &&
         t.dim() * t.dim() <= opt.dense_limit);
    if (dense) return steady_state(build_liouvillian(p, t), opt);
    return steady_state(build_liouvillian_sparse(p, t), opt);
}

// Equal-time second-order correlation of mode a,
//   g2(0) = <a^dag a^dag a a> / <a^dag a>^2.
template <class T = double>
struct G2Options {
    T occupation_floor = T(1e-14);
};

template <class T>
T g2_zero(const DensityMatrix<T>& rho, const G2Options<T>& opt = {}) {
    const CMatrix<T> a = annihilation_a<T>(rho.truncation);
    const CMatrix<T> n = (a.adjoint() * a).eval();
    const T mean = expectation(n, rho).real();
    if (!(mean > opt.occupation_floor))
        throw UndefinedCorrelationError("g2_zero: mean occupation below floor");
    const T pair_moment = expectation<T>((a.adjoint() * a.adjoint() * a * a).eval(), rho).real();
    return pair_moment / (mean * mean);
}

template <class T = double>
struct ConvergedG2Options {
    T rel_tol = T(1e-6);
    int n_max_cap = 12;  // per mode
    SteadyStateOptions<T> solve{};
};

// Increases both cutoffs by one until g2(0) changes by less than rel_tol
// between successive truncations.
template <class T>
std::pair<T, SteadyStateReport<T>> converged_g2(const SystemParams<T>& p, const Truncation& t0,
                                                const ConvergedG2Options<T>& opt = {}) {
    Truncation t = t0;
    SteadyStateReport<T> report = solve_steady_state(p, t, opt.solve);
    T g_prev = g2_zero(report.rho);
    for (;;) {
        const Truncation next{t.n_max_a + 1, t.n_max_b + 1};
        if (next.n_max_a > opt.n_max_cap || next.n_max_b > opt.n_max_cap)
            throw ConvergenceError("converged_g2: truncation cap reached before convergence");
        report = solve_steady_state(p, next, opt.solve);
        const T g_next = g2_zero(report.rho);
        if (std::abs(g_next - g_prev) < opt.rel_tol * std::abs(g_prev))
            return {g_next, report};
        g_prev = g_next;
        t = next;
    }
}

// g2(0) of the cavity in the reduced Jaynes-Cummings model.
template <class T>
T jc_g2(const SystemParams<T>& p, int cavity_truncation,
        const SteadyStateOptions<T>& opt = {}) {
    const SteadyStateReport<T> report = steady_state(jc_liouvillian(p, cavity_truncation), opt);
    return g2_zero(report.rho);
}

}  // namespace kcav

#endif
