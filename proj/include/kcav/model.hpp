#ifndef KCAV_MODEL_HPP
#define KCAV_MODEL_HPP

// Parameter records and Hamiltonian builders for the driven coupled
// linear/Kerr-cavity model: mode a is the driven linear cavity, mode b the
// Kerr cavity.  All rates and detunings are expressed in units of one common
// reference rate.

#include <complex>
#include <stdexcept>

#include "kcav/fock.hpp"

namespace kcav {

template <class T = double>
struct SystemParams {
    T delta_a = 0;   // detuning of mode a
    T delta_b = 0;   // detuning of mode b
    T kerr = 0;      // Kerr parameter K of mode b
    T hop = 0;       // photon-hopping strength J
    T drive = 0;     // drive amplitude Omega on mode a
    T kappa_a = 1;   // decay rate of mode a
    T kappa_b = 1;   // decay rate of mode b
    T nbar_a = 0;    // thermal occupation of bath a
    T nbar_b = 0;    // thermal occupation of bath b

    void validate() const {
        if (!(kappa_a > T(0))) throw std::invalid_argument("SystemParams: kappa_a > 0 required");
        if (!(kappa_b > T(0))) throw std::invalid_argument("SystemParams: kappa_b > 0 required");
        if (drive < T(0)) throw std::invalid_argument("SystemParams: drive >= 0 required");
        if (nbar_a < T(0)) throw std::invalid_argument("SystemParams: nbar_a >= 0 required");
        if (nbar_b < T(0)) throw std::invalid_argument("SystemParams: nbar_b >= 0 required");
    }
};

// Lab-frame record; the rotating-frame detunings are delta = omega - omega_d.
template <class T = double>
struct LabFrameParams {
    T omega_a = 0;
    T omega_b = 0;
    T omega_d = 0;
    T kerr = 0;
    T hop = 0;
    T drive = 0;
    T kappa_a = 1;
    T kappa_b = 1;
    T nbar_a = 0;
    T nbar_b = 0;

    SystemParams<T> to_system_params() const {
        SystemParams<T> p;
        p.delta_a = omega_a - omega_d;
        p.delta_b = omega_b - omega_d;
        p.kerr = kerr;
        p.hop = hop;
        p.drive = drive;
        p.kappa_a = kappa_a;
        p.kappa_b = kappa_b;
        p.nbar_a = nbar_a;
        p.nbar_b = nbar_b;
        p.validate();
        return p;
    }
};

// Rotating-frame Hamiltonian
//   delta_a a^dag a + delta_b b^dag b + K (b^dag b)^2
//   + J (a^dag b + a b^dag) + Omega (a^dag + a).
// The Kerr term is K b^dag b b^dag b = K n_b^2 (no normal-ordering shift).
template <class T>
CMatrix<T> build_hamiltonian(const SystemParams<T>& p, const Truncation& t) {
    p.validate();
    t.validate();
    const CMatrix<T> na = embed_a(number_op<T>(t.dim_a()), t);
    const CMatrix<T> nb = embed_b(number_op<T>(t.dim_b()), t);
    const CMatrix<T> a = annihilation_a<T>(t);
    const CMatrix<T> b = annihilation_b<T>(t);
    CMatrix<T> h = p.delta_a * na + p.delta_b * nb + p.kerr * (nb * nb);
    h += p.hop * (a.adjoint() * b + a * b.adjoint());
    h += p.drive * (a.adjoint() + a);
    return h;
}

template <class T>
CMatrix<T> build_undriven(const SystemParams<T>& p, const Truncation& t) {
    SystemParams<T> q = p;
    q.drive = T(0);
    return build_hamiltonian(q, t);
}

// build_hamiltonian minus i kappa_a/2 a^dag a minus i kappa_b/2 b^dag b.
template <class T>
CMatrix<T> build_nonhermitian(const SystemParams<T>& p, const Truncation& t) {
    const std::complex<T> mihalf(0, T(-0.5));
    CMatrix<T> h = build_hamiltonian(p, t);
    h += mihalf * p.kappa_a * embed_a(number_op<T>(t.dim_a()), t);
    h += mihalf * p.kappa_b * embed_b(number_op<T>(t.dim_b()), t);
    return h;
}

// Pauli operators on the {|g>,|e>} qubit obtained by truncating mode b to
// its two lowest levels (index 0 = ground).
template <class T = double>
CMatrix<T> sigma_z() {
    CMatrix<T> s = CMatrix<T>::Zero(2, 2);
    s(0, 0) = T(-1);
    s(1, 1) = T(1);
    return s;
}

template <class T = double>
CMatrix<T> sigma_minus() {
    CMatrix<T> s = CMatrix<T>::Zero(2, 2);
    s(0, 1) = T(1);
    return s;
}

// Reduced Jaynes-Cummings Hamiltonian on (cavity x qubit):
//   delta_a a^dag a + (delta_b + K)/2 sigma_z
//   + J (a^dag sigma_- + sigma_+ a) + Omega (a^dag + a).
// The cavity is the slow index; cavity_truncation is its max photon number.
template <class T>
CMatrix<T> build_jc_hamiltonian(const SystemParams<T>& p, int cavity_truncation) {
    p.validate();
    if (cavity_truncation < 1)
        throw std::invalid_argument("build_jc_hamiltonian: cavity_truncation must be >= 1");
    const int dc = cavity_truncation + 1;
    const Truncation t{cavity_truncation, 1};
    const CMatrix<T> a = embed_a(annihilation_op<T>(dc), t);
    const CMatrix<T> sm = embed_b(sigma_minus<T>(), t);
    const CMatrix<T> sz = embed_b(sigma_z<T>(), t);
    CMatrix<T> h = p.delta_a * embed_a(number_op<T>(dc), t);
    h += (T(0.5) * (p.delta_b + p.kerr)) * sz;
    h += p.hop * (a.adjoint() * sm + sm.adjoint() * a);
    h += p.drive * (a.adjoint() + a);
    return h;
}

}  // namespace kcav

#endif
