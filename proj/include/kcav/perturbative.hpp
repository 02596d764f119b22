#ifndef KCAV_PERTURBATIVE_HPP
#define KCAV_PERTURBATIVE_HPP

// Closed-form weak-driving solutions at zero temperature: the steady-state
// probability amplitudes of the non-Hermitian evolution, the order-0..4
// density-matrix elements, the eigenbasis interference decomposition of the
// bare-state occupations, and the approximate g2(0) = 2 rho66 / rho44^2.
//
// Low-excitation basis labels used throughout:
//   S1=|0,0>, S2=|0,1>, S3=|0,2>, S4=|1,0>, S5=|1,1>, S6=|2,0>.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "kcav/errors.hpp"
#include "kcav/model.hpp"
#include "kcav/spectrum.hpp"

namespace kcav {

template <class T = double>
struct AmplitudeSet {
    std::complex<T> c00{1, 0};
    std::complex<T> c10{}, c01{};           // first order in Omega/kappa_a
    std::complex<T> c20{}, c11{}, c02{};    // second order
    std::complex<T> m_denominator{};        // M of the closed-form solution
};

template <class T = double>
struct PerturbativeFloors {
    T denominator = T(1e-14);  // |P|, |Q| underflow floor
    T rho44 = T(1e-14);
};

namespace detail {

template <class T>
void require_zero_temperature(const SystemParams<T>& p, const char* where) {
    if (p.nbar_a != T(0) || p.nbar_b != T(0))
        throw std::invalid_argument(std::string(where) +
                                    ": zero-temperature baths required (nbar = 0)");
}

template <class T>
T symmetry_scale(const SystemParams<T>& p) {
    return std::max({T(1), std::abs(p.delta_a), std::abs(p.delta_b), p.kappa_a, p.kappa_b});
}

}  // namespace detail

// Closed-form amplitudes, valid for delta_a = delta_b and kappa_a = kappa_b.
template <class T>
AmplitudeSet<T> amplitude_steady_state(const SystemParams<T>& p) {
    p.validate();
    detail::require_zero_temperature(p, "amplitude_steady_state");
    const T scale = detail::symmetry_scale(p);
    if (std::abs(p.delta_a - p.delta_b) > T(1e-12) * scale ||
        std::abs(p.kappa_a - p.kappa_b) > T(1e-12) * scale)
        throw std::invalid_argument(
            "amplitude_steady_state: requires delta_a = delta_b and kappa_a = kappa_b; "
            "use general_amplitude_steady_state instead");

    const std::complex<T> i(0, 1);
    const T d = p.delta_a, k = p.kerr, j = p.hop, kap = p.kappa_a, om = p.drive;
    const std::complex<T> den1 =
        T(4) * j * j + (kap + T(2) * i * d) * (T(2) * i * k + kap + T(2) * i * d);
    const std::complex<T> m =
        den1 * ((kap + T(2) * i * d) * (T(4) * k - i * kap + T(2) * d) *
                    (T(2) * i * k + T(2) * kap + T(4) * i * d) +
                T(4) * j * j * (T(4) * k - T(2) * i * kap + T(4) * d));

    AmplitudeSet<T> amp;
    amp.m_denominator = m;
    amp.c10 = T(2) * (T(2) * k - i * kap + T(2) * d) * om / den1;
    amp.c01 = -T(4) * j * om / den1;
    amp.c20 = T(2) * std::sqrt(T(2)) *
              ((T(2) * k - i * kap + T(2) * d) * (T(4) * k - i * kap + T(2) * d) *
                   (T(2) * k - T(2) * i * kap + T(4) * d) +
               T(8) * j * j * k) *
              om * om / m;
    amp.c11 = -T(8) * j * (T(4) * k - i * kap + T(2) * d) *
              (T(2) * k - T(2) * i * kap + T(4) * d) * om * om / m;
    amp.c02 = T(8) * std::sqrt(T(2)) * j * j * (T(2) * k - T(2) * i * kap + T(4) * d) * om *
              om / m;
    return amp;
}

// Order-by-order steady state of the non-Hermitian Hamiltonian restricted to
// m+n <= 2: C00 = 1, then a 2x2 solve for the one-excitation amplitudes and
// a 3x3 solve for the two-excitation ones.  Valid for any detunings/decays.
template <class T>
AmplitudeSet<T> general_amplitude_steady_state(const SystemParams<T>& p) {
    p.validate();
    detail::require_zero_temperature(p, "general_amplitude_steady_state");

    const Truncation t{2, 2};
    const CMatrix<T> h = build_nonhermitian(p, t);
    const int i00 = t.index(0, 0), i10 = t.index(1, 0), i01 = t.index(0, 1);
    const int i20 = t.index(2, 0), i11 = t.index(1, 1), i02 = t.index(0, 2);

    Eigen::Matrix<std::complex<T>, 2, 2> a1;
    a1 << h(i10, i10), h(i10, i01), h(i01, i10), h(i01, i01);
    Eigen::Matrix<std::complex<T>, 2, 1> b1;
    b1 << -h(i10, i00), -h(i01, i00);
    const Eigen::Matrix<std::complex<T>, 2, 1> c1 = a1.fullPivLu().solve(b1);

    Eigen::Matrix<std::complex<T>, 3, 3> a2;
    a2 << h(i20, i20), h(i20, i11), h(i20, i02),
          h(i11, i20), h(i11, i11), h(i11, i02),
          h(i02, i20), h(i02, i11), h(i02, i02);
    Eigen::Matrix<std::complex<T>, 3, 2> a21;
    a21 << h(i20, i10), h(i20, i01), h(i11, i10), h(i11, i01), h(i02, i10), h(i02, i01);
    const Eigen::Matrix<std::complex<T>, 3, 1> b2 = -(a21 * c1);
    const Eigen::Matrix<std::complex<T>, 3, 1> c2 = a2.fullPivLu().solve(b2);

    AmplitudeSet<T> amp;
    amp.c10 = c1(0);
    amp.c01 = c1(1);
    amp.c20 = c2(0);
    amp.c11 = c2(1);
    amp.c02 = c2(2);
    amp.m_denominator = T(8) * a1.determinant() * a2.determinant();
    if (!std::isfinite(amp.c10.real()) || !std::isfinite(amp.c20.real()) ||
        !std::isfinite(amp.c01.imag()) || !std::isfinite(amp.c02.imag()))
        throw ResonanceSingularityError(
            "general_amplitude_steady_state: singular order-k system");
    return amp;
}

// The 36 steady-state density-matrix elements over |S1>..|S6> plus the
// shared denominators P and Q.  Indices of element(m, n) are the 1-based
// S-labels.
template <class T = double>
struct DmeSet {
    Eigen::Matrix<std::complex<T>, 6, 6> rho;
    std::complex<T> p_denom{}, q_denom{};

    std::complex<T> element(int m, int n) const { return rho(m - 1, n - 1); }
    T occupation(int l) const { return rho(l - 1, l - 1).real(); }
    T rho44() const { return occupation(4); }
    T rho66() const { return occupation(6); }
};

// Closed-form weak-driving density-matrix elements at zero temperature,
// written with a single detuning delta_a = delta_b = Delta but general
// kappa_a, kappa_b.
template <class T>
DmeSet<T> dme_steady_state(const SystemParams<T>& p, const PerturbativeFloors<T>& floors = {}) {
    p.validate();
    detail::require_zero_temperature(p, "dme_steady_state");
    if (std::abs(p.delta_a - p.delta_b) > T(1e-12) * detail::symmetry_scale(p))
        throw std::invalid_argument("dme_steady_state: requires delta_a = delta_b");

    const std::complex<T> i(0, 1);
    const T d = p.delta_a, k = p.kerr, j = p.hop, ka = p.kappa_a, kb = p.kappa_b, om = p.drive;
    const T r2 = std::sqrt(T(2));

    const std::complex<T> d1 = T(2) * k + i * kb + T(2) * d;   // 2K + i kb + 2 Delta
    const std::complex<T> d2 = T(4) * k + i * kb + T(2) * d;   // 4K + i kb + 2 Delta
    const std::complex<T> t3 = T(2) * k + i * (kb - T(4) * i * d + ka);  // 2K + 4D + i(ka+kb)
    const std::complex<T> t4 = T(4) * k + i * (kb - T(4) * i * d + ka);  // 4K + 4D + i(ka+kb)
    const std::complex<T> pd = T(4) * j * j - d1 * (T(2) * d + i * ka);
    const std::complex<T> qd = -d2 * (T(2) * d + i * ka) * t3 + T(4) * j * j * t4;
    if (std::abs(pd) < floors.denominator || std::abs(qd) < floors.denominator)
        throw ResonanceSingularityError("dme_steady_state: |P| or |Q| below underflow floor");
    const T pa2 = std::norm(pd), qa2 = std::norm(qd);
    const std::complex<T> g = T(8) * j * j * k + d1 * d2 * t3;

    const T om2 = om * om, om3 = om2 * om, om4 = om2 * om2;

    DmeSet<T> s;
    s.p_denom = pd;
    s.q_denom = qd;
    auto& r = s.rho;
    r.setZero();

    r(0, 0) = T(1);

    // first order
    r(0, 1) = -T(4) * j * om / pd;
    r(0, 3) = T(2) * d1 * om / pd;

    // second order
    r(0, 2) = T(8) * r2 * j * j * t3 * om2 / (pd * qd);
    r(0, 4) = -T(8) * j * d2 * t3 * om2 / (pd * qd);
    r(0, 5) = T(2) * r2 * g * om2 / (pd * qd);
    r(1, 1) = T(16) * j * j * om2 / pa2;
    r(3, 3) = T(4) * (kb * kb + T(4) * (k + d) * (k + d)) * om2 / pa2;
    // rho24 carries a minus sign: substituting the second-order equation set
    // fixes rho24 = -8 J D1 Omega^2 / |P|^2 = C01 C10^*.
    r(1, 3) = -T(8) * j * d1 * om2 / pa2;

    // third order; rho43 lives below the diagonal, so its conjugate rho34
    // is what enters the upper triangle
    r(1, 2) = -T(32) * r2 * j * j * j * t3 * om3 / (pa2 * qd);
    r(1, 4) = T(32) * j * j * d2 * t3 * om3 / (pa2 * qd);
    r(1, 5) = -T(8) * r2 * j * g * om3 / (pa2 * qd);
    const std::complex<T> rho43 = T(16) * r2 * j * j * std::conj(d1) * t3 * om3 / (pa2 * qd);
    r(2, 3) = std::conj(rho43);
    r(3, 4) = -T(16) * j * std::conj(d1) * d2 * t3 * om3 / (pa2 * qd);
    r(3, 5) = T(4) * r2 * std::conj(d1) * g * om3 / (pa2 * qd);

    // fourth order
    const T t3a2 = T(4) * (k + T(2) * d) * (k + T(2) * d) + (kb + ka) * (kb + ka);
    r(2, 2) = T(128) * j * j * j * j * t3a2 * om4 / (pa2 * qa2);
    r(2, 4) = -T(64) * r2 * j * j * j * d2 * t3a2 * om4 / (pa2 * qa2);
    r(2, 5) = T(32) * j * j * std::conj(t3) * g * om4 / (pa2 * qa2);
    r(4, 4) = T(64) * j * j * (kb * kb + T(4) * (T(2) * k + d) * (T(2) * k + d)) * t3a2 *
              om4 / (pa2 * qa2);
    r(4, 5) = -T(16) * r2 * j * std::conj(d2) * std::conj(t3) * g * om4 / (pa2 * qa2);
    r(5, 5) = T(8) *
              (T(64) * j * j * j * j * k * k +
               T(128) * j * j * k * (k + d) *
                   (-kb * kb + T(2) * k * k + T(5) * k * d + T(2) * d * d) -
               T(32) * j * j * k * kb * (T(3) * k + T(2) * d) * ka +
               (kb * kb + T(4) * (k + d) * (k + d)) *
                   (kb * kb + T(4) * (T(2) * k + d) * (T(2) * k + d)) * t3a2) *
              om4 / (pa2 * qa2);

    // Hermitian closure
    for (int m = 0; m < 6; ++m)
        for (int n = 0; n < m; ++n) r(m, n) = std::conj(r(n, m));
    return s;
}

// g2(0) ~= 2 rho66 / rho44^2.
template <class T>
T g2_approx(const DmeSet<T>& d, const PerturbativeFloors<T>& floors = {}) {
    const T r44 = d.rho44();
    if (!(r44 > floors.rho44))
        throw UndefinedCorrelationError("g2_approx: rho44 below underflow floor");
    return T(2) * d.rho66() / (r44 * r44);
}

// Eigenbasis decomposition of rho44 and rho66 into the direct (squared
// magnitude) terms and the cross terms produced by quantum interference
// between eigenstates of the same excitation subspace.  rho44_total and
// rho66_total carry the recombination |sum_s D_s C^{[s]}|^2, which the split
// must reproduce as direct + interference.
template <class T = double>
struct InterferenceSplit {
    T rho44_direct = 0, rho44_interference = 0, rho44_total = 0;
    T rho66_direct = 0, rho66_interference = 0, rho66_total = 0;
    std::complex<T> d00{}, d1_plus{}, d1_minus{}, d2_plus{}, d2_zero{}, d2_minus{};
};

template <class T>
InterferenceSplit<T> interference_decomposition(const SystemParams<T>& p) {
    const AmplitudeSet<T> amp = general_amplitude_steady_state(p);
    const Eigensystem1<T> e1 = single_excitation_eigensystem(p);
    const Eigensystem2<T> e2 = two_excitation_eigensystem(p);

    // Deep interference dips subtract terms that are orders of magnitude
    // larger than the remainder, so the split is accumulated in long double.
    using W = std::complex<long double>;
    auto widen = [](std::complex<T> z) { return W(z.real(), z.imag()); };

    InterferenceSplit<T> out;
    out.d00 = amp.c00;
    const W d1p = widen(amp.c01) * (long double)e1.c01_plus +
                  widen(amp.c10) * (long double)e1.c10_plus;
    const W d1m = widen(amp.c01) * (long double)e1.c01_minus +
                  widen(amp.c10) * (long double)e1.c10_minus;
    std::array<W, 3> d2;  // s = -, 0, +
    for (int s = 0; s < 3; ++s)
        d2[s] = widen(amp.c02) * (long double)e2.coeffs[s][0] +
                widen(amp.c11) * (long double)e2.coeffs[s][1] +
                widen(amp.c20) * (long double)e2.coeffs[s][2];
    auto narrow = [](W z) { return std::complex<T>(T(z.real()), T(z.imag())); };
    out.d1_plus = narrow(d1p);
    out.d1_minus = narrow(d1m);
    out.d2_minus = narrow(d2[0]);
    out.d2_zero = narrow(d2[1]);
    out.d2_plus = narrow(d2[2]);

    const W up = d1p * (long double)e1.c10_plus;
    const W um = d1m * (long double)e1.c10_minus;
    out.rho44_direct = T(std::norm(up) + std::norm(um));
    out.rho44_interference = T(2.0L * (up * std::conj(um)).real());
    out.rho44_total = T(std::norm(up + um));

    const W wm = d2[0] * (long double)e2.coeffs[0][2];
    const W w0 = d2[1] * (long double)e2.coeffs[1][2];
    const W wp = d2[2] * (long double)e2.coeffs[2][2];
    out.rho66_direct = T(std::norm(wm) + std::norm(w0) + std::norm(wp));
    out.rho66_interference =
        T(2.0L * (wp * std::conj(wm) + wp * std::conj(w0) + wm * std::conj(w0)).real());
    out.rho66_total = T(std::norm(wm + w0 + wp));
    return out;
}

}  // namespace kcav

#endif
