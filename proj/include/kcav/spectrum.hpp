#ifndef KCAV_SPECTRUM_HPP
#define KCAV_SPECTRUM_HPP

// Closed-form eigensystems of the undriven coupled-cavity Hamiltonian in the
// zero-, one- and two-excitation subspaces, plus the resonance-detuning
// finders used in the blockade analysis.
//
// Subspace bases: N=1 -> {|0,1>, |1,0>};  N=2 -> {|0,2>, |1,1>, |2,0>}.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "kcav/errors.hpp"
#include "kcav/model.hpp"

namespace kcav {

template <class T = double>
struct Eigensystem1 {
    T e_plus = 0;
    T e_minus = 0;
    T theta = 0;  // mixing angle, radians
    // Superposition coefficients: c01_plus = c10_minus = cos(theta),
    // c10_plus = -c01_minus = sin(theta).
    T c01_plus = 1, c10_plus = 0;
    T c01_minus = 0, c10_minus = 1;
};

// Auxiliaries of the trigonometric cubic solution in the N=2 subspace.
template <class T = double>
struct CubicAux {
    T a_coef = 0, b_coef = 0, c_coef = 0, d_coef = 0, e_coef = 0;
    T alpha = 0;
    std::array<T, 3> norms{};  // N_{2s} for s = -, 0, +
};

template <class T = double>
struct Eigensystem2 {
    // Energies ordered E_{2-} <= E_{20} <= E_{2+}.
    std::array<T, 3> energies{};
    // coeffs[s] = (C02, C11, C20) for s = -, 0, +; each row unit-norm.
    std::array<std::array<T, 3>, 3> coeffs{};
    CubicAux<T> aux;
    bool numeric_fallback = false;
};

template <class T>
Eigensystem1<T> single_excitation_eigensystem(const SystemParams<T>& p) {
    Eigensystem1<T> e;
    const T gap = p.delta_b - p.delta_a + p.kerr;
    const T root = std::sqrt(gap * gap + T(4) * p.hop * p.hop);
    const T mean = (p.delta_a + p.delta_b + p.kerr) / T(2);
    e.e_plus = mean + root / T(2);
    e.e_minus = mean - root / T(2);
    e.theta = T(0.5) * std::atan2(T(2) * p.hop, gap);
    const T c = std::cos(e.theta), s = std::sin(e.theta);
    e.c01_plus = c;
    e.c10_plus = s;
    e.c01_minus = -s;
    e.c10_minus = c;
    return e;
}

// 3x3 matrix of the N=2 block in the basis {|0,2>, |1,1>, |2,0>}.
template <class T>
CMatrix<T> two_excitation_block(const SystemParams<T>& p) {
    const T r2j = std::sqrt(T(2)) * p.hop;
    CMatrix<T> h(3, 3);
    h << std::complex<T>(T(2) * p.delta_b + T(4) * p.kerr), std::complex<T>(r2j), std::complex<T>(0),
        std::complex<T>(r2j), std::complex<T>(p.delta_a + p.delta_b + p.kerr), std::complex<T>(r2j),
        std::complex<T>(0), std::complex<T>(r2j), std::complex<T>(T(2) * p.delta_a);
    return h;
}

namespace detail {

template <class T>
CubicAux<T> cubic_aux(const SystemParams<T>& p) {
    const T da = p.delta_a, db = p.delta_b, k = p.kerr, j = p.hop;
    CubicAux<T> x;
    x.a_coef = -T(5) * k - T(3) * da - T(3) * db;
    x.b_coef = -T(4) * j * j + T(4) * k * k + T(14) * k * da + T(2) * da * da +
               T(6) * k * db + T(8) * da * db + T(2) * db * db;
    x.c_coef = T(8) * j * j * k + T(4) * j * j * da - T(8) * k * k * da -
               T(8) * k * da * da + T(4) * j * j * db - T(12) * k * da * db -
               T(4) * da * da * db - T(4) * da * db * db;
    x.d_coef = x.b_coef - x.a_coef * x.a_coef / T(3);
    x.e_coef = x.c_coef + T(2) / T(27) * x.a_coef * x.a_coef * x.a_coef -
               x.a_coef * x.b_coef / T(3);
    return x;
}

template <class T>
std::array<T, 3> trig_energies(CubicAux<T>& x) {
    if (!(x.d_coef < T(0)))
        throw DegenerateCubicError(
            "two_excitation_eigensystem: D >= 0, closed-form branch is degenerate; "
            "use the numeric diagonalization path");
    const T sq = std::sqrt(T(-3) * x.d_coef);
    T arg = -T(3) * x.e_coef * sq / (T(2) * x.d_coef * x.d_coef);
    if (std::abs(arg) > T(1) + T(1e-9))
        throw DegenerateCubicError(
            "two_excitation_eigensystem: arccos argument outside [-1,1] beyond "
            "tolerance; use the numeric diagonalization path");
    arg = std::clamp(arg, T(-1), T(1));
    x.alpha = std::acos(arg);
    const T c = std::cos(x.alpha / T(3)), s = std::sin(x.alpha / T(3));
    const T r3 = std::sqrt(T(3));
    std::array<T, 3> e;
    e[0] = -(x.a_coef + sq * (c + r3 * s)) / T(3);  // E_{2-}
    e[1] = -(x.a_coef + sq * (c - r3 * s)) / T(3);  // E_{20}
    e[2] = -(x.a_coef - T(2) * sq * c) / T(3);      // E_{2+}
    return e;
}

// Unit eigenvector for energy e; falls back to a coordinate vector when the
// closed-form components vanish jointly (e.g. the decoupled J = 0 limit).
template <class T>
std::array<T, 3> two_excitation_vector(const SystemParams<T>& p, T e, T& norm_out) {
    const T r2j = std::sqrt(T(2)) * p.hop;
    const T u = e - T(2) * p.delta_a;
    const T v = T(2) * p.delta_b + T(4) * p.kerr - e;
    const T n = u * u * (T(2) * p.hop * p.hop + v * v) + T(2) * p.hop * p.hop * v * v;
    norm_out = n;
    const T scale = std::max({std::abs(u), std::abs(v), std::abs(r2j), T(1)});
    if (std::sqrt(std::max(n, T(0))) > T(1e-12) * scale * scale) {
        const T inv = T(1) / std::sqrt(n);
        return {-r2j * u * inv, u * v * inv, r2j * v * inv};
    }
    // Coordinate eigenvector: match e against the nearest diagonal entry.
    const std::array<T, 3> diag{T(2) * p.delta_b + T(4) * p.kerr,
                                p.delta_a + p.delta_b + p.kerr, T(2) * p.delta_a};
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(diag[i] - e) < std::abs(diag[best] - e)) best = i;
    std::array<T, 3> vec{};
    vec[best] = T(1);
    return vec;
}

}  // namespace detail

template <class T>
Eigensystem2<T> two_excitation_eigensystem(const SystemParams<T>& p) {
    Eigensystem2<T> out;
    out.aux = detail::cubic_aux(p);
    out.energies = detail::trig_energies(out.aux);
    const T scale = std::max({std::abs(out.energies[0]), std::abs(out.energies[2]), T(1)});
    if (out.energies[0] > out.energies[1] + T(1e-12) * scale ||
        out.energies[1] > out.energies[2] + T(1e-12) * scale)
        throw DegenerateCubicError(
            "two_excitation_eigensystem: branch ordering E- <= E0 <= E+ violated");
    for (int s = 0; s < 3; ++s)
        out.coeffs[s] = detail::two_excitation_vector(p, out.energies[s], out.aux.norms[s]);
    return out;
}

// Closed form when valid, numeric diagonalization otherwise (flagged).
template <class T>
Eigensystem2<T> two_excitation_eigensystem_or_numeric(const SystemParams<T>& p) {
    try {
        return two_excitation_eigensystem(p);
    } catch (const DegenerateCubicError&) {
        Eigensystem2<T> out;
        out.aux = detail::cubic_aux(p);
        Eigen::SelfAdjointEigenSolver<CMatrix<T>> es(two_excitation_block(p));
        for (int s = 0; s < 3; ++s) {
            out.energies[s] = es.eigenvalues()(s);
            for (int i = 0; i < 3; ++i) out.coeffs[s][i] = es.eigenvectors()(i, s).real();
            out.aux.norms[s] = T(1);
        }
        out.numeric_fallback = true;
        return out;
    }
}

// Detunings of the two single-photon resonances E_{1s}(Delta) = 0 for the
// delta_a = delta_b = Delta scan: Delta = -(K -+ sqrt(K^2+4J^2))/2.
// Returned as (minus branch, plus branch).
template <class T>
std::pair<T, T> conventional_resonance_detunings(T kerr, T hop) {
    const T root = std::sqrt(kerr * kerr + T(4) * hop * hop);
    return {-(kerr - root) / T(2), -(kerr + root) / T(2)};
}

template <class T = double>
struct ResonanceScanOptions {
    std::optional<T> window;  // scan over [-window, +window]
    int samples = 4000;
    T tol = T(1e-10);  // refine until |E_{2s}| <= tol
};

// Detunings of the three two-photon resonances E_{2s}(Delta) = 0 for the
// delta_a = delta_b = Delta scan, sorted ascending.
template <class T>
std::array<T, 3> two_photon_resonance_detunings(T kerr, T hop,
                                                const ResonanceScanOptions<T>& opt = {}) {
    const T w = opt.window.value_or(kerr + T(3) * std::sqrt(kerr * kerr + T(4) * hop * hop));
    auto energy = [&](int s, T delta) {
        SystemParams<T> p;
        p.delta_a = delta;
        p.delta_b = delta;
        p.kerr = kerr;
        p.hop = hop;
        return two_excitation_eigensystem_or_numeric(p).energies[s];
    };
    std::array<T, 3> roots{};
    for (int s = 0; s < 3; ++s) {
        bool found = false;
        T prev_x = -w, prev_f = energy(s, -w);
        if (std::abs(prev_f) <= opt.tol) {
            roots[s] = prev_x;
            continue;
        }
        for (int i = 1; i <= opt.samples && !found; ++i) {
            const T x = -w + T(2) * w * T(i) / T(opt.samples);
            const T f = energy(s, x);
            if (std::abs(f) <= opt.tol) {
                roots[s] = x;
                found = true;
            } else if (prev_f * f < T(0)) {
                T lo = prev_x, hi = x, flo = prev_f;
                for (int it = 0; it < 200; ++it) {
                    const T mid = (lo + hi) / T(2);
                    const T fm = energy(s, mid);
                    if (std::abs(fm) <= opt.tol) {
                        lo = hi = mid;
                        break;
                    }
                    if (flo * fm < T(0))
                        hi = mid;
                    else {
                        lo = mid;
                        flo = fm;
                    }
                }
                roots[s] = (lo + hi) / T(2);
                found = true;
            }
            prev_x = x;
            prev_f = f;
        }
        if (!found)
            throw RootNotFoundError("two_photon_resonance_detunings: no sign change of E_2" +
                                    std::string(s == 0 ? "-" : s == 1 ? "0" : "+") +
                                    " in [" + std::to_string(double(-w)) + ", " +
                                    std::to_string(double(w)) + "]");
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace kcav

#endif
