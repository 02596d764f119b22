#ifndef KCAV_CONDITIONS_HPP
#define KCAV_CONDITIONS_HPP

// Optimality system for the interference-equation pair
//   R[J,K,Delta,kappa] = 4J^2K + 8K^3 + 28K^2 Delta + 28K Delta^2 + 8 Delta^3
//                        - 7K kappa^2 - 6 Delta kappa^2 = 0,
//   I[J,K,Delta,kappa] = 14K^2 + 28K Delta + 12 Delta^2 - kappa^2 = 0,
// whose real solutions cancel the two-photon amplitude C20, plus sweep
// utilities for locating g2 minima.
//
// The complex-valued solution pair of the system is intentionally not
// searched for: it does not correspond to physical parameter choices.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "kcav/errors.hpp"

namespace kcav {

template <class T = double>
struct OptimalitySystem {
    T hop = 0;
    T kappa = 1;

    void validate() const {
        if (!(kappa > T(0))) throw std::invalid_argument("OptimalitySystem: kappa > 0 required");
    }
};

template <class T = double>
struct OptimalSolution {
    T kerr = 0;
    T delta = 0;
    T residual_r = 0;
    T residual_i = 0;
};

// Literal evaluation of both polynomials.  Every monomial is odd under
// (K, Delta) -> (-K, -Delta) in R and even in I, so the exact symmetries
// R -> -R and I -> I hold bitwise.
template <class T>
std::pair<T, T> optimality_residuals(const OptimalitySystem<T>& sys, T kerr, T delta) {
    sys.validate();
    const T j = sys.hop, kap = sys.kappa, k = kerr, d = delta;
    const T r = T(4) * j * j * k + T(8) * k * k * k + T(28) * k * k * d +
                T(28) * k * d * d + T(8) * d * d * d - T(7) * k * kap * kap -
                T(6) * d * kap * kap;
    const T i = T(14) * k * k + T(28) * k * d + T(12) * d * d - kap * kap;
    return {r, i};
}

template <class T = double>
struct OptimalityScanOptions {
    T window_factor = T(5);  // scan Delta in [0, window_factor * max(J, kappa)]
    int samples = 20000;     // per conic branch
    T refine_tol = T(1e-10);     // bisection target on |R|, times max(1, |4 J^2 K|)
    T acceptance_tol = T(1e-8);  // residual bound at acceptance, same scale
};

namespace detail {

// Conic branches of I = 0: K = -Delta +- sqrt(112 Delta^2 + 56 kappa^2)/28.
// The discriminant is positive for every Delta.
template <class T>
T conic_kerr(T delta, T kappa, int branch) {
    const T root = std::sqrt(T(112) * delta * delta + T(56) * kappa * kappa);
    return branch > 0 ? -delta + root / T(28) : -delta - root / T(28);
}

}  // namespace detail

// All real solutions of {R = 0, I = 0}, deduplicated and sorted by |Delta|.
// Every found root is emitted together with its mirror (-K, -Delta), which
// the exact symmetry of the system guarantees to be a solution as well, so
// the returned set is mirror-closed by construction.
template <class T>
std::vector<OptimalSolution<T>> solve_optimal_conditions(const OptimalitySystem<T>& sys,
                                                         const OptimalityScanOptions<T>& opt = {}) {
    sys.validate();
    const T w = opt.window_factor * std::max(sys.hop, sys.kappa);
    const T h = w / T(opt.samples);

    std::vector<OptimalSolution<T>> found;
    auto residual_scale = [&](T kerr) {
        return std::max(T(1), std::abs(T(4) * sys.hop * sys.hop * kerr));
    };
    auto r_on_branch = [&](T delta, int branch) {
        return optimality_residuals(sys, detail::conic_kerr(delta, sys.kappa, branch), delta)
            .first;
    };
    auto emit = [&](T delta, int branch) {
        const T kerr = detail::conic_kerr(delta, sys.kappa, branch);
        auto [r, i] = optimality_residuals(sys, kerr, delta);
        if (std::abs(r) > opt.acceptance_tol * residual_scale(kerr))
            throw RootNotFoundError("solve_optimal_conditions: refinement did not reach the "
                                    "acceptance residual");
        found.push_back({kerr, delta, r, i});
        auto [rm, im] = optimality_residuals(sys, -kerr, -delta);
        found.push_back({-kerr, -delta, rm, im});
    };

    for (int branch : {+1, -1}) {
        T prev_x = T(0);
        T prev_f = r_on_branch(prev_x, branch);
        if (prev_f == T(0)) emit(prev_x, branch);
        for (int s = 1; s <= opt.samples; ++s) {
            const T x = T(s) * h;
            const T f = r_on_branch(x, branch);
            if (f == T(0)) {
                emit(x, branch);
            } else if (prev_f * f < T(0)) {
                T lo = prev_x, hi = x, flo = prev_f;
                T best = lo;
                for (int it = 0; it < 200; ++it) {
                    const T mid = (lo + hi) / T(2);
                    const T fm = r_on_branch(mid, branch);
                    best = mid;
                    const T scale = residual_scale(detail::conic_kerr(mid, sys.kappa, branch));
                    if (std::abs(fm) <= opt.refine_tol * scale) break;
                    if (flo * fm < T(0))
                        hi = mid;
                    else {
                        lo = mid;
                        flo = fm;
                    }
                }
                emit(best, branch);
            }
            prev_x = x;
            prev_f = f;
        }
    }

    auto near = [](const OptimalSolution<T>& a, const OptimalSolution<T>& b) {
        const T s = std::max({T(1), std::abs(a.kerr), std::abs(a.delta)});
        return std::abs(a.kerr - b.kerr) <= T(1e-9) * s &&
               std::abs(a.delta - b.delta) <= T(1e-9) * s;
    };
    std::vector<OptimalSolution<T>> unique;
    for (const auto& sol : found) {
        bool dup = false;
        for (const auto& u : unique) dup = dup || near(sol, u);
        if (!dup) unique.push_back(sol);
    }
    std::sort(unique.begin(), unique.end(), [](const auto& a, const auto& b) {
        if (std::abs(a.delta) != std::abs(b.delta)) return std::abs(a.delta) < std::abs(b.delta);
        if (a.delta != b.delta) return a.delta < b.delta;
        return a.kerr < b.kerr;
    });
    return unique;
}

// Strict interior local minima of a (delta, g2) sweep; plateaus report their
// smallest delta.  The input must be sorted by strictly increasing delta.
template <class T>
std::vector<std::pair<T, T>> locate_g2_minima(const std::vector<std::pair<T, T>>& sweep) {
    if (sweep.size() < 3)
        throw std::invalid_argument("locate_g2_minima: need at least 3 sweep points");
    for (std::size_t i = 1; i < sweep.size(); ++i)
        if (!(sweep[i].first > sweep[i - 1].first))
            throw std::invalid_argument("locate_g2_minima: sweep must be sorted by delta");

    std::vector<std::pair<T, T>> minima;
    std::size_t i = 1;
    while (i + 1 < sweep.size()) {
        std::size_t j = i;
        while (j + 1 < sweep.size() && sweep[j + 1].second == sweep[i].second) ++j;
        if (j + 1 < sweep.size() && sweep[i - 1].second > sweep[i].second &&
            sweep[j + 1].second > sweep[j].second)
            minima.push_back(sweep[i]);
        i = j + 1;
    }
    return minima;
}

}  // namespace kcav

#endif
