#include <doctest.h>

#include <random>

#include "kcav/conditions.hpp"
#include "kcav/perturbative.hpp"

using namespace kcav;

TEST_CASE("residual symmetry under (K, Delta) -> (-K, -Delta)") {
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> u(-200.0, 200.0), uj(0.0, 100.0);
    for (int rep = 0; rep < 1000; ++rep) {
        const OptimalitySystem<double> sys{uj(rng), 1.0};
        const double k = u(rng), d = u(rng);
        const auto [r, i] = optimality_residuals(sys, k, d);
        const auto [rm, im] = optimality_residuals(sys, -k, -d);
        CHECK(std::abs(rm + r) <= 1e-12 * std::max(1.0, std::abs(r)));
        CHECK(std::abs(im - i) <= 1e-12 * std::max(1.0, std::abs(i)));
    }
}

TEST_CASE("the imaginary-part condition does not involve the hopping") {
    const double k = 3.2, d = -1.7;
    const auto [r1, i1] = optimality_residuals(OptimalitySystem<double>{10.0, 1.0}, k, d);
    const auto [r2, i2] = optimality_residuals(OptimalitySystem<double>{70.0, 1.0}, k, d);
    CHECK(i1 == i2);
    CHECK(r1 != r2);
}

TEST_CASE("residuals at the quoted three-digit solution are small") {
    const OptimalitySystem<double> sys{50.0, 1.0};
    const auto [r, i] = optimality_residuals(sys, 1.54e-4, 0.288);
    CHECK(std::abs(r) <= 5e-3 * 4.0 * sys.hop * sys.hop * 1.54e-4);
    CHECK(std::abs(i) <= 5e-3 * sys.kappa * sys.kappa);
}

TEST_CASE("real solutions of the optimality system at J = 50 kappa") {
    const OptimalitySystem<double> sys{50.0, 1.0};
    const auto sols = solve_optimal_conditions(sys);
    REQUIRE(sols.size() == 4);

    auto expect = [&](double kerr, double delta) {
        bool found = false;
        for (const auto& s : sols)
            found = found || (std::abs(s.kerr - kerr) <= 5e-3 * std::abs(kerr) &&
                              std::abs(s.delta - delta) <= 5e-3 * std::abs(delta));
        CHECK_MESSAGE(found, "missing solution near K=", kerr, " Delta=", delta);
    };
    expect(1.54e-4, 0.288);
    expect(-1.54e-4, -0.288);
    expect(125.859, -91.3359);
    expect(-125.859, 91.3359);

    for (const auto& s : sols) {
        const double bound = 1e-8 * std::max(1.0, std::abs(4.0 * sys.hop * sys.hop * s.kerr));
        CHECK(std::abs(s.residual_r) <= bound);
        CHECK(std::abs(s.residual_i) <= bound);
    }

    // exact mirror closure
    for (const auto& s : sols) {
        bool mirrored = false;
        for (const auto& m : sols) mirrored = mirrored || (m.kerr == -s.kerr && m.delta == -s.delta);
        CHECK(mirrored);
    }
}

TEST_CASE("solution count stays even across hopping strengths") {
    std::mt19937 rng(67);
    std::uniform_real_distribution<double> uj(1.0, 100.0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto sols = solve_optimal_conditions(OptimalitySystem<double>{uj(rng), 1.0});
        CHECK(sols.size() % 2 == 0);
    }
}

TEST_CASE("solutions cancel the two-photon amplitude") {
    const OptimalitySystem<double> sys{50.0, 1.0};
    for (const auto& s : solve_optimal_conditions(sys)) {
        SystemParams<double> p;
        p.delta_a = p.delta_b = s.delta;
        p.kerr = s.kerr;
        p.hop = sys.hop;
        p.drive = 0.1;
        const auto at = amplitude_steady_state(p);
        auto pc = p;
        pc.delta_a = pc.delta_b = 1.5 * s.delta;
        const auto control = amplitude_steady_state(pc);
        CHECK(std::abs(at.c20) * 1e3 <= std::abs(control.c20));
    }
}

TEST_CASE("local minima of synthetic sweeps") {
    using Sweep = std::vector<std::pair<double, double>>;
    CHECK(locate_g2_minima(Sweep{{0, 3}, {1, 2}, {2, 1}, {3, 0.5}}).empty());

    const auto v = locate_g2_minima(Sweep{{0, 2}, {1, 1}, {2, 0.1}, {3, 1}, {4, 2}});
    REQUIRE(v.size() == 1);
    CHECK(v[0].first == 2);
    CHECK(v[0].second == 0.1);

    // plateau minimum reports its smallest delta
    const auto plateau = locate_g2_minima(Sweep{{0, 2}, {1, 1}, {2, 1}, {3, 2}, {4, 3}});
    REQUIRE(plateau.size() == 1);
    CHECK(plateau[0].first == 1);

    CHECK_THROWS_AS(locate_g2_minima(Sweep{{0, 1}, {2, 2}, {1, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(locate_g2_minima(Sweep{{0, 1}, {1, 2}}), std::invalid_argument);
}

TEST_CASE("g2 dips of the weak-driving sweep sit at the single-photon resonances") {
    SystemParams<double> p;
    p.kerr = 25;
    p.hop = 50;
    p.drive = 0.1;
    std::vector<std::pair<double, double>> sweep;
    for (int i = 0; i <= 1600; ++i) {
        const double delta = -100.0 + 0.1 * i;
        p.delta_a = p.delta_b = delta;
        sweep.emplace_back(delta, g2_approx(dme_steady_state(p)));
    }
    // The dips flank the single-photon resonances at -64.0388 and 39.0388;
    // the ratio 2 rho66 / rho44^2 shifts their bottoms slightly (to -64.44
    // and 39.12) because rho66 also rises across the resonance.
    const auto minima = locate_g2_minima(sweep);
    bool near_d1 = false, near_d2 = false;
    for (const auto& [delta, g2] : minima) {
        near_d1 = near_d1 || std::abs(delta - (-64.0388)) <= 0.5;
        near_d2 = near_d2 || std::abs(delta - 39.0388) <= 0.5;
    }
    CHECK(near_d1);
    CHECK(near_d2);
}
