#include <doctest.h>

#include <random>

#include "kcav/lindblad.hpp"
#include "kcav/perturbative.hpp"

using namespace kcav;
using std::complex;

namespace {

SystemParams<double> make_params(double delta, double kerr = 25, double hop = 50,
                                 double drive = 0.1) {
    SystemParams<double> p;
    p.delta_a = p.delta_b = delta;
    p.kerr = kerr;
    p.hop = hop;
    p.drive = drive;
    return p;
}

// S-basis composite indices: S1..S6 = |0,0>,|0,1>,|0,2>,|1,0>,|1,1>,|2,0>.
std::array<int, 6> s_basis_indices(const Truncation& t) {
    return {t.index(0, 0), t.index(0, 1), t.index(0, 2),
            t.index(1, 0), t.index(1, 1), t.index(2, 0)};
}

}  // namespace

TEST_CASE("closed-form amplitudes in the decoupled limit") {
    auto p = make_params(0.37, 3.1, 0.0);
    const auto amp = amplitude_steady_state(p);
    CHECK(std::abs(amp.c01) == 0.0);
    CHECK(std::abs(amp.c11) == 0.0);
    CHECK(std::abs(amp.c02) == 0.0);
    // without hopping the driven cavity is linear, so the two-photon
    // amplitude is the coherent-state value C10^2 / sqrt(2)
    const complex<double> coherent = amp.c10 * amp.c10 / std::sqrt(2.0);
    CHECK(std::abs(amp.c20 - coherent) <= 1e-12 * std::abs(coherent));
}

TEST_CASE("closed-form amplitudes require the symmetric parameter point") {
    auto p = make_params(0.5);
    p.delta_b = 0.6;
    CHECK_THROWS_AS(amplitude_steady_state(p), std::invalid_argument);
    auto q = make_params(0.5);
    q.kappa_b = 1.5;
    CHECK_THROWS_AS(amplitude_steady_state(q), std::invalid_argument);
    auto r = make_params(0.5);
    r.nbar_b = 0.1;
    CHECK_THROWS_AS(amplitude_steady_state(r), std::invalid_argument);
}

TEST_CASE("general amplitude solve agrees with the closed forms") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> ud(-80.0, 80.0), uk(0.0, 60.0);
    for (int rep = 0; rep < 200; ++rep) {
        const auto p = make_params(ud(rng), uk(rng), uk(rng));
        const auto closed = amplitude_steady_state(p);
        const auto general = general_amplitude_steady_state(p);
        auto close = [](complex<double> a, complex<double> b) {
            return std::abs(a - b) <= 1e-10 * std::max(1e-30, std::abs(a));
        };
        CHECK(close(closed.c10, general.c10));
        CHECK(close(closed.c01, general.c01));
        CHECK(close(closed.c20, general.c20));
        CHECK(close(closed.c11, general.c11));
        CHECK(close(closed.c02, general.c02));
        CHECK(close(closed.m_denominator, general.m_denominator));
    }
}

TEST_CASE("amplitudes vanish without driving") {
    const auto amp = general_amplitude_steady_state(make_params(1.0, 25, 50, 0.0));
    CHECK(std::abs(amp.c10) == 0.0);
    CHECK(std::abs(amp.c01) == 0.0);
    CHECK(std::abs(amp.c20) == 0.0);
}

TEST_CASE("amplitude order scaling in the drive") {
    auto p = make_params(0.7, 12.0, 30.0, 0.1);
    const auto full = amplitude_steady_state(p);
    p.drive = 0.05;
    const auto half = amplitude_steady_state(p);
    CHECK(std::abs(half.c10 - full.c10 / 2.0) <= 1e-10 * std::abs(full.c10));
    CHECK(std::abs(half.c01 - full.c01 / 2.0) <= 1e-10 * std::abs(full.c01));
    CHECK(std::abs(half.c20 - full.c20 / 4.0) <= 1e-10 * std::abs(full.c20));
    CHECK(std::abs(half.c11 - full.c11 / 4.0) <= 1e-10 * std::abs(full.c11));
    CHECK(std::abs(half.c02 - full.c02 / 4.0) <= 1e-10 * std::abs(full.c02));
}

TEST_CASE("two-photon amplitude collapses at the interference optimum") {
    // exact root of the optimality system near the quoted (1.54e-4, 0.288)
    const auto at_opt = amplitude_steady_state(make_params(0.28849552, 1.53960078e-4, 50.0));
    const auto off_opt = amplitude_steady_state(make_params(0.2, 1.53960078e-4, 50.0));
    CHECK(std::abs(at_opt.c20) * 1e3 < std::abs(off_opt.c20));

    // at the three-digit rounded point the suppression is weaker but clear
    const auto rounded = amplitude_steady_state(make_params(0.288, 1.54e-4, 50.0));
    CHECK(std::abs(rounded.c20) * 1e2 < std::abs(off_opt.c20));
}

TEST_CASE("strong antibunching at the large-Kerr optimum") {
    const auto amp = general_amplitude_steady_state(make_params(-91.3359, 125.859, 50.0));
    const double g2 = 2.0 * std::norm(amp.c20) / (std::norm(amp.c10) * std::norm(amp.c10));
    CHECK(g2 < 1e-2);
}

TEST_CASE("density-matrix elements: explicit second-order formulas") {
    const auto p = make_params(0.0, 25, 50, 0.1);
    const auto dme = dme_steady_state(p);

    const complex<double> i(0, 1);
    const complex<double> pd =
        4.0 * p.hop * p.hop -
        (2.0 * p.kerr + i * p.kappa_b + 2.0 * p.delta_a) * (2.0 * p.delta_a + i * p.kappa_a);
    CHECK(std::abs(dme.p_denom - pd) <= 1e-12 * std::abs(pd));
    const double rho22 = 16.0 * p.hop * p.hop * p.drive * p.drive / std::norm(pd);
    CHECK(dme.occupation(2) == doctest::Approx(rho22).epsilon(1e-12));

    // rho24 equals the amplitude product C01 C10^*
    const auto amp = amplitude_steady_state(p);
    const complex<double> prod = amp.c01 * std::conj(amp.c10);
    CHECK(std::abs(dme.element(2, 4) - prod) <= 1e-12 * std::abs(prod));
}

TEST_CASE("density-matrix elements are Hermitian and sensibly ordered") {
    const auto dme = dme_steady_state(make_params(-30.0));
    for (int m = 1; m <= 6; ++m)
        for (int n = 1; n <= 6; ++n)
            CHECK(std::abs(dme.element(m, n) - std::conj(dme.element(n, m))) == 0.0);
    for (int l = 1; l <= 6; ++l) CHECK(dme.occupation(l) >= 0.0);
    CHECK(dme.occupation(1) == 1.0);
    // order structure: halving the drive divides order-l elements by 2^l
    auto p = make_params(-30.0);
    p.drive = 0.05;
    const auto half = dme_steady_state(p);
    CHECK(std::abs(half.element(1, 4) - dme.element(1, 4) / 2.0) <=
          1e-12 * std::abs(dme.element(1, 4)));
    CHECK(std::abs(half.element(2, 4) - dme.element(2, 4) / 4.0) <=
          1e-12 * std::abs(dme.element(2, 4)));
    CHECK(std::abs(half.element(4, 5) - dme.element(4, 5) / 8.0) <=
          1e-12 * std::abs(dme.element(4, 5)));
    CHECK(std::abs(half.element(6, 6) - dme.element(6, 6) / 16.0) <=
          1e-12 * std::abs(dme.element(6, 6)));
}

TEST_CASE("rho66 expansion equals 8 |8J^2K + D1 D2 T3|^2 Omega^4 / (|P|^2 |Q|^2)") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> ud(-60.0, 60.0), uk(0.0, 40.0), ukap(0.2, 2.0);
    for (int rep = 0; rep < 100; ++rep) {
        SystemParams<double> p;
        p.delta_a = p.delta_b = ud(rng);
        p.kerr = uk(rng);
        p.hop = uk(rng);
        p.drive = 0.1;
        p.kappa_a = ukap(rng);
        p.kappa_b = ukap(rng);
        const auto dme = dme_steady_state(p);
        const complex<double> i(0, 1);
        const complex<double> d1 = 2.0 * p.kerr + i * p.kappa_b + 2.0 * p.delta_a;
        const complex<double> d2 = 4.0 * p.kerr + i * p.kappa_b + 2.0 * p.delta_a;
        const complex<double> t3 =
            2.0 * p.kerr + 4.0 * p.delta_a + i * (p.kappa_a + p.kappa_b);
        const complex<double> g = 8.0 * p.hop * p.hop * p.kerr + d1 * d2 * t3;
        const double expect = 8.0 * std::norm(g) * std::pow(p.drive, 4) /
                              (std::norm(dme.p_denom) * std::norm(dme.q_denom));
        CHECK(dme.occupation(6) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("perturbative table matches the master-equation steady state to 5%") {
    const Truncation t{3, 3};
    for (double delta : {0.0, -30.0, 20.0, -64.0388, 39.0388}) {
        const auto p = make_params(delta);
        const auto dme = dme_steady_state(p);
        const auto rho = steady_state(build_liouvillian(p, t)).rho.entries;
        const auto idx = s_basis_indices(t);
        for (int m = 0; m < 6; ++m)
            for (int n = 0; n < 6; ++n) {
                const complex<double> numeric = rho(idx[m], idx[n]);
                const complex<double> pert = dme.rho(m, n);
                CHECK(std::abs(pert - numeric) <= 0.05 * std::abs(numeric));
            }
    }
}

TEST_CASE("perturbative and amplitude solutions are mutually consistent") {
    for (double delta : {-64.0388, -10.0, 5.0, 39.0388}) {
        const auto p = make_params(delta);
        const auto dme = dme_steady_state(p);
        const auto amp = amplitude_steady_state(p);
        const double w2 = p.drive * p.drive;  // relative corrections are O((Omega/kappa)^2)
        CHECK(std::abs(dme.occupation(4) - std::norm(amp.c10)) <=
              5.0 * w2 * std::norm(amp.c10));
        CHECK(std::abs(dme.occupation(2) - std::norm(amp.c01)) <=
              5.0 * w2 * std::norm(amp.c01));
        CHECK(std::abs(dme.occupation(6) - std::norm(amp.c20)) <=
              5.0 * w2 * std::norm(amp.c20));
        const double g2_amp = 2.0 * std::norm(amp.c20) / (std::norm(amp.c10) * std::norm(amp.c10));
        CHECK(g2_approx(dme) == doctest::Approx(g2_amp).epsilon(0.05));
    }
}

TEST_CASE("g2_approx properties") {
    const auto p = make_params(-64.0388);
    CHECK(g2_approx(dme_steady_state(p)) < 1.0);  // single-photon resonance dip

    // both numerator and denominator scale as Omega^4: exactly drive-invariant
    auto q = make_params(12.0);
    const double g_full = g2_approx(dme_steady_state(q));
    q.drive = 0.05;
    const double g_half = g2_approx(dme_steady_state(q));
    CHECK(g_half == doctest::Approx(g_full).epsilon(1e-12));

    // agreement with the master equation on a sparse sample of the sweep
    const Truncation t{3, 3};
    for (double delta : {-80.0, -50.0, -15.0, 0.0, 25.0, 50.0}) {
        const auto pp = make_params(delta);
        const double g_numeric = g2_zero(steady_state(build_liouvillian(pp, t)).rho);
        const double g_pert = g2_approx(dme_steady_state(pp));
        if (g_numeric >= 1e-3 && g_numeric <= 1e3)
            CHECK(std::abs(g_pert - g_numeric) <= 0.05 * g_numeric);
    }
}

TEST_CASE("interference split reconstructs the occupations exactly") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> ud(-80.0, 80.0), uk(1.0, 60.0);
    for (int rep = 0; rep < 200; ++rep) {
        SystemParams<double> p;
        p.delta_a = ud(rng);
        p.delta_b = ud(rng);
        p.kerr = uk(rng);
        p.hop = uk(rng);
        p.drive = 0.1;
        InterferenceSplit<double> split;
        AmplitudeSet<double> amp;
        try {
            split = interference_decomposition(p);
            amp = general_amplitude_steady_state(p);
        } catch (const DegenerateCubicError&) {
            continue;
        }
        // completeness: direct + interference reproduces the recombination
        CHECK(std::abs(split.rho44_direct + split.rho44_interference - split.rho44_total) <=
              1e-12 * std::max(split.rho44_total, 1e-300));
        CHECK(std::abs(split.rho66_direct + split.rho66_interference - split.rho66_total) <=
              1e-12 * std::max(split.rho66_total, 1e-300));
        // and the recombination is the bare-basis occupation, up to the
        // closed-form eigenvector roundoff (amplified where terms cancel)
        const double rho44 = std::norm(amp.c10), rho66 = std::norm(amp.c20);
        CHECK(std::abs(split.rho44_total - rho44) <=
              1e-10 * std::max(split.rho44_direct, rho44));
        CHECK(std::abs(split.rho66_total - rho66) <=
              1e-10 * std::max(split.rho66_direct, rho66));
        CHECK(split.rho44_direct >= 0.0);
        CHECK(split.rho66_direct >= 0.0);
    }
}

TEST_CASE("interference split totals match the master equation") {
    // away from the interference dips, where the neglected O(Omega^2)
    // repopulation corrections are not amplified
    const Truncation t{3, 3};
    for (double delta : {-64.0388, -40.0, 10.0, 39.0388}) {
        const auto p = make_params(delta);
        const auto split = interference_decomposition(p);
        const auto rho = steady_state(build_liouvillian(p, t)).rho.entries;
        const double rho44 = rho(t.index(1, 0), t.index(1, 0)).real();
        const double rho66 = rho(t.index(2, 0), t.index(2, 0)).real();
        CHECK(std::abs(split.rho44_total - rho44) <= 0.05 * rho44);
        CHECK(std::abs(split.rho66_total - rho66) <= 0.05 * rho66);
    }
}

TEST_CASE("the interference dip is absent from the direct part") {
    // scan the occupation of |1,0> across the two single-photon resonances
    std::vector<double> deltas, direct, total;
    for (double d = -100.0; d <= 60.0; d += 0.5) {
        const auto split = interference_decomposition(make_params(d));
        deltas.push_back(d);
        direct.push_back(split.rho44_direct);
        total.push_back(split.rho44_total);
    }
    auto interior_maxima = [](const std::vector<double>& y) {
        std::vector<std::size_t> m;
        for (std::size_t i = 1; i + 1 < y.size(); ++i)
            if (y[i] > y[i - 1] && y[i] > y[i + 1]) m.push_back(i);
        return m;
    };
    const auto peaks = interior_maxima(direct);
    REQUIRE(peaks.size() == 2);

    double direct_min = direct[peaks[0]], total_min = total[peaks[0]];
    for (std::size_t i = peaks[0]; i <= peaks[1]; ++i) {
        direct_min = std::min(direct_min, direct[i]);
        total_min = std::min(total_min, total[i]);
    }
    // the deep interference dip of the total occupation has no counterpart
    // in the non-interference curve
    CHECK(total_min * 10.0 < direct_min);
}

TEST_CASE("degenerate cubic propagates out of the decomposition") {
    CHECK_THROWS_AS(interference_decomposition(make_params(1.0, 0.0, 0.0)),
                    DegenerateCubicError);
}

TEST_CASE("resonance singularity guard") {
    // P vanishes when 4J^2 = (2K + i kb + 2D)(2D + i ka) has a real solution;
    // at kappa -> 0 this is the bare one-excitation resonance.  With finite
    // kappa the guard only trips for extreme parameters, so drive P below the
    // floor artificially via huge hopping cancellation is impractical; instead
    // check the rho44 floor of g2_approx.
    DmeSet<double> dme = dme_steady_state(make_params(0.0));
    dme.rho(3, 3) = 1e-16;
    CHECK_THROWS_AS(g2_approx(dme), UndefinedCorrelationError);
}
