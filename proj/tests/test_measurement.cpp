#include <doctest.h>

#include <cmath>
#include <numbers>

#include "catqnd/errors.hpp"
#include "catqnd/measurement.hpp"
#include "catqnd/rwa.hpp"
#include "catqnd/zeno.hpp"
#include "gen.hpp"

using namespace catqnd;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ReadoutParams readout(double phi_c, double n_c) {
    ReadoutParams r;
    r.phi_c = phi_c;
    r.n_c = n_c;
    return r;
}

ModeFrequencies device() {
    ModeFrequencies f;
    f.omega_a = kTwoPi * 9.10e9;
    f.omega_b = kTwoPi * 7.5e9;
    return f;
}

}  // namespace

TEST_CASE("single-mode dispersive rates") {
    const auto r = dispersive_rates_single(1.0, 4.0, 2.0, readout(0.1, 1.0));
    const double want = 0.01 * std::exp(-0.005) / std::sqrt(8 * std::numbers::pi);
    CHECK(r.gamma_m == doctest::Approx(want).epsilon(1e-13));
    CHECK(r.gamma_m == doctest::Approx(1.99e-3).epsilon(0.01));
    CHECK(r.gamma_m == doctest::Approx(r.chi));
    CHECK(r.optimal_kappa_c == r.chi);
    CHECK(r.omega_tilde == doctest::Approx(std::exp(-0.005) * omega_a_approx(1.0, 4.0, 2.0)).epsilon(1e-14));

    const auto r3 = dispersive_rates_single(1.0, 4.0, 2.0, readout(0.1, 3.0));
    CHECK(r3.gamma_m == doctest::Approx(3 * r3.chi).epsilon(1e-14));

    // quadratic onset in phi_c
    const double g1 = dispersive_rates_single(1.0, 4.0, 2.0, readout(1e-3, 1.0)).gamma_m;
    const double g2 = dispersive_rates_single(1.0, 4.0, 2.0, readout(2e-3, 1.0)).gamma_m;
    CHECK(g2 / g1 == doctest::Approx(4.0).epsilon(1e-5));

    // E_J/hbar = 2 pi 300 MHz: Gamma_m / 2 pi lands between 0.1 and 10 MHz
    const double hz = dispersive_rates_single(kTwoPi * 300e6, 4.0, 2.0, readout(0.1, 1.0)).gamma_m / kTwoPi;
    CHECK(hz > 1e5);
    CHECK(hz < 1e7);
}

TEST_CASE("readout guard") {
    CHECK_NOTHROW(readout(0.2, 1.2).validate());
    CHECK_THROWS_AS(readout(0.3, 1.0).validate(), DispersiveRegimeError);
    CHECK_THROWS_AS(dispersive_rates_single(1.0, 4.0, 2.0, readout(0.1, 6.0)), DispersiveRegimeError);
    CHECK_THROWS_AS(dispersive_rates_joint(1.0, 4.0, 4.0, 2.0, 2.0, readout(0.5, 1.0)), DispersiveRegimeError);
    CHECK_THROWS_AS(readout(-0.1, 1.0).validate(), ValidationError);
}

TEST_CASE("joint dispersive rates") {
    const auto r = readout(0.1, 1.0);
    const auto j = dispersive_rates_joint(1.0, 4.0, 6.0, 2.0, 3.0, r);
    const double peak = 0.01 * std::exp(-0.005) / (2 * std::numbers::pi * std::sqrt(2.0 * 3.0 * 4.0 * 6.0));
    CHECK(j.gamma_m == doctest::Approx(peak).epsilon(1e-13));

    gen::Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const double ej = rng.uniform(0.1, 3), pa = rng.uniform(1, 10), pb = rng.uniform(1, 10);
        const double a = rng.uniform(0.5, 5), b = rng.uniform(0.5, 5);
        const double x = dispersive_rates_joint(ej, pa, pb, a, b, r).gamma_m;
        CHECK(x == doctest::Approx(dispersive_rates_joint(ej, pb, pa, b, a, r).gamma_m).epsilon(1e-14));
        // Omega_ab = Omega_a Omega_b / 2 E_J, so the joint rate is the single rate times Omega_b / 2 E_J
        const double single = dispersive_rates_single(ej, pa, a, r).gamma_m;
        CHECK(x == doctest::Approx(single * omega_a_approx(ej, pb, b) / (2 * ej)).epsilon(1e-13));
    }
}

TEST_CASE("closed-form Gamma_m against the exact Omega_a") {
    const auto r = readout(0.1, 1.0);
    for (double a : {1.5, 2.0, 3.0, 4.0}) {
        const double phi = 2 * a;
        const double approx = dispersive_rates_single(1.0, phi, a, r).gamma_m;
        const double exact = r.n_c * r.phi_c * r.phi_c * std::exp(-0.005) * omega_a_exact(1.0, phi, a);
        const double envelope = 1.0 / (8 * a * phi) + 2 * std::exp(-phi * phi / 2) / omega_a_approx(1.0, phi, a);
        CHECK(std::abs(exact - approx) / approx <= envelope);
    }
}

TEST_CASE("Gamma_m peaks at the stationary point of the closed form") {
    const auto r = readout(0.1, 1.0);
    for (double a : {1.5, 2.0, 3.0, 5.0}) {
        // d/dphi [e^{-(phi-2a)^2/2} / sqrt(phi)] = 0  =>  phi^2 - 2 a phi + 1/2 = 0
        const double star = a + std::sqrt(a * a - 0.5);
        double best = -1, arg = 0;
        for (double phi = 0.5; phi <= 4 * a; phi += 0.01) {
            const double g = dispersive_rates_single(1.0, phi, a, r).gamma_m;
            if (g > best) best = g, arg = phi;
        }
        CHECK(std::abs(arg - star) <= 0.2);
        CHECK(std::abs(arg - 2 * a) <= 0.2);
    }
}

TEST_CASE("dephasing ratios") {
    const double EJ = kTwoPi * 300e6;
    CHECK(dephasing_truncation(2.0) == 26);
    const auto d = dephasing_ratios_two_mode(EJ, 4.0, 4.0, 2.0, 2.0, device());
    CHECK(d.plus_ratio >= 3e-4);
    CHECK(d.plus_ratio <= 3e-3);
    CHECK(d.minus_ratio >= 1.5e-3);
    CHECK(d.minus_ratio <= 1.5e-2);
    CHECK(d.dim == 26);
    CHECK(d.l_max_used > 12);
    CHECK(d.tail <= 1e-12);
    // the matrix-element Gamma_m and the closed-form 2 Omega_ab agree to the F-bound
    CHECK(std::abs(d.gamma_m - d.two_omega_ab) / d.two_omega_ab < 0.03);

    SUBCASE("first order alone") {
        JunctionParams p;
        p.E_J = EJ;
        p.phi_a = 4.0;
        p.phi_b = 4.0;
        const auto sp = FockSpace::product(FockSpace(26), FockSpace(26));
        const auto f = dephasing_ratios_from_h(h_rwa_two_mode(p, sp), 2.0, 2.0);
        // product form: c_st = -x_s x_t / E_J, so the minus combination cancels identically
        // and the plus ratio is |x+ + x-| / |x+ - x-|
        CHECK(f.minus_ratio <= 1e-12);
        const auto c = c_pm_normalized(EJ, 4.0, 2.0);
        const double want = std::abs(c.c_plus + c.c_minus) / std::abs(c.c_plus - c.c_minus);
        CHECK(f.plus_ratio == doctest::Approx(want).epsilon(1e-6));
        CHECK(f.plus_ratio <= 2 * std::exp(-8.0) * EJ / std::abs(c.c_plus - c.c_minus));
    }
    SUBCASE("second-order parts double with E_J") {
        const auto d2 = dephasing_ratios_two_mode(2 * EJ, 4.0, 4.0, 2.0, 2.0, device());
        CHECK(d2.minus_ratio / d.minus_ratio == doctest::Approx(2.0).epsilon(1e-3));
        const auto sp = FockSpace::product(FockSpace(26), FockSpace(26));
        auto second_plus = [&](double ej) {
            JunctionParams p;
            p.E_J = ej;
            p.phi_a = 4.0;
            p.phi_b = 4.0;
            const auto r = h_rwa2_two_mode(p, device(), sp);
            const auto x = dephasing_ratios_from_h(r.second_order, 2.0, 2.0);
            return x.gamma_phi_plus / dephasing_ratios_from_h(r.h, 2.0, 2.0).gamma_m;
        };
        CHECK(second_plus(2 * EJ) / second_plus(EJ) == doctest::Approx(2.0).epsilon(1e-3));
    }
    SUBCASE("near resonance is reported") {
        ModeFrequencies f;
        f.omega_a = kTwoPi * 8.0e9;
        f.omega_b = kTwoPi * 8.0e9 + kTwoPi * 1e6;
        CHECK_THROWS_AS(dephasing_ratios_two_mode(EJ, 4.0, 4.0, 2.0, 2.0, f), ResonanceError);
    }
}
