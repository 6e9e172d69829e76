#include <doctest.h>

#include <cmath>
#include <numbers>

#include "catqnd/errors.hpp"
#include "catqnd/rwa.hpp"
#include "catqnd/specfun.hpp"
#include "gen.hpp"

using namespace catqnd;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

JunctionParams jp(double ej, double pa, double pb = 0.0) {
    JunctionParams p;
    p.E_J = ej;
    p.phi_a = pa;
    p.phi_b = pb;
    return p;
}

Eigen::MatrixXd ladder(int d) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

Eigen::MatrixXd mpow(const Eigen::MatrixXd& m, int l) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(m.rows(), m.cols());
    for (int i = 0; i < l; ++i) r = r * m;
    return r;
}

// literal operator products on an enlarged space so a^dag^l does not hit the edge
struct Shapes {
    Eigen::VectorXd raised, lowered;
};
Shapes literal_shapes(int l, double phi, int keep) {
    const int D = keep + l + 4;
    const auto Adiag = dressing_diagonal(D - 1, l, phi);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(D, D);
    for (int n = 0; n < D; ++n) A(n, n) = Adiag[n];
    const Eigen::MatrixXd a = ladder(D), al = mpow(a, l), adl = mpow(a.transpose(), l);
    const Eigen::MatrixXd up = adl * A * A * al;
    const Eigen::MatrixXd dn = A * al * adl * A;
    return {up.diagonal().head(keep), dn.diagonal().head(keep)};
}

}  // namespace

TEST_CASE("single-mode RWA Hamiltonian") {
    const FockSpace s(40);
    const auto h = h_rwa_single(jp(1.3, 4.0), s);
    CHECK(h.is_diagonal());
    CHECK(h.diagonal()(0).real() == doctest::Approx(-1.3 * std::exp(-8.0)).epsilon(1e-14));
    const auto L = laguerre_all(39, 16.0);
    for (int n = 0; n < 40; ++n)
        CHECK(h.diagonal()(n).real() == doctest::Approx(-1.3 * std::exp(-8.0) * L[n]).epsilon(1e-12).scale(1e-14));
    int changes = 0;
    for (int n = 1; n <= 8; ++n)
        if (h.diagonal()(n).real() * h.diagonal()(n - 1).real() < 0) ++changes;
    CHECK(changes >= 2);
    CHECK(h.is_hermitian());
    CHECK_THROWS_AS(h_rwa_single(jp(-1.0, 4.0), s), ValidationError);
    CHECK_THROWS_AS(h_rwa_single(jp(1.0, 4.0), FockSpace::product(s, s)), DimensionError);
}

TEST_CASE("single-mode entries: slow oscillatory envelope") {
    // e^{-x/2} L_n(x) ~ J_0(2 sqrt((n+1/2) x)): envelope ((n+1/2) x)^{-1/4}/sqrt(pi)
    const double phi = 2.0, x = phi * phi;
    const FockSpace s(2000);
    const auto h = h_rwa_single(jp(1.0, phi), s);
    for (int n = static_cast<int>(4 * x); n < 2000; ++n) {
        const double env = std::pow((n + 0.5) * x, -0.25) / std::sqrt(std::numbers::pi);
        CHECK(std::abs(h.diagonal()(n).real()) <= 1.2 * env);
    }
    double prev = 1e300;
    for (int lo = 16; lo < 1000; lo *= 2) {
        double m = 0.0;
        for (int n = lo; n < 2 * lo; ++n) m = std::max(m, std::abs(h.diagonal()(n).real()));
        CHECK(m < prev);
        prev = m;
    }
}

TEST_CASE("two-mode RWA Hamiltonian") {
    const FockSpace a(12), b(9);
    const auto ab = FockSpace::product(a, b);
    const auto p = jp(0.7, 3.0, 2.5);
    const auto h = h_rwa_two_mode(p, ab);
    CHECK(h.diagonal()(0).real() == doctest::Approx(-0.7 * std::exp(-(9.0 + 6.25) / 2)).epsilon(1e-14));
    const auto ha = h_rwa_single(jp(1.0, 3.0), a), hb = h_rwa_single(jp(1.0, 2.5), b);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 9; ++j) {
            const double expect = -0.7 * ha.diagonal()(i).real() * hb.diagonal()(j).real();
            CHECK(h.diagonal()(i * 9 + j).real() == doctest::Approx(expect).epsilon(1e-12).scale(1e-15));
        }
    const auto h0 = h_rwa_two_mode(jp(0.7, 3.0, 0.0), ab);
    const auto ref = tensor(h_rwa_single(jp(0.7, 3.0), a), identity(b));
    CHECK((h0.diagonal() - ref.diagonal()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("dressing operator A(l)") {
    const FockSpace s(30);
    const auto A0 = a_dressing_operator(0, 4.0, s);
    const auto h = h_rwa_single(jp(1.0, 4.0), s);
    CHECK((A0.diagonal() + h.diagonal()).cwiseAbs().maxCoeff() < 1e-15);
    const auto A2 = a_dressing_operator(2, 4.0, s);
    CHECK(A2.diagonal()(0).real() == doctest::Approx(16.0 * std::exp(-8.0) / 2.0).epsilon(1e-14));
    CHECK(A2.is_hermitian(0.0));
    CHECK_THROWS_AS(a_dressing_operator(-1, 1.0, s), DomainError);
}

TEST_CASE("product shapes match literal 3-level computation") {
    for (int l = 0; l <= 4; ++l)
        for (double phi : {0.7, 2.0, 4.0}) {
            const auto lit = literal_shapes(l, phi, 3);
            const auto up = raised_diagonal(l, phi, 3), dn = lowered_diagonal(l, phi, 3);
            for (int n = 0; n < 3; ++n) {
                CHECK(up[n] == doctest::Approx(lit.raised(n)).epsilon(1e-12).scale(1e-16));
                CHECK(dn[n] == doctest::Approx(lit.lowered(n)).epsilon(1e-12).scale(1e-16));
            }
        }
    // the four two-mode shapes are tensor products of the single-mode ones
    const int la = 2, lb = 1;
    const auto A = literal_shapes(la, 1.3, 3), B = literal_shapes(lb, 0.9, 3);
    const auto ua = raised_diagonal(la, 1.3, 3), wa = lowered_diagonal(la, 1.3, 3);
    const auto ub = raised_diagonal(lb, 0.9, 3), wb = lowered_diagonal(lb, 0.9, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(ua[i] * ub[j] == doctest::Approx(A.raised(i) * B.raised(j)).scale(1e-16));
            CHECK(wa[i] * wb[j] == doctest::Approx(A.lowered(i) * B.lowered(j)).scale(1e-16));
            CHECK(ua[i] * wb[j] == doctest::Approx(A.raised(i) * B.lowered(j)).scale(1e-16));
            CHECK(wa[i] * ub[j] == doctest::Approx(A.lowered(i) * B.raised(j)).scale(1e-16));
        }
}

TEST_CASE("W_n(l) equals |<n|D(phi)|n+l>|^2") {
    const FockSpace s(120);
    for (double phi : {1.0, 2.0, 4.0}) {
        const CMat D = displacement(s, phi).dense();
        for (int l = 0; l <= 12; ++l) {
            const auto w = lowered_diagonal(l, phi, 30);
            for (int n = 0; n + l < 30; ++n) CHECK(std::abs(w[n] - std::norm(D(n, n + l))) < 1e-10);
        }
    }
}

TEST_CASE("second-order RWA: scaling, convergence, resonance") {
    const FockSpace a(20), b(20);
    const auto ab = FockSpace::product(a, b);
    ModeFrequencies f{kTwoPi * 9.10e9, kTwoPi * 7.5e9};
    const auto p = jp(kTwoPi * 300e6, 4.0, 4.0);
    const auto r = h_rwa2_two_mode(p, f, ab);
    CHECK(r.h.is_diagonal());
    CHECK(r.tail < 1e-12);
    CHECK(r.l_max_used > 12);

    auto half = p;
    half.E_J /= 2;
    const auto rh = h_rwa2_two_mode(half, f, ab);
    CHECK((rh.second_order.diagonal() * 4.0 - r.second_order.diagonal()).cwiseAbs().maxCoeff() <=
          1e-12 * r.second_order.diagonal().cwiseAbs().maxCoeff());

    ModeFrequencies f3{3.0 * f.omega_a, 3.0 * f.omega_b};
    const auto r3 = h_rwa2_two_mode(p, f3, ab);
    CHECK((r3.second_order.diagonal() * 3.0 - r.second_order.diagonal()).cwiseAbs().maxCoeff() <=
          1e-12 * r.second_order.diagonal().cwiseAbs().maxCoeff());

    Rwa2Options fixed;
    fixed.auto_escalate = false;
    fixed.l_max = r.l_max_used + 2;
    const auto r2 = h_rwa2_two_mode(p, f, ab, fixed);
    CHECK((r2.h.diagonal() - r.h.diagonal()).cwiseAbs().maxCoeff() <=
          1e-10 * r.h.diagonal().cwiseAbs().maxCoeff());

    ModeFrequencies res{kTwoPi * 2e9, kTwoPi * 1e9};
    try {
        h_rwa2_two_mode(p, res, ab);
        FAIL("expected ResonanceError");
    } catch (const ResonanceError& e) {
        CHECK(e.l_a * res.omega_a == doctest::Approx(e.l_b * res.omega_b));
        CHECK((e.l_a + e.l_b) % 2 == 0);
    }
    // opposite-parity pairs have zero prefactor and are never flagged
    for (auto [la, lb] : find_resonances(res, 30, kDefaultResonanceFloor)) CHECK((la + lb) % 2 == 0);
    CHECK(find_resonances(f, 60, kDefaultResonanceFloor).empty());
    CHECK_FALSE(find_resonances(f, 91, kDefaultResonanceFloor).empty());
}

TEST_CASE("multi-junction sum") {
    const FockSpace s(25);
    const auto one = h_rwa_multi_junction({{0.8, 3.0}}, s);
    CHECK((one.diagonal() - h_rwa_single(jp(0.8, 3.0), s).diagonal()).cwiseAbs().maxCoeff() == 0.0);
    const auto h = h_rwa_multi_junction({{1.0, 3.0}, {0.5, 2.0}, {0.25, 4.0}}, s);
    const auto h2 = h_rwa_multi_junction({{2.0, 3.0}, {1.0, 2.0}, {0.5, 4.0}}, s);
    CHECK((h2.diagonal() - 2.0 * h.diagonal()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(h_rwa_multi_junction({}, s), ValidationError);
}
