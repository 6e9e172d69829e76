#include <doctest.h>

#include <cmath>
#include <numbers>

#include "catqnd/errors.hpp"
#include "catqnd/fock.hpp"
#include "gen.hpp"

using namespace catqnd;

namespace {

FockState fock_basis(const FockSpace& s, int n) {
    CVec v = CVec::Zero(s.dim());
    v(n) = 1.0;
    return FockState(s, v);
}

// literal superposition of rotated coherent states
CVec cat_from_coherent_sum(const FockSpace& s, cplx alpha, int q, int k) {
    CVec v = CVec::Zero(s.dim());
    for (int p = 0; p < q; ++p) {
        const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * p / q);
        v += std::polar(1.0, -2.0 * std::numbers::pi * p * k / q) * coherent_state(s, alpha * w).amplitudes;
    }
    return v;
}

}  // namespace

TEST_CASE("space construction and product") {
    CHECK_THROWS_AS(FockSpace(1), ValidationError);
    const FockSpace a(30), b(30);
    const auto ab = FockSpace::product(a, b);
    CHECK(ab.dim() == 900);
    CHECK(ab.modes() == 2);
    CHECK_THROWS_AS(FockSpace::product(FockSpace(200), FockSpace(200)), DimensionError);
    CHECK(default_truncation(2.0) == 40);
    CHECK(default_truncation(0.0) == 20);
}

TEST_CASE("ladder operators") {
    const FockSpace s(12);
    const auto a = annihilation(s);
    const CVec out = a.apply(fock_basis(s, 5).amplitudes);
    CHECK(std::abs(out(4) - std::sqrt(5.0)) < 1e-15);
    CHECK(out.norm() == doctest::Approx(std::sqrt(5.0)));
    const CMat comm = (a * a.adjoint() - a.adjoint() * a).dense();
    for (int n = 0; n < s.dim() - 1; ++n) CHECK(std::abs(comm(n, n) - 1.0) < 1e-14);
    CHECK((comm - CMat(comm.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("operator algebra checks spaces") {
    const FockSpace s(5), t(6);
    CHECK_THROWS_AS(identity(s) * identity(t), DimensionError);
    CHECK_THROWS_AS(identity(s) + identity(t), DimensionError);
    CHECK(annihilation(s).is_hermitian() == false);
    CHECK(number_operator(s).is_hermitian());
}

TEST_CASE("displacement") {
    const FockSpace s(40);
    const auto D0 = displacement(s, 0.0);
    CHECK((D0.dense() - CMat::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-14);

    const cplx beta(1.5, -0.7);
    const auto D = displacement(s, beta);
    const CVec v = D.apply(fock_basis(s, 0).amplitudes);
    const auto coh = coherent_state(s, beta);
    CHECK(1.0 - std::norm(coh.amplitudes.dot(v)) < 1e-8);
    const CMat U = D.dense() * D.dense().adjoint();
    CHECK((U.topLeftCorner(20, 20) - CMat::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-2);
    CHECK((U.topLeftCorner(10, 10) - CMat::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK_THROWS_AS(displacement(s, 3.5), TruncationError);
}

TEST_CASE("coherent states") {
    const FockSpace s(40);
    const auto vac = coherent_state(s, 0.0);
    CHECK(std::abs(vac.amplitudes(0) - 1.0) < 1e-15);
    const auto c = coherent_state(s, 2.0), m = coherent_state(s, -2.0);
    CHECK(std::abs(c.norm() - 1.0) < 1e-10);
    CHECK(std::abs(c.inner(m) - std::exp(-8.0)) < 1e-10);
    CHECK_THROWS_AS(coherent_state(FockSpace(16), 2.0), TruncationError);
    CHECK(coherent_norm_deficit(2.0, 40) < 1e-15);
    CHECK(coherent_norm_deficit(0.0, 2) == 0.0);
}

TEST_CASE("two-component cat normalization") {
    const FockSpace s(40);
    double Np = 0, Nm = 0;
    const auto cp = cat_state(s, 2.0, 2, 0, &Np);
    const auto cm = cat_state(s, 2.0, 2, 1, &Nm);
    CHECK(Np == doctest::Approx(1.0 / std::sqrt(2.0 * (1.0 + std::exp(-8.0)))).epsilon(1e-13));
    CHECK(Nm == doctest::Approx(1.0 / std::sqrt(2.0 * (1.0 - std::exp(-8.0)))).epsilon(1e-13));
    CHECK(std::abs(cp.inner(cm)) == 0.0);
    // matches the literal coherent superposition N_+(|a> + |-a>)
    const CVec lit = Np * (coherent_state(s, 2.0).amplitudes + coherent_state(s, -2.0).amplitudes);
    CHECK((lit - cp.amplitudes).norm() < 1e-12);
    CHECK_THROWS_AS(cat_state(s, 2.0, 2, 2), DomainError);
    CHECK_THROWS_AS(cat_state(s, 2.0, 0, 0), DomainError);
    CHECK_THROWS_AS(cat_state(s, 0.0, 2, 1), DomainError);
}

TEST_CASE("four-component cat support") {
    const FockSpace s(default_truncation(5.0));
    const auto c = cat_state(s, 5.0, 4, 1);
    for (int n = 0; n < s.dim(); ++n)
        if (n % 4 != 1) CHECK(std::abs(c.amplitudes(n)) <= 1e-10);
}

TEST_CASE("property: cat bases are orthonormal and match literal sums") {
    gen::Rng rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const cplx alpha = rng.complex_disk(4.0) + cplx(0.3, 0.0);
        const int q = rng.integer(1, 6);
        const FockSpace s(default_truncation(std::abs(alpha)));
        const auto B = make_cat_basis(s, alpha, q);
        const CMat M = B.matrix();
        CHECK((M.adjoint() * M - CMat::Identity(q, q)).cwiseAbs().maxCoeff() < 1e-10);
        for (int k = 0; k < q; ++k) {
            const CVec lit = B.norms[k] * cat_from_coherent_sum(s, alpha, q, k);
            CHECK((lit - B.states[k].amplitudes).norm() < 1e-9);
            for (int n = 0; n < s.dim(); ++n)
                if (n % q != k) CHECK(std::abs(B.states[k].amplitudes(n)) <= 1e-10);
        }
    }
}

TEST_CASE("tensor products") {
    const FockSpace a(4), b(5);
    const auto I = tensor(identity(a), identity(b));
    CHECK((I.dense() - CMat::Identity(20, 20)).cwiseAbs().maxCoeff() == 0.0);
    const auto ab = FockSpace::product(a, b);
    const auto A = embed(annihilation(a), ab, 0), B = embed(annihilation(b), ab, 1);
    const auto AB = tensor(annihilation(a), annihilation(b));
    CHECK(((A * B).dense() - AB.dense()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(((annihilation(ab, 1)).dense() - B.dense()).cwiseAbs().maxCoeff() == 0.0);
    // ordering: mode a slowest
    const auto psi = tensor(fock_basis(a, 2), fock_basis(b, 3));
    CHECK(std::abs(psi.amplitudes(2 * 5 + 3) - 1.0) == 0.0);
    CHECK(number_operator(ab, 0).diagonal()(13).real() == 2.0);
    CHECK(number_operator(ab, 1).diagonal()(13).real() == 3.0);
}

TEST_CASE("density matrix validation") {
    const FockSpace s(4);
    CMat m = CMat::Zero(4, 4);
    m(0, 0) = 1.0;
    CHECK_NOTHROW(DensityMatrix(s, m));
    CMat bad = m;
    bad(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix(s, bad), ValidationError);
    CMat tr = 0.5 * m;
    CHECK_THROWS_AS(DensityMatrix(s, tr), ValidationError);
    CMat neg = CMat::Zero(4, 4);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix(s, neg), ValidationError);
}

TEST_CASE("property: purity bounds") {
    gen::Rng rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = rng.integer(2, 12);
        const FockSpace s(d);
        CMat X(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) X(i, j) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
        CMat r = X * X.adjoint();
        r /= r.trace();
        const DensityMatrix rho(s, r);
        const double p = purity(rho);
        CHECK(p >= 1.0 / d - 1e-12);
        CHECK(p <= 1.0 + 1e-12);
    }
}

TEST_CASE("husimi Q") {
    const FockSpace s(60);
    const cplx a0(0.8, -0.4);
    const auto rho = DensityMatrix::from_state(coherent_state(s, a0));
    gen::Rng rng(23);
    for (int i = 0; i < 50; ++i) {
        const cplx g = rng.complex_disk(3.0);
        CHECK(husimi_q(rho, g) == doctest::Approx(std::exp(-std::norm(g - a0)) / std::numbers::pi).epsilon(1e-10));
        CHECK(husimi_q(rho, g) >= -1e-12);
    }
    // normalization on a large window
    std::vector<double> ax;
    for (int i = 0; i <= 240; ++i) ax.push_back(-6.0 + 12.0 * i / 240);
    const auto Q = husimi_grid(rho.matrix(), ax, ax);
    const double h = 12.0 / 240;
    CHECK(std::abs(Q.sum() * h * h - 1.0) < 1e-3);
    const auto axis = default_husimi_axis(2.0);
    CHECK(axis.size() == 201);
    CHECK(axis.front() == -3.0);
    CHECK(axis.back() == 3.0);
}
