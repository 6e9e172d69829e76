#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "catqnd/design.hpp"
#include "catqnd/errors.hpp"
#include "gen.hpp"

using namespace catqnd;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
    return v;
}

double residual(const JunctionTriple& t, const std::array<Deltas, 3>& d) {
    const auto& e = *t.E_Js;
    double r02 = 0, r31 = 0, s = 0;
    for (int k = 0; k < 3; ++k) {
        r02 += e[k] * d[k].delta_02;
        r31 += e[k] * d[k].delta_31;
        s += std::abs(e[k] * d[k].delta_02) + std::abs(e[k] * d[k].delta_31);
    }
    return (std::abs(r02) + std::abs(r31)) / s;
}

}  // namespace

TEST_CASE("degeneracy deltas") {
    const auto d = degeneracy_deltas(4.0, 2.0);
    CHECK(std::abs(d.delta_02) > 1e-3);
    CHECK(std::abs(d.delta_31) > 1e-3);
    // exponential suppression along phi = 2 alpha
    double prev = std::hypot(d.delta_02, d.delta_31);
    for (double a : {3.0, 4.0, 5.0, 6.0}) {
        const auto x = degeneracy_deltas(2 * a, a);
        const double n = std::hypot(x.delta_02, x.delta_31);
        CHECK(n < prev * std::exp(-0.15 * (2 * a - 1)));
        prev = n;
    }
    CHECK(prev < 1e-3);
    CHECK_THROWS_AS(degeneracy_deltas(0.0, 2.0), ValidationError);
}

TEST_CASE("solver: degenerate ranks") {
    const Deltas z{0.0, 0.0};
    const auto r0 = solve_positive_energies({1, 2, 3}, {z, z, z});
    CHECK(r0.rank == 0);
    REQUIRE(r0.E_Js);
    CHECK(*r0.E_Js == std::array<double, 3>{1, 1, 1});

    // identical columns: infeasible unless they vanish
    const auto same = solve_positive_energies({4, 4, 4}, 2.0);
    CHECK(same.rank == 1);
    CHECK_FALSE(same.E_Js);

    // rank 1 with mixed signs along one row: the simplex face reaches the open orthant
    const Deltas a{1.0, 2.0}, b{-1.0, -2.0}, c{0.5, 1.0};
    const auto r1 = solve_positive_energies({1, 2, 3}, {a, b, c});
    CHECK(r1.rank == 1);
    REQUIRE(r1.E_Js);
    CHECK(residual(r1, {a, b, c}) < 1e-12);
    for (double e : *r1.E_Js) CHECK(e >= kPositivityFloor);

    // rank 1 with one zero entry and the rest same-signed: only a boundary solution
    const auto edge = solve_positive_energies({1, 2, 3}, {Deltas{0, 0}, a, c});
    CHECK_FALSE(edge.E_Js);
}

TEST_CASE("solver: random rank-2 systems") {
    gen::Rng rng(41);
    int feasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::array<Deltas, 3> d;
        for (auto& x : d) x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto t = solve_positive_energies({1, 2, 3}, d);
        CHECK(t.rank == 2);
        if (!t.E_Js) continue;
        ++feasible;
        CHECK(residual(t, d) < 1e-12);
        CHECK(*std::max_element(t.E_Js->begin(), t.E_Js->end()) == doctest::Approx(1.0));
        for (double e : *t.E_Js) CHECK(e >= kPositivityFloor);

        // scale invariance of the deltas (E_J linearity) leaves the normalized solution fixed
        const double s = rng.uniform(0.01, 100);
        std::array<Deltas, 3> ds = d;
        for (auto& x : ds) x = {s * x.delta_02, s * x.delta_31};
        const auto ts = solve_positive_energies({1, 2, 3}, ds);
        REQUIRE(ts.E_Js);
        for (int k = 0; k < 3; ++k) CHECK((*ts.E_Js)[k] == doctest::Approx((*t.E_Js)[k]).epsilon(1e-12));

        // permuting junctions permutes the solution
        const std::array<int, 3> p = {2, 0, 1};
        std::array<Deltas, 3> dp;
        for (int k = 0; k < 3; ++k) dp[k] = d[p[k]];
        const auto tp = solve_positive_energies({3, 1, 2}, dp);
        REQUIRE(tp.E_Js);
        for (int k = 0; k < 3; ++k) CHECK((*tp.E_Js)[k] == doctest::Approx((*t.E_Js)[p[k]]).epsilon(1e-12));
    }
    // a positive null vector exists for a quarter of isotropic systems
    CHECK(feasible > 40);
    CHECK(feasible < 110);
}

TEST_CASE("solved triples re-project to a degenerate spectrum") {
    const auto scan = feasibility_scan(2.0, 4.0, linspace(1, 5, 9), linspace(1, 5, 9));
    int checked = 0;
    for (const auto& r : scan.rows) {
        if (r[2] != 1.0) continue;
        JunctionTriple t;
        t.phis = {4.0, r[0], r[1]};
        t.E_Js = std::array<double, 3>{r[3], r[4], r[5]};
        CHECK(reprojection_ratio(t, 2.0) <= kReprojectionTol);
        // any positive multiple also solves
        for (auto& e : *t.E_Js) e *= 3.7;
        CHECK(reprojection_ratio(t, 2.0) <= kReprojectionTol);
        ++checked;
    }
    CHECK(checked > 0);
    JunctionTriple none;
    CHECK_THROWS_AS(reprojection_ratio(none, 2.0), ValidationError);
}

TEST_CASE("feasibility scan at alpha = 2, phi1 = 4") {
    const auto fine = feasibility_scan(2.0, 4.0, linspace(1, 5, 41), linspace(1, 5, 41));
    const auto finer = feasibility_scan(2.0, 4.0, linspace(1, 5, 81), linspace(1, 5, 81));
    const double ff = fine.metadata["feasible_fraction"], f2 = finer.metadata["feasible_fraction"];
    CHECK(ff > 0.05);
    // halving the spacing moves the area by less than 5%
    CHECK(std::abs(ff - f2) / f2 < 0.05);
    CHECK(fine.metadata["components"].get<int>() >= 1);
    CHECK(fine.metadata["max_check"].get<double>() <= kReprojectionTol);
    REQUIRE(fine.columns.size() == 7);
    CHECK(fine.rows.size() == 41 * 41);

    // the swap phi2 <-> phi3 mirrors the map; the diagonal itself is infeasible
    const int n = 41;
    for (int i = 0; i < n; ++i) {
        CHECK(fine.rows[i * n + i][2] == 0.0);
        for (int j = 0; j < n; ++j) CHECK(fine.rows[i * n + j][2] == fine.rows[j * n + i][2]);
    }

    CHECK_THROWS_AS(feasibility_scan(2.0, 4.0, {0.1}, {2.0}), ValidationError);
    CHECK_THROWS_AS(feasibility_scan(2.0, 4.0, {}, {2.0}), ValidationError);
}
