#include "catqnd/design.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "catqnd/errors.hpp"
#include "catqnd/fock.hpp"
#include "catqnd/rwa.hpp"
#include "catqnd/zeno.hpp"

namespace catqnd {

Deltas degeneracy_deltas(double phi, double alpha, int dim) {
    if (!(phi > 0.0) || !(alpha > 0.0)) throw ValidationError("degeneracy_deltas: phi and alpha must be positive");
    const auto c = projected_spectrum_q(1.0, phi, alpha, 4, SpectrumMethod::Numeric, dim);
    return {c[2] - c[0], c[3] - c[1]};
}

namespace {

std::optional<std::array<double, 3>> normalized_positive(std::array<double, 3> e) {
    double mx = 0.0, mn = 1e300;
    if (e[0] + e[1] + e[2] < 0)
        for (double& x : e) x = -x;
    for (double x : e) mx = std::max(mx, x), mn = std::min(mn, x);
    if (!(mx > 0.0) || mn < kPositivityFloor * mx) return std::nullopt;
    for (double& x : e) x /= mx;
    return e;
}

// Simplex sum E = 1, E >= 0, cut by r.E = 0: vertices lie on e_i (r_i = 0) or on
// edges e_i e_j where r_i and r_j have opposite signs. Their centroid is interior
// to the feasible face whenever the face reaches the open orthant.
std::optional<std::array<double, 3>> rank_one(const Eigen::Vector3d& r) {
    const double tol = 1e-12 * r.cwiseAbs().maxCoeff();
    std::vector<Eigen::Vector3d> verts;
    for (int i = 0; i < 3; ++i)
        if (std::abs(r(i)) <= tol) verts.push_back(Eigen::Vector3d::Unit(i));
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if ((r(i) > tol && r(j) < -tol) || (r(i) < -tol && r(j) > tol)) {
                const double t = r(i) / (r(i) - r(j));
                verts.push_back((1 - t) * Eigen::Vector3d::Unit(i) + t * Eigen::Vector3d::Unit(j));
            }
    if (verts.empty()) return std::nullopt;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const auto& v : verts) c += v;
    c /= static_cast<double>(verts.size());
    return normalized_positive({c(0), c(1), c(2)});
}

}  // namespace

JunctionTriple solve_positive_energies(const std::array<double, 3>& phis, const std::array<Deltas, 3>& deltas) {
    JunctionTriple out;
    out.phis = phis;
    Eigen::Matrix<double, 2, 3> A;
    for (int k = 0; k < 3; ++k) {
        A(0, k) = deltas[k].delta_02;
        A(1, k) = deltas[k].delta_31;
    }
    const Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> svd(A);
    const auto s = svd.singularValues();
    // deltas are at unit E_J, so the rank-0 floor is absolute
    if (s(0) <= 1e-14) {
        out.rank = 0;
        out.E_Js = std::array<double, 3>{1.0, 1.0, 1.0};
        return out;
    }
    if (s(1) <= 1e-10 * s(0)) {
        out.rank = 1;
        const int row = A.row(0).norm() >= A.row(1).norm() ? 0 : 1;
        out.E_Js = rank_one(A.row(row).transpose());
        return out;
    }
    out.rank = 2;
    const Eigen::Vector3d n = Eigen::Vector3d(A.row(0)).cross(Eigen::Vector3d(A.row(1)));
    out.E_Js = normalized_positive({n(0), n(1), n(2)});
    return out;
}

JunctionTriple solve_positive_energies(const std::array<double, 3>& phis, double alpha, int dim) {
    std::array<Deltas, 3> d;
    for (int k = 0; k < 3; ++k) d[k] = degeneracy_deltas(phis[k], alpha, dim);
    return solve_positive_energies(phis, d);
}

double reprojection_ratio(const JunctionTriple& t, double alpha, int dim) {
    if (!t.E_Js) throw ValidationError("reprojection_ratio: triple has no solution");
    const FockSpace s(dim > 0 ? dim : default_truncation(alpha));
    std::vector<std::pair<double, double>> j;
    for (int k = 0; k < 3; ++k) j.emplace_back((*t.E_Js)[k], t.phis[k]);
    const auto d = four_photon_diagnostics(h_rwa_multi_junction(j, s), alpha);
    return d.small_delta_parity / d.delta_parity;
}

SweepResult feasibility_scan(double alpha, double phi1, const std::vector<double>& grid2,
                             const std::vector<double>& grid3, int dim) {
    if (!(alpha > 0.0)) throw ValidationError("feasibility_scan: alpha must be positive");
    if (grid2.empty() || grid3.empty()) throw ValidationError("feasibility_scan: empty grid");
    for (const auto* g : {&grid2, &grid3})
        for (double p : *g)
            if (p < 0.1 * alpha || p > 3.0 * alpha)
                throw ValidationError("feasibility_scan: grid values must lie in [0.1, 3] alpha");

    std::map<double, Deltas> cache;
    cache[phi1] = {};
    for (double p : grid2) cache[p] = {};
    for (double p : grid3) cache[p] = {};
    std::vector<double> keys;
    for (const auto& kv : cache) keys.push_back(kv.first);
    std::vector<Deltas> vals(keys.size());
    parallel_for(static_cast<int>(keys.size()), [&](int i) { vals[i] = degeneracy_deltas(keys[i], alpha, dim); });
    for (std::size_t i = 0; i < keys.size(); ++i) cache[keys[i]] = vals[i];

    const int n2 = static_cast<int>(grid2.size()), n3 = static_cast<int>(grid3.size());
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n2) * n3);
    parallel_for(n2 * n3, [&](int idx) {
        const double p2 = grid2[idx / n3], p3 = grid3[idx % n3];
        const auto t = solve_positive_energies({phi1, p2, p3}, {cache.at(phi1), cache.at(p2), cache.at(p3)});
        if (!t.E_Js) {
            rows[idx] = {p2, p3, 0.0, 0.0, 0.0, 0.0, 0.0};
            return;
        }
        const double check = reprojection_ratio(t, alpha, dim);
        if (!(check <= kReprojectionTol)) {
            std::ostringstream os;
            os << "feasibility_scan: re-projection check " << check << " at (" << p2 << ", " << p3 << ")";
            throw ConvergenceError(os.str(), check);
        }
        const auto& e = *t.E_Js;
        rows[idx] = {p2, p3, 1.0, e[0], e[1], e[2], check};
    });

    SweepResult out;
    out.columns = {"phi2", "phi3", "feasible", "E1", "E2", "E3", "check"};
    int feasible = 0;
    double worst = 0.0;
    std::vector<int> parent(rows.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int idx = 0; idx < n2 * n3; ++idx) {
        if (rows[idx][2] == 1.0) {
            ++feasible;
            worst = std::max(worst, rows[idx][6]);
            const int i = idx / n3, j = idx % n3;
            if (i > 0 && rows[idx - n3][2] == 1.0) parent[find(idx)] = find(idx - n3);
            if (j > 0 && rows[idx - 1][2] == 1.0) parent[find(idx)] = find(idx - 1);
        }
    }
    int components = 0;
    for (int idx = 0; idx < n2 * n3; ++idx)
        if (rows[idx][2] == 1.0 && find(idx) == idx) ++components;
    for (auto& r : rows) out.add_row(std::move(r));
    out.metadata["alpha"] = alpha;
    out.metadata["phi1"] = phi1;
    out.metadata["dim"] = dim > 0 ? dim : default_truncation(alpha);
    out.metadata["feasible_fraction"] = static_cast<double>(feasible) / (n2 * n3);
    out.metadata["components"] = components;
    out.metadata["max_check"] = worst;
    out.metadata["positivity_floor"] = kPositivityFloor;
    return out;
}

}  // namespace catqnd
