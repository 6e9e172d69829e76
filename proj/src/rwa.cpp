#include "catqnd/rwa.hpp"

#include <algorithm>
#include <cmath>

#include "catqnd/errors.hpp"
#include "catqnd/specfun.hpp"

namespace catqnd {

namespace {

void require_single(const FockSpace& s, const char* what) {
    if (s.modes() != 1) throw DimensionError(std::string(what) + ": single-mode space required");
}

void require_two(const FockSpace& s, const char* what) {
    if (s.modes() != 2) throw DimensionError(std::string(what) + ": two-mode space required");
}

}  // namespace

void JunctionParams::validate() const {
    if (!(E_J > 0.0) || !std::isfinite(E_J)) throw ValidationError("E_J must be positive");
    if (!(phi_a >= 0.0) || !(phi_b >= 0.0) || !(phi_c >= 0.0))
        throw ValidationError("phi values must be non-negative");
}

void ModeFrequencies::validate() const {
    if (!(omega_a > 0.0) || !(omega_b > 0.0)) throw ValidationError("mode frequencies must be positive");
}

FockOperator h_rwa_single(const JunctionParams& p, const FockSpace& space) {
    require_single(space, "h_rwa_single");
    p.validate();
    const auto S = laguerre_all_scaled(space.dim() - 1, p.phi_a * p.phi_a);
    CVec d(space.dim());
    for (int n = 0; n < space.dim(); ++n) d(n) = -p.E_J * S[n];
    return FockOperator::from_diagonal(space, d);
}

FockOperator h_rwa_two_mode(const JunctionParams& p, const FockSpace& space) {
    require_two(space, "h_rwa_two_mode");
    p.validate();
    const int da = space.mode_dim(0), db = space.mode_dim(1);
    const auto Sa = laguerre_all_scaled(da - 1, p.phi_a * p.phi_a);
    const auto Sb = laguerre_all_scaled(db - 1, p.phi_b * p.phi_b);
    CVec d(space.dim());
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j) d(i * db + j) = -p.E_J * Sa[i] * Sb[j];
    return FockOperator::from_diagonal(space, d);
}

FockOperator a_dressing_operator(int l, double phi, const FockSpace& space) {
    require_single(space, "a_dressing_operator");
    if (l < 0) throw DomainError("a_dressing_operator: l must be >= 0");
    const auto A = dressing_diagonal(space.dim() - 1, l, phi);
    CVec d(space.dim());
    for (int n = 0; n < space.dim(); ++n) d(n) = A[n];
    return FockOperator::from_diagonal(space, d);
}

std::vector<double> lowered_diagonal(int l, double phi, int dim) {
    auto b = displacement_element_magnitudes(dim - 1, l, phi);
    for (double& v : b) v *= v;
    return b;
}

std::vector<double> raised_diagonal(int l, double phi, int dim) {
    std::vector<double> out(dim, 0.0);
    if (l >= dim) return out;
    const auto w = lowered_diagonal(l, phi, dim - l);
    for (int n = l; n < dim; ++n) out[n] = w[n - l];
    return out;
}

double rwa2_tail(int l, const JunctionParams& p, const FockSpace& space) {
    require_two(space, "rwa2_tail");
    double t = 0.0;
    const double phis[2] = {p.phi_a, p.phi_b};
    for (int m = 0; m < 2; ++m) {
        const auto w = lowered_diagonal(l, phis[m], space.mode_dim(m));
        for (double v : w) t = std::max(t, v);
    }
    return t;
}

std::vector<std::pair<int, int>> find_resonances(const ModeFrequencies& f, int l_max, double floor) {
    std::vector<std::pair<int, int>> out;
    for (int la = 1; la <= l_max; ++la)
        for (int lb = 1; lb <= l_max; ++lb) {
            if ((la + lb) % 2 != 0) continue;
            if (std::abs(la * f.omega_a - lb * f.omega_b) < floor) out.emplace_back(la, lb);
        }
    return out;
}

Rwa2Result h_rwa2_two_mode(const JunctionParams& p, const ModeFrequencies& f, const FockSpace& space,
                           const Rwa2Options& opt) {
    require_two(space, "h_rwa2_two_mode");
    p.validate();
    f.validate();
    if (opt.l_max < 1) throw ValidationError("l_max must be >= 1");

    int L = opt.l_max;
    double tail = std::max(rwa2_tail(L, p, space), rwa2_tail(L - 1, p, space));
    while (opt.auto_escalate && tail >= opt.tail_tol) {
        if (L + 2 > opt.l_cap)
            throw ConvergenceError("h_rwa2_two_mode: tail criterion not met below l_cap", tail);
        L += 2;
        tail = std::max(rwa2_tail(L, p, space), rwa2_tail(L - 1, p, space));
    }

    const auto res = find_resonances(f, L, opt.resonance_floor);
    if (!res.empty()) {
        const auto [la, lb] = res.front();
        throw ResonanceError(la, lb, std::abs(la * f.omega_a - lb * f.omega_b));
    }

    const int da = space.mode_dim(0), db = space.mode_dim(1);
    std::vector<std::vector<double>> ua(L + 1), wa(L + 1), ub(L + 1), wb(L + 1);
    for (int l = 0; l <= L; ++l) {
        ua[l] = raised_diagonal(l, p.phi_a, da);
        wa[l] = lowered_diagonal(l, p.phi_a, da);
        ub[l] = raised_diagonal(l, p.phi_b, db);
        wb[l] = lowered_diagonal(l, p.phi_b, db);
    }

    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(da, db);
    auto outer = [&](const std::vector<double>& x, const std::vector<double>& y, double c) {
        for (int i = 0; i < da; ++i) {
            if (x[i] == 0.0) continue;
            for (int j = 0; j < db; ++j) second(i, j) += c * x[i] * y[j];
        }
    };
    const double EJ2 = p.E_J * p.E_J;
    for (int la = 0; la <= L; ++la)
        for (int lb = 0; lb <= L; ++lb) {
            if (la == 0 && lb == 0) continue;
            if ((la + lb) % 2 == 0) {
                const double c = EJ2 / (la * f.omega_a + lb * f.omega_b);
                outer(ua[la], ub[lb], c);
                outer(wa[la], wb[lb], -c);
            }
            if (la >= 1 && lb >= 1 && la % 2 == lb % 2) {
                const double sgn = (la % 2 == 0) ? 1.0 : -1.0;  // ((-1)^la + (-1)^lb)/2
                const double c = EJ2 * sgn / (la * f.omega_a - lb * f.omega_b);
                outer(ua[la], wb[lb], c);
                outer(wa[la], ub[lb], -c);
            }
        }

    CVec d2(space.dim());
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j) d2(i * db + j) = second(i, j);
    const FockOperator h1 = h_rwa_two_mode(p, space);
    FockOperator h2 = FockOperator::from_diagonal(space, d2);
    return {h1 + h2, h2, L, tail};
}

FockOperator h_rwa_multi_junction(const std::vector<std::pair<double, double>>& junctions,
                                  const FockSpace& space) {
    if (junctions.empty()) throw ValidationError("h_rwa_multi_junction: empty junction list");
    std::optional<FockOperator> h;
    for (const auto& [ej, phi] : junctions) {
        JunctionParams p;
        p.E_J = ej;
        p.phi_a = phi;
        auto term = h_rwa_single(p, space);
        h = h ? *h + term : term;
    }
    return *h;
}

}  // namespace catqnd
