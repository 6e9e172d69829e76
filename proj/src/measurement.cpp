#include "catqnd/measurement.hpp"

#include <cmath>

#include "catqnd/errors.hpp"
#include "catqnd/zeno.hpp"

namespace catqnd {

void ReadoutParams::validate() const {
    if (!(phi_c >= 0.0) || !(n_c >= 0.0)) throw ValidationError("phi_c and n_c must be non-negative");
    if (phi_c * phi_c * n_c > kDispersiveGuard)
        throw DispersiveRegimeError("dispersive regime violated: phi_c^2 n_c = " +
                                    std::to_string(phi_c * phi_c * n_c) + " > 0.05");
}

namespace {

DispersiveRates from_omega(double omega, const ReadoutParams& r) {
    DispersiveRates d;
    d.omega_tilde = std::exp(-0.5 * r.phi_c * r.phi_c) * omega;
    d.chi = d.omega_tilde * r.phi_c * r.phi_c;
    d.gamma_m = r.n_c * d.chi;
    d.optimal_kappa_c = d.chi;
    return d;
}

}  // namespace

DispersiveRates dispersive_rates_single(double E_J, double phi_a, double alpha, const ReadoutParams& r) {
    r.validate();
    return from_omega(omega_a_approx(E_J, phi_a, alpha), r);
}

DispersiveRates dispersive_rates_joint(double E_J, double phi_a, double phi_b, double alpha, double beta,
                                       const ReadoutParams& r) {
    r.validate();
    if (!(E_J > 0.0)) throw ValidationError("E_J must be positive");
    const double omega_ab = omega_a_approx(E_J, phi_a, alpha) * omega_a_approx(E_J, phi_b, beta) / (2.0 * E_J);
    return from_omega(omega_ab, r);
}

DephasingRatios dephasing_ratios_from_h(const FockOperator& h, double alpha, double beta) {
    const FockSpace& s = h.space();
    if (s.modes() != 2) throw DimensionError("dephasing ratios need a two-mode Hamiltonian");
    const auto B = tensor(make_cat_basis(s.mode_space(0), alpha, 2), make_cat_basis(s.mode_space(1), beta, 2));
    const RVec c = project(h, B).diagonal();  // ++, +-, -+, --
    DephasingRatios d;
    d.gamma_phi_plus = std::abs(c(0) - c(3));
    d.gamma_phi_minus = std::abs(c(1) - c(2));
    d.gamma_m = std::abs(c(0) + c(3) - c(1) - c(2));
    d.plus_ratio = d.gamma_phi_plus / d.gamma_m;
    d.minus_ratio = d.gamma_phi_minus / d.gamma_m;
    d.dim = s.mode_dim(0);
    return d;
}

int dephasing_truncation(double abs_alpha) {
    int d = 2;
    while (coherent_norm_deficit(abs_alpha, d) > 1e-12) ++d;
    return d;
}

DephasingRatios dephasing_ratios_two_mode(double E_J, double phi_a, double phi_b, double alpha, double beta,
                                          const ModeFrequencies& f, const Rwa2Options& opt, int dim) {
    const int da = dim > 0 ? dim : dephasing_truncation(alpha);
    const int db = dim > 0 ? dim : dephasing_truncation(beta);
    const auto space = FockSpace::product(FockSpace(da), FockSpace(db));
    JunctionParams p;
    p.E_J = E_J;
    p.phi_a = phi_a;
    p.phi_b = phi_b;
    const auto r2 = h_rwa2_two_mode(p, f, space, opt);
    auto d = dephasing_ratios_from_h(r2.h, alpha, beta);
    d.l_max_used = r2.l_max_used;
    d.tail = r2.tail;
    d.two_omega_ab = omega_a_approx(E_J, phi_a, alpha) * omega_a_approx(E_J, phi_b, beta) / E_J;
    return d;
}

}  // namespace catqnd
