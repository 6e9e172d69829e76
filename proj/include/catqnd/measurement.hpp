#pragma once

#include <limits>

#include "catqnd/fock.hpp"
#include "catqnd/rwa.hpp"

namespace catqnd {

inline constexpr double kDispersiveGuard = 0.05;

struct ReadoutParams {
    double phi_c = 0.1;
    double n_c = 1.0;
    double kappa_c = std::numeric_limits<double>::quiet_NaN();  // informational only
    // phi_c^2 n_c <= 0.05, else DispersiveRegimeError
    void validate() const;
};

struct DispersiveRates {
    double omega_tilde = 0.0;
    double chi = 0.0;
    double gamma_m = 0.0;  // n_c * chi
    double optimal_kappa_c = 0.0;  // measurement rate is optimal at kappa_c = chi
};

// Omega~ = e^{-phi_c^2/2} Omega_a, chi = Omega~ phi_c^2.
DispersiveRates dispersive_rates_single(double E_J, double phi_a, double alpha, const ReadoutParams& r);
// Same with Omega_{a,b} = Omega_a Omega_b / (2 E_J).
DispersiveRates dispersive_rates_joint(double E_J, double phi_a, double phi_b, double alpha, double beta,
                                       const ReadoutParams& r);

struct DephasingRatios {
    double plus_ratio = 0.0;   // Gamma_phi+ / Gamma_m
    double minus_ratio = 0.0;  // Gamma_phi- / Gamma_m
    double gamma_phi_plus = 0.0;
    double gamma_phi_minus = 0.0;
    double gamma_m = 0.0;           // |c++ + c-- - c+- - c-+|
    double two_omega_ab = 0.0;      // Omega_a Omega_b / E_J, closed-form counterpart of gamma_m
    int l_max_used = 0;
    double tail = 0.0;
    int dim = 0;
};

// Ratios from the four diagonal elements of h on M(2,a) x M(2,b).
DephasingRatios dephasing_ratios_from_h(const FockOperator& h, double alpha, double beta);

// Smallest d with coherent norm deficit <= 1e-12. Keeps the second-order
// escalation short of high-order commensurabilities of the mode frequencies.
int dephasing_truncation(double abs_alpha);

// Full H^{RWA,1} + second-order sums. dim = 0 picks dephasing_truncation per mode.
DephasingRatios dephasing_ratios_two_mode(double E_J, double phi_a, double phi_b, double alpha, double beta,
                                          const ModeFrequencies& f, const Rwa2Options& opt = {}, int dim = 0);

}  // namespace catqnd
