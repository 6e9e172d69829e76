#pragma once

#include <numbers>
#include <utility>
#include <vector>

#include "catqnd/fock.hpp"

namespace catqnd {

// All Hamiltonians are H/hbar in angular-frequency units; E_J is therefore a rate.
struct JunctionParams {
    double E_J = 1.0;
    double phi_a = 0.0;
    double phi_b = 0.0;
    double phi_c = 0.0;
    void validate() const;
};

struct ModeFrequencies {
    double omega_a = 0.0;
    double omega_b = 0.0;
    void validate() const;
};

inline constexpr double kDefaultResonanceFloor = 2.0 * std::numbers::pi * 10e6;

// diag -E_J e^{-phi_a^2/2} L_n(phi_a^2)
FockOperator h_rwa_single(const JunctionParams& p, const FockSpace& space);

// diag -E_J e^{-(phi_a^2+phi_b^2)/2} L_{n_a}(phi_a^2) L_{n_b}(phi_b^2) on a two-mode space
FockOperator h_rwa_two_mode(const JunctionParams& p, const FockSpace& space);

// diag A(l)_n = phi^l e^{-phi^2/2} n!/(n+l)! L_n^{(l)}(phi^2)
FockOperator a_dressing_operator(int l, double phi, const FockSpace& space);

// Closed-form diagonals of the two product shapes entering the second-order sums,
// evaluated on the untruncated ladder:
//   raised:  <n| a^dag^l A(l)^2 a^l |n> = W_{n-l}(l) for n >= l, else 0
//   lowered: <n| A(l) a^l a^dag^l A(l) |n> = W_n(l)
// with W_n(l) = n!/(n+l)! phi^{2l} e^{-phi^2} [L_n^{(l)}(phi^2)]^2.
std::vector<double> raised_diagonal(int l, double phi, int dim);
std::vector<double> lowered_diagonal(int l, double phi, int dim);

struct Rwa2Options {
    int l_max = 12;
    bool auto_escalate = true;
    int l_cap = 400;
    double tail_tol = 1e-12;
    double resonance_floor = kDefaultResonanceFloor;
};

struct Rwa2Result {
    FockOperator h;             // first order + second order
    FockOperator second_order;  // E_J^2 part only
    int l_max_used;
    double tail;  // max W over both modes at l_max_used
};

// Largest W_n(l) or W_{n-l}(l) over n < dim for the two modes of `space`.
double rwa2_tail(int l, const JunctionParams& p, const FockSpace& space);

// Pairs (l_a, l_b), 1 <= l <= l_max, with matching parity and |l_a w_a - l_b w_b| < floor.
std::vector<std::pair<int, int>> find_resonances(const ModeFrequencies& f, int l_max, double floor);

Rwa2Result h_rwa2_two_mode(const JunctionParams& p, const ModeFrequencies& f, const FockSpace& space,
                           const Rwa2Options& opt = {});

// Sum of single-junction terms; each entry is (E_J, phi_a).
FockOperator h_rwa_multi_junction(const std::vector<std::pair<double, double>>& junctions,
                                  const FockSpace& space);

}  // namespace catqnd
