#pragma once

#include <array>
#include <optional>
#include <vector>

#include "catqnd/sweep.hpp"

namespace catqnd {

struct Deltas {
    double delta_02 = 0.0;  // c22 - c00 at unit E_J
    double delta_31 = 0.0;  // c33 - c11
};

// From the numerically projected spectrum on M(4, alpha). dim = 0 -> default_truncation.
Deltas degeneracy_deltas(double phi, double alpha, int dim = 0);

struct JunctionTriple {
    std::array<double, 3> phis{};
    std::optional<std::array<double, 3>> E_Js;  // normalized to max 1 when feasible
    int rank = 0;                               // of the 2x3 delta system
};

inline constexpr double kPositivityFloor = 1e-6;  // E_k >= floor * max E

// Positive E with sum_k E_k Delta_k = 0 for both differences, or E_Js empty.
// Works on the supplied deltas so scans can reuse them.
JunctionTriple solve_positive_energies(const std::array<double, 3>& phis, const std::array<Deltas, 3>& deltas);
JunctionTriple solve_positive_energies(const std::array<double, 3>& phis, double alpha, int dim = 0);

// delta_parity / Delta_parity of the multi-junction RWA Hamiltonian on M(4, alpha).
double reprojection_ratio(const JunctionTriple& t, double alpha, int dim = 0);

inline constexpr double kReprojectionTol = 1e-8;

// Columns: phi2, phi3, feasible, E1, E2, E3, check. Every feasible point is re-projected
// and must satisfy check <= 1e-8, else ConvergenceError. Metadata carries the feasible
// fraction and the number of 4-connected feasible components.
SweepResult feasibility_scan(double alpha, double phi1, const std::vector<double>& grid2,
                             const std::vector<double>& grid3, int dim = 0);

}  // namespace catqnd
