#pragma once

#include <Eigen/Sparse>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "catqnd/fock.hpp"
#include "catqnd/sweep.hpp"

namespace catqnd {

using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// Contributes rate * (L rho L^dag - {L^dag L, rho}/2).
struct CollapseOp {
    FockOperator op;
    double rate = 1.0;
};

enum class Integrator { Auto, BlockExpm, RK45 };
const char* integrator_name(Integrator m);

struct LindbladSpec {
    LindbladSpec(FockOperator h, std::vector<CollapseOp> c = {})
        : hamiltonian(std::move(h)), collapse_ops(std::move(c)) {}

    FockOperator hamiltonian;
    std::vector<CollapseOp> collapse_ops;
    double t_final = 1.0;
    double dt_initial = 1e-3;
    double tolerance = 1e-10;  // RK45 absolute per-step error on rho entries
    int samples = 100;         // output grid t_k = k t_final / samples, k = 0..samples
    std::vector<std::pair<std::string, CMat>> observables;  // label -> operator P, records Re tr(P rho)
    Integrator integrator = Integrator::Auto;
    int max_steps = 5'000'000;
    int max_block_expm = 1024;  // Auto uses BlockExpm when every Liouvillian block fits
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> purities;
    std::vector<double> traces;
    std::map<std::string, std::vector<double>> populations;
    DensityMatrix final_rho{FockSpace(2), CMat::Identity(2, 2) * 0.5};
    Integrator integrator = Integrator::Auto;
    long steps = 0;
};

Trajectory evolve(const LindbladSpec& spec, const DensityMatrix& rho0);

// Row-major vectorization: rho(i, j) sits at i * d + j.
SpMat liouvillian(const FockOperator& h, const std::vector<CollapseOp>& c);
// Index sets of the connected components of the Liouvillian's coupling graph.
std::vector<std::vector<int>> liouvillian_blocks(const SpMat& L);

struct RelaxOptions {
    double kappa = 1.0;  // sets the residual scale
    double tol = 1e-10;
    int max_steps = 400;
    double h0 = 0.05;
    double h_max = 1e3;
};

// Long-time limit under dissipation only. Backward Euler with a growing step,
// stopped once ||L(rho)||_F <= tol * kappa. ConvergenceError otherwise.
CMat relax_to_steady(const std::vector<CollapseOp>& c, const CMat& rho, const RelaxOptions& opt = {},
                     double* residual = nullptr);
// Same flow applied to arbitrary (not necessarily Hermitian) matrices sharing one
// factorization per step; the target applies to the Frobenius norm over all of them.
std::vector<CMat> relax_to_steady(const std::vector<CollapseOp>& c, const std::vector<CMat>& xs,
                                  const RelaxOptions& opt = {}, double* residual = nullptr);

struct DecayFit {
    double rate = 0.0;  // -slope of ln(y - asymptote)
    double r2 = 0.0;
    double intercept = 0.0;
    int points = 0;
};

enum class Observable { Purity, Population };

// Least-squares slope of ln(y - asymptote) over t in [t_lo, t_hi].
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi,
                        double asymptote);
DecayFit fit_decay_rate(const Trajectory& tr, double t_lo, double t_hi, double asymptote = 0.5,
                        Observable obs = Observable::Purity, const std::string& label = "");

// ceil(|a|^2 + 6|a| + 14): truncation for dissipative dynamics, where the
// two-photon drive keeps the population well below the default rule's margin.
int dynamics_truncation(double abs_alpha);

struct GammaZOptions {
    int dim = 0;  // 0 -> dynamics_truncation
    int samples = 50;
    double t0 = 5.0;  // initial run length in units of 1/kappa
    int refinements = 2;
};

struct GammaZResult {
    double gamma_z = 0.0;  // coherence decay rate in the {C+, C-} basis
    double r2 = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    int dim = 0;
};

// Single mode, H = H^{RWA,1}(E_J, phi_a), L = sqrt(kappa)(a^2 - alpha^2),
// rho0 = |+><+| with |+> = (C+ + C-)/sqrt 2. The purity excess over 1/2 decays
// at twice the coherence rate; the fit window is [0.1, 0.5]/rate, re-estimated
// `refinements` times from an initial fit on [t0/4, t0].
GammaZResult gamma_z(double E_J, double phi_a, double alpha, double kappa, const GammaZOptions& opt = {});

// Columns: phi_a, gamma_m/E_J, gamma_z/E_J, eta with eta = Gm/(Gm + Gz), kappa = E_J/epsilon.
SweepResult efficiency_curve(double alpha, const std::vector<double>& phi_grid, double epsilon_zeno, double phi_c,
                             double n_c, const GammaZOptions& opt = {});

}  // namespace catqnd
