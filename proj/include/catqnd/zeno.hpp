#pragma once

#include <limits>
#include <string>
#include <vector>

#include "catqnd/fock.hpp"

namespace catqnd {

struct ProjectedHamiltonian {
    CatBasis basis;
    CMat matrix;  // <basis_i|H|basis_j>
    cplx alpha;
    int q;

    RVec diagonal() const;
    double max_offdiagonal() const;
};

ProjectedHamiltonian project(const FockOperator& h, const CatBasis& basis);

struct CPlusMinus {
    double c_plus;
    double c_minus;
};

// -E_J e^{-phi^2/2}[J0(2|a|phi) +- e^{-2|a|^2} I0(2|a|phi)], the N = 1/sqrt 2 form.
CPlusMinus c_pm_closed_form(double E_J, double phi_a, double alpha);
// <C+-|H|C+-> for the normalized cats: the bracket divided by (1 +- e^{-2|a|^2}).
CPlusMinus c_pm_normalized(double E_J, double phi_a, double alpha);

// E_J e^{-(phi-2|a|)^2/2} / sqrt(pi |a| phi)
double omega_a_approx(double E_J, double phi_a, double alpha);
// c- - c+ from the normalized closed form.
double omega_a_exact(double E_J, double phi_a, double alpha);

enum class SpectrumMethod {
    Asymptotic,  // saddle-point sum over m with Gaussian weights
    Exact,       // ratio of q-term sums of <a|H|a w^m>, complex J0
    Numeric,     // project(h_rwa_single, make_cat_basis)
};

// c^{kk} for k = 0..q-1 on M(q, |alpha|).
std::vector<double> projected_spectrum_q(double E_J, double phi_a, double alpha, int q,
                                         SpectrumMethod method = SpectrumMethod::Asymptotic, int dim = 0);

// m0 minimizes |phi - 2|a| sin(m pi/q)|; returns e^{-2|a|^2 (sin((m0+1)pi/q) - sin(m0 pi/q))^2}.
double spectrum_envelope(double alpha, double phi_a, int q);
// Prefactor E_J / sqrt(4 pi |a| phi) of the asymptotic sum.
double spectrum_scale(double E_J, double phi_a, double alpha);

struct DegeneracyDiagnostics {
    double delta_parity = 0.0;        // sqrt((c00-c11)^2 + (c22-c33)^2)
    double small_delta_parity = 0.0;  // sqrt((c00-c22)^2 + (c11-c33)^2)
    double omega_a = 0.0;             // approximate closed form
};

DegeneracyDiagnostics degeneracy_from_spectrum(const std::vector<double>& c4);
DegeneracyDiagnostics four_photon_diagnostics(double E_J, double phi_a, double alpha, int dim = 0);
// Any Fock-diagonal single-mode H projected on M(4, alpha); omega_a left 0.
DegeneracyDiagnostics four_photon_diagnostics(const FockOperator& h, double alpha);

// sqrt(kappa) (a^2 - alpha^2)
FockOperator two_photon_dissipator(const FockSpace& mode, cplx alpha, double kappa);

struct PseudoInverseReport {
    double max_eigenvalue = 0.0;
    double cutoff = 0.0;
    double largest_kernel = 0.0;     // largest eigenvalue treated as zero
    double smallest_retained = 0.0;  // smallest eigenvalue inverted
    int kernel_dim = 0;
    bool ambiguous = false;  // an eigenvalue sits within two decades of the cutoff
    std::string warning;
};

// Rank-limited operator sum_s |image_s><basis_s|, basis orthonormal.
struct JumpOperator {
    FockSpace space;
    CMat basis;
    CMat image;

    CVec apply(const CVec& v) const { return image * (basis.adjoint() * v); }
    FockOperator to_operator() const;
    double norm() const;
};

struct ZenoJumpSet {
    std::vector<JumpOperator> R_ops;
    double kappa_2ph = std::numeric_limits<double>::quiet_NaN();
    double epsilon_zeno = std::numeric_limits<double>::quiet_NaN();
    PseudoInverseReport report;
};

inline constexpr double kPseudoInverseCutoff = 1e-8;

// R_j = 2 L_j (sum_k L_k^dag L_k)^+ H Pi with Pi the projector on span(manifold).
// dissipators[j] acts on mode j and is given on that mode's space. The
// pseudo-inverse uses per-mode eigendecompositions; eigenvalues of the sum
// below 1e-8 * max are treated as kernel. E_J and kappa are only recorded.
ZenoJumpSet zeno_jump_ops(const FockOperator& h, const std::vector<FockOperator>& dissipators,
                          const CatBasis& manifold, double kappa_2ph = std::numeric_limits<double>::quiet_NaN(),
                          double E_J = std::numeric_limits<double>::quiet_NaN());

// Asymptotic map of the bare multi-photon dissipator, built from its conserved
// quantities: L_M(X) = sum_{s,s'} tr(J_{ss'}^dag X) |C_s><C_s'| with
// L*(J_{ss'}) = 0 and <C_t|J_{ss'}|C_t'> = delta. Each J is found by a bordered
// solve on one residue block (i mod q, j mod q); two-mode maps are tensor products.
class AsymptoticMap {
public:
    // L couples only Fock indices of equal residue mod q; basis spans ker L.
    AsymptoticMap(const FockOperator& L, const CatBasis& basis);
    static AsymptoticMap product(const AsymptoticMap& a, const AsymptoticMap& b);

    int size() const { return static_cast<int>(basis_.cols()); }
    const CMat& basis() const { return basis_; }
    const FockSpace& space() const { return space_; }

    // M(s, s') = tr(J_{ss'}^dag |u><v|)
    CMat coefficients(const CVec& u, const CVec& v) const;
    cplx coefficient(const CVec& u, const CVec& v, int s, int sp) const;
    CMat coefficients(const CMat& X) const;
    CMat apply(const CMat& X) const;
    CMat conserved(int s, int sp) const;  // dense J_{ss'} on the full space
    double residual() const { return residual_; }

private:
    AsymptoticMap(FockSpace s) : space_(std::move(s)) {}
    FockSpace space_;
    CMat basis_;
    std::vector<int> q_;                            // per mode
    std::vector<std::vector<std::vector<CMat>>> J_;  // [mode][s][s']
    double residual_ = 0.0;
};

struct ProjectionOptions {
    double kappa = 1.0;
    double tol = 1e-10;
    int max_steps = 400;
};

// Long-time limit of rho under sum_j D[L_j] by direct integration (the dual route
// to AsymptoticMap). Dissipators include sqrt(kappa) and are given on rho's space,
// or for a two-mode rho as one per mode on that mode's space.
DensityMatrix asymptotic_projection_map(const DensityMatrix& rho, const std::vector<FockOperator>& dissipators,
                                        const ProjectionOptions& opt = {});

// |psi_R> = R|alpha>/||R|alpha>|| for one mode with H^{RWA,1} and sqrt(kappa)(a^2 - alpha^2).
FockState zeno_leakage_state(double E_J, double phi_a, double alpha, double kappa, int dim = 0);

struct GammaIndResult {
    double gamma_ind = 0.0;           // into span{|-a,a>, |a,-a>}
    double jump_term = 0.0;           // tr[P_c L_M(sum_j R_j x R_j^dag)]
    double anticommutator_term = 0.0;  // -Re sum_j <x|P_c R_j^dag R_j|x>
    double gamma_corr = 0.0;          // same estimator into |-a,-a>
    CMat cat_dephasing;               // 4x4, -Re of the second-order generator on |s><s'|, s in (++,+-,-+,--)
    int dim = 0;
    PseudoInverseReport report;
};

struct GammaIndOptions {
    int dim = 0;  // per mode; 0 -> default_truncation
};

// Two modes with alpha = beta, phi_a = phi_b = phi, H = H^{RWA,1}, x = |a, a>.
GammaIndResult gamma_ind(double E_J, double phi, double alpha, double kappa_2ph, const GammaIndOptions& opt = {});

}  // namespace catqnd
