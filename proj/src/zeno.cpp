#include "catqnd/zeno.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "catqnd/errors.hpp"
#include "catqnd/lindblad.hpp"
#include "catqnd/rwa.hpp"
#include "catqnd/specfun.hpp"

namespace catqnd {

namespace {

constexpr double kPi = std::numbers::pi;
using RMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_positive(double alpha, double phi, const char* what) {
    if (!(alpha > 0.0) || !(phi > 0.0)) throw DomainError(std::string(what) + ": alpha and phi_a must be positive");
}

RMat as_matrix(const CVec& v, int da, int db) { return Eigen::Map<const RMat>(v.data(), da, db); }

CVec as_vector(const RMat& m) {
    CVec v(m.size());
    Eigen::Map<RMat>(v.data(), m.rows(), m.cols()) = m;
    return v;
}

struct Nonzero {
    int index;
    cplx value;
};

}  // namespace

RVec ProjectedHamiltonian::diagonal() const { return matrix.diagonal().real(); }

double ProjectedHamiltonian::max_offdiagonal() const {
    double m = 0.0;
    for (int i = 0; i < matrix.rows(); ++i)
        for (int j = 0; j < matrix.cols(); ++j)
            if (i != j) m = std::max(m, std::abs(matrix(i, j)));
    return m;
}

ProjectedHamiltonian project(const FockOperator& h, const CatBasis& basis) {
    if (h.space() != basis.space) throw DimensionError("project: basis and Hamiltonian live on different spaces");
    const CMat B = basis.matrix();
    CMat HB(B.rows(), B.cols());
    for (int s = 0; s < B.cols(); ++s) HB.col(s) = h.apply(B.col(s));
    return {basis, B.adjoint() * HB, basis.alphas.front(), basis.size()};
}

CPlusMinus c_pm_closed_form(double E_J, double phi_a, double alpha) {
    // phi_a = 0 is regular: H = -E_J and c+- = -E_J
    if (!(alpha > 0.0) || !(phi_a >= 0.0)) throw DomainError("c_pm_closed_form: need alpha > 0 and phi_a >= 0");
    const double y = 2.0 * alpha * phi_a;
    const double j = std::exp(-0.5 * phi_a * phi_a) * bessel_j0(y);
    // e^{-phi^2/2 - 2a^2} I0(2 a phi) = e^{-(phi - 2a)^2/2} e^{-y} I0(y)
    const double i = std::exp(-0.5 * (phi_a - 2.0 * alpha) * (phi_a - 2.0 * alpha)) * bessel_i0_scaled(y);
    return {-E_J * (j + i), -E_J * (j - i)};
}

CPlusMinus c_pm_normalized(double E_J, double phi_a, double alpha) {
    const auto b = c_pm_closed_form(E_J, phi_a, alpha);
    const double e = std::exp(-2.0 * alpha * alpha);
    return {b.c_plus / (1.0 + e), b.c_minus / (1.0 - e)};
}

double omega_a_approx(double E_J, double phi_a, double alpha) {
    require_positive(alpha, phi_a, "omega_a_approx");
    const double g = phi_a - 2.0 * alpha;
    return E_J * std::exp(-0.5 * g * g) / std::sqrt(kPi * alpha * phi_a);
}

double omega_a_exact(double E_J, double phi_a, double alpha) {
    const auto c = c_pm_normalized(E_J, phi_a, alpha);
    return c.c_minus - c.c_plus;
}

double spectrum_scale(double E_J, double phi_a, double alpha) { return E_J / std::sqrt(4.0 * kPi * alpha * phi_a); }

double spectrum_envelope(double alpha, double phi_a, int q) {
    if (q < 1) throw DomainError("spectrum_envelope: q must be >= 1");
    int m0 = 0;
    double best = 1e300;
    for (int m = 0; m < q; ++m) {
        const double g = std::abs(phi_a - 2.0 * alpha * std::sin(m * kPi / q));
        if (g < best) best = g, m0 = m;
    }
    const double d = std::sin((m0 + 1) * kPi / q) - std::sin(m0 * kPi / q);
    return std::exp(-2.0 * alpha * alpha * d * d);
}

std::vector<double> projected_spectrum_q(double E_J, double phi_a, double alpha, int q, SpectrumMethod method,
                                         int dim) {
    if (q < 1) throw DomainError("projected_spectrum_q: q must be >= 1");
    require_positive(alpha, phi_a, "projected_spectrum_q");
    std::vector<double> c(q);
    switch (method) {
        case SpectrumMethod::Asymptotic: {
            const double scale = spectrum_scale(E_J, phi_a, alpha);
            for (int k = 0; k < q; ++k) {
                double s = 0.0;
                for (int m = 0; m < q; ++m) {
                    const double sn = std::sin(m * kPi / q), cs = std::cos(m * kPi / q);
                    const double g = phi_a - 2.0 * alpha * sn;
                    const double theta = 2.0 * alpha * cs * (phi_a - alpha * sn) - kPi / 4 + m * kPi / (2.0 * q);
                    s += std::exp(-0.5 * g * g) * std::cos(2.0 * kPi * k * m / q + theta);
                }
                c[k] = -scale * s;
            }
            break;
        }
        case SpectrumMethod::Exact: {
            // <a|H|a u> = -E_J e^{-phi^2/2} e^{-a^2(1-u)} J0(2 phi a sqrt u), J0(z) = I0(iz)
            const double a2 = alpha * alpha;
            std::vector<cplx> G(q), N(q);
            for (int m = 0; m < q; ++m) {
                const cplx u = std::polar(1.0, 2.0 * kPi * m / q);
                const cplx iz = cplx(0.0, 1.0) * 2.0 * phi_a * alpha * std::sqrt(u);
                const double re = -0.5 * phi_a * phi_a - a2 * (1.0 - u.real()) + std::abs(iz.real());
                G[m] = -E_J * std::exp(re) * std::polar(1.0, a2 * u.imag()) * bessel_i0_complex_scaled(iz);
                N[m] = std::exp(-a2 * (1.0 - u.real())) * std::polar(1.0, a2 * u.imag());
            }
            for (int k = 0; k < q; ++k) {
                cplx num = 0.0, den = 0.0;
                for (int m = 0; m < q; ++m) {
                    const cplx ph = std::polar(1.0, -2.0 * kPi * m * k / q);
                    num += ph * G[m];
                    den += ph * N[m];
                }
                c[k] = (num / den).real();
            }
            break;
        }
        case SpectrumMethod::Numeric: {
            const FockSpace s(dim > 0 ? dim : default_truncation(alpha));
            JunctionParams p;
            p.E_J = E_J;
            p.phi_a = phi_a;
            const auto P = project(h_rwa_single(p, s), make_cat_basis(s, alpha, q));
            for (int k = 0; k < q; ++k) c[k] = P.matrix(k, k).real();
            break;
        }
    }
    return c;
}

DegeneracyDiagnostics degeneracy_from_spectrum(const std::vector<double>& c) {
    if (c.size() != 4) throw DimensionError("degeneracy diagnostics need the q = 4 spectrum");
    return {std::hypot(c[0] - c[1], c[2] - c[3]), std::hypot(c[0] - c[2], c[1] - c[3]), 0.0};
}

DegeneracyDiagnostics four_photon_diagnostics(double E_J, double phi_a, double alpha, int dim) {
    auto d = degeneracy_from_spectrum(projected_spectrum_q(E_J, phi_a, alpha, 4, SpectrumMethod::Numeric, dim));
    d.omega_a = omega_a_approx(E_J, phi_a, alpha);
    return d;
}

DegeneracyDiagnostics four_photon_diagnostics(const FockOperator& h, double alpha) {
    const auto P = project(h, make_cat_basis(h.space(), alpha, 4));
    const RVec d = P.diagonal();
    return degeneracy_from_spectrum({d(0), d(1), d(2), d(3)});
}

FockOperator two_photon_dissipator(const FockSpace& mode, cplx alpha, double kappa) {
    if (mode.modes() != 1) throw DimensionError("two_photon_dissipator: single-mode space required");
    if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
    const CMat a = annihilation(mode).dense();
    return FockOperator(mode, std::sqrt(kappa) * (a * a - alpha * alpha * CMat::Identity(mode.dim(), mode.dim())));
}

FockOperator JumpOperator::to_operator() const { return FockOperator(space, image * basis.adjoint()); }

double JumpOperator::norm() const {
    if (image.cols() == 0) return 0.0;
    return Eigen::JacobiSVD<CMat>(image).singularValues()(0);
}

ZenoJumpSet zeno_jump_ops(const FockOperator& h, const std::vector<FockOperator>& dissipators,
                          const CatBasis& manifold, double kappa_2ph, double E_J) {
    const FockSpace& space = h.space();
    const int modes = space.modes();
    if (static_cast<int>(dissipators.size()) != modes)
        throw DimensionError("zeno_jump_ops: need one dissipator per mode");
    if (manifold.space != space) throw DimensionError("zeno_jump_ops: manifold lives on a different space");
    for (int j = 0; j < modes; ++j)
        if (dissipators[j].space() != space.mode_space(j))
            throw DimensionError("zeno_jump_ops: dissipator " + std::to_string(j) + " is not on its mode's space");

    std::vector<RVec> lam(modes);
    std::vector<CMat> V(modes), L(modes);
    for (int j = 0; j < modes; ++j) {
        L[j] = dissipators[j].dense();
        Eigen::SelfAdjointEigenSolver<CMat> es(L[j].adjoint() * L[j]);
        lam[j] = es.eigenvalues();
        V[j] = es.eigenvectors();
    }
    const int da = space.mode_dim(0), db = modes == 2 ? space.mode_dim(1) : 1;
    Eigen::MatrixXd S(da, db);
    for (int i = 0; i < da; ++i)
        for (int k = 0; k < db; ++k) S(i, k) = lam[0](i) + (modes == 2 ? lam[1](k) : 0.0);

    PseudoInverseReport rep;
    rep.max_eigenvalue = S.maxCoeff();
    rep.cutoff = kPseudoInverseCutoff * rep.max_eigenvalue;
    rep.smallest_retained = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd Sinv = Eigen::MatrixXd::Zero(da, db);
    for (int i = 0; i < da; ++i)
        for (int k = 0; k < db; ++k) {
            const double s = S(i, k);
            if (s <= rep.cutoff) {
                ++rep.kernel_dim;
                rep.largest_kernel = std::max(rep.largest_kernel, s);
            } else {
                Sinv(i, k) = 1.0 / s;
                rep.smallest_retained = std::min(rep.smallest_retained, s);
            }
            if (s > 1e-2 * rep.cutoff && s < 1e2 * rep.cutoff) rep.ambiguous = true;
        }
    if (rep.ambiguous) {
        std::ostringstream os;
        os << "pseudo-inverse cutoff " << rep.cutoff << " is ambiguous: largest kernel eigenvalue "
           << rep.largest_kernel << ", smallest retained " << rep.smallest_retained;
        rep.warning = os.str();
    }

    auto pinv = [&](const CVec& x) -> RMat {
        const RMat X = as_matrix(x, da, db);
        RMat C = V[0].adjoint() * X;
        if (modes == 2) C = C * V[1].conjugate();
        C = C.cwiseProduct(Sinv.cast<cplx>());
        RMat Y = V[0] * C;
        if (modes == 2) Y = Y * V[1].transpose();
        return Y;
    };

    const CMat B = manifold.matrix();
    ZenoJumpSet out;
    out.report = rep;
    out.kappa_2ph = kappa_2ph;
    out.epsilon_zeno = E_J / kappa_2ph;
    for (int j = 0; j < modes; ++j) out.R_ops.push_back({space, B, CMat(space.dim(), B.cols())});
    for (int s = 0; s < B.cols(); ++s) {
        const RMat Y = pinv(h.apply(B.col(s)));
        for (int j = 0; j < modes; ++j) {
            const RMat LY = j == 0 ? RMat(L[0] * Y) : RMat(Y * L[1].transpose());
            out.R_ops[j].image.col(s) = 2.0 * as_vector(LY);
        }
    }
    return out;
}

AsymptoticMap::AsymptoticMap(const FockOperator& Lop, const CatBasis& basis) : space_(Lop.space()) {
    if (space_.modes() != 1) throw DimensionError("AsymptoticMap: build single-mode maps and combine with product()");
    if (basis.space != space_ || basis.qs.size() != 1) throw DimensionError("AsymptoticMap: basis/space mismatch");
    const int q = basis.qs[0], d = space_.dim();
    if (basis.size() != q) throw DimensionError("AsymptoticMap: basis must hold all q cat states");
    const CMat L = Lop.dense(), K = L.adjoint() * L;

    std::vector<std::vector<Nonzero>> Lcol(d), Krow(d), Kcol(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (L(i, j) != 0.0) {
                if ((i - j) % q != 0)
                    throw DomainError("AsymptoticMap: dissipator couples different Fock residues mod q");
                Lcol[j].push_back({i, L(i, j)});
            }
            if (K(i, j) != 0.0) {
                Krow[i].push_back({j, K(i, j)});
                Kcol[j].push_back({i, K(i, j)});
            }
        }

    basis_ = basis.matrix();
    q_ = {q};
    J_.assign(1, std::vector<std::vector<CMat>>(q, std::vector<CMat>(q)));
    for (int r = 0; r < q; ++r)
        for (int rp = r; rp < q; ++rp) {
            const int nr = (d - r + q - 1) / q, nrp = (d - rp + q - 1) / q, N = nr * nrp;
            auto idx = [&](int i, int j) { return (i / q) * nrp + j / q; };
            const CVec& cs = basis.states[r].amplitudes;
            const CVec& cp = basis.states[rp].amplitudes;
            CMat A = CMat::Zero(N + 1, N + 1);
            for (int i = r; i < d; i += q)
                for (int j = rp; j < d; j += q) {
                    const int row = idx(i, j);
                    // L^dag J L - (K J + J K)/2
                    for (const auto& [k, lk] : Lcol[i])
                        for (const auto& [l, ll] : Lcol[j]) A(row, idx(k, l)) += std::conj(lk) * ll;
                    for (const auto& [k, kk] : Krow[i]) A(row, idx(k, j)) -= 0.5 * kk;
                    for (const auto& [l, kl] : Kcol[j]) A(row, idx(i, l)) -= 0.5 * kl;
                    A(row, N) = cs(i) * std::conj(cp(j));
                    A(N, row) = std::conj(cs(i)) * cp(j);
                }
            CVec rhs = CVec::Zero(N + 1);
            rhs(N) = 1.0;
            const CVec sol = A.partialPivLu().solve(rhs);
            residual_ = std::max(residual_, (A.topLeftCorner(N, N) * sol.head(N)).norm());
            CMat J = CMat::Zero(d, d);
            for (int i = r; i < d; i += q)
                for (int j = rp; j < d; j += q) J(i, j) = sol(idx(i, j));
            J_[0][rp][r] = J.adjoint();
            J_[0][r][rp] = std::move(J);
        }
}

AsymptoticMap AsymptoticMap::product(const AsymptoticMap& a, const AsymptoticMap& b) {
    if (a.q_.size() != 1 || b.q_.size() != 1) throw DimensionError("AsymptoticMap::product: single-mode factors only");
    AsymptoticMap m(FockSpace::product(a.space_, b.space_));
    const int qa = a.q_[0], qb = b.q_[0];
    m.basis_.resize(m.space_.dim(), qa * qb);
    for (int sa = 0; sa < qa; ++sa)
        for (int sb = 0; sb < qb; ++sb) {
            const CVec& u = a.basis_.col(sa);
            const CVec& v = b.basis_.col(sb);
            CVec w(u.size() * v.size());
            for (int i = 0; i < u.size(); ++i) w.segment(i * v.size(), v.size()) = u(i) * v;
            m.basis_.col(sa * qb + sb) = w;
        }
    m.q_ = {qa, qb};
    m.J_ = {a.J_[0], b.J_[0]};
    m.residual_ = std::max(a.residual_, b.residual_);
    return m;
}

cplx AsymptoticMap::coefficient(const CVec& u, const CVec& v, int s, int t) const {
    if (q_.size() == 1) return std::conj(u.dot(J_[0].at(s).at(t) * v));
    const int qb = q_[1], da = space_.mode_dim(0), db = space_.mode_dim(1);
    const CMat& Ja = J_[0].at(s / qb).at(t / qb);
    const CMat& Jb = J_[1].at(s % qb).at(t % qb);
    const RMat W = Ja * as_matrix(v, da, db) * Jb.transpose();
    return std::conj((as_matrix(u, da, db).conjugate().cwiseProduct(W)).sum());
}

CMat AsymptoticMap::coefficients(const CVec& u, const CVec& v) const {
    const int n = size();
    CMat M(n, n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) M(s, t) = coefficient(u, v, s, t);
    return M;
}

CMat AsymptoticMap::coefficients(const CMat& X) const {
    const int n = size();
    CMat M(n, n);
    if (q_.size() == 1) {
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) M(s, t) = (J_[0][s][t].conjugate().cwiseProduct(X)).sum();
        return M;
    }
    const int qb = q_[1], da = space_.mode_dim(0), db = space_.mode_dim(1);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
            const CMat& A = J_[0][s / qb][t / qb];
            const CMat& B = J_[1][s % qb][t % qb];
            // tr((A (x) B)^dag X) = sum conj(A_ik) conj(B_jl) X_{(ij),(kl)}
            CMat T = CMat::Zero(db, db);
            for (int i = 0; i < da; ++i)
                for (int k = 0; k < da; ++k) {
                    if (A(i, k) == 0.0) continue;
                    T += std::conj(A(i, k)) * X.block(i * db, k * db, db, db);
                }
            M(s, t) = (B.conjugate().cwiseProduct(T)).sum();
        }
    return M;
}

CMat AsymptoticMap::apply(const CMat& X) const { return basis_ * coefficients(X) * basis_.adjoint(); }

CMat AsymptoticMap::conserved(int s, int sp) const {
    if (q_.size() == 1) return J_[0].at(s).at(sp);
    const int qb = q_[1];
    const CMat& A = J_[0].at(s / qb).at(sp / qb);
    const CMat& B = J_[1].at(s % qb).at(sp % qb);
    CMat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int k = 0; k < A.cols(); ++k) out.block(i * B.rows(), k * B.cols(), B.rows(), B.cols()) = A(i, k) * B;
    return out;
}

DensityMatrix asymptotic_projection_map(const DensityMatrix& rho, const std::vector<FockOperator>& dissipators,
                                        const ProjectionOptions& opt) {
    if (dissipators.empty()) throw ValidationError("asymptotic_projection_map: no dissipators");
    RelaxOptions ro;
    ro.kappa = opt.kappa;
    ro.tol = opt.tol;
    ro.max_steps = opt.max_steps;
    const FockSpace& sp = rho.space();
    const bool per_mode = sp.modes() == 2 && dissipators.size() == 2 && dissipators[0].space() == sp.mode_space(0) &&
                          dissipators[1].space() == sp.mode_space(1);
    if (!per_mode) {
        std::vector<CollapseOp> c;
        for (const auto& L : dissipators) {
            require_same_space(L.space(), sp, "asymptotic_projection_map");
            c.push_back({L, 1.0});
        }
        CMat out = relax_to_steady(c, rho.matrix(), ro);
        out = 0.5 * (out + out.adjoint()).eval();
        return DensityMatrix(sp, out);
    }

    // The two dissipators commute, so the limit is mode a relaxed on every
    // (n_b, m_b) slice followed by mode b on every (n_a, m_a) slice.
    const int da = sp.mode_dim(0), db = sp.mode_dim(1);
    CMat X = rho.matrix();
    ro.tol = opt.tol / 2;
    std::vector<CMat> sl(static_cast<std::size_t>(db) * db, CMat(da, da));
    for (int ib = 0; ib < db; ++ib)
        for (int jb = 0; jb < db; ++jb)
            for (int ia = 0; ia < da; ++ia)
                for (int ja = 0; ja < da; ++ja) sl[ib * db + jb](ia, ja) = X(ia * db + ib, ja * db + jb);
    sl = relax_to_steady({{dissipators[0], 1.0}}, sl, ro);
    std::vector<CMat> sb(static_cast<std::size_t>(da) * da, CMat(db, db));
    for (int ib = 0; ib < db; ++ib)
        for (int jb = 0; jb < db; ++jb)
            for (int ia = 0; ia < da; ++ia)
                for (int ja = 0; ja < da; ++ja) sb[ia * da + ja](ib, jb) = sl[ib * db + jb](ia, ja);
    sb = relax_to_steady({{dissipators[1], 1.0}}, sb, ro);
    for (int ia = 0; ia < da; ++ia)
        for (int ja = 0; ja < da; ++ja)
            for (int ib = 0; ib < db; ++ib)
                for (int jb = 0; jb < db; ++jb) X(ia * db + ib, ja * db + jb) = sb[ia * da + ja](ib, jb);
    X = 0.5 * (X + X.adjoint()).eval();
    return DensityMatrix(sp, X);
}

FockState zeno_leakage_state(double E_J, double phi_a, double alpha, double kappa, int dim) {
    const FockSpace s(dim > 0 ? dim : default_truncation(alpha));
    JunctionParams p;
    p.E_J = E_J;
    p.phi_a = phi_a;
    const auto set = zeno_jump_ops(h_rwa_single(p, s), {two_photon_dissipator(s, alpha, kappa)},
                                   make_cat_basis(s, alpha, 2), kappa, E_J);
    return FockState(s, set.R_ops[0].apply(coherent_state(s, alpha).amplitudes)).normalized();
}

GammaIndResult gamma_ind(double E_J, double phi, double alpha, double kappa_2ph, const GammaIndOptions& opt) {
    require_positive(alpha, phi, "gamma_ind");
    const FockSpace s(opt.dim > 0 ? opt.dim : default_truncation(alpha));
    const auto ab = FockSpace::product(s, s);
    JunctionParams p;
    p.E_J = E_J;
    p.phi_a = phi;
    p.phi_b = phi;
    const auto L = two_photon_dissipator(s, alpha, kappa_2ph);
    const auto Bs = make_cat_basis(s, alpha, 2);
    const auto B2 = tensor(Bs, Bs);
    const auto jumps = zeno_jump_ops(h_rwa_two_mode(p, ab), {L, L}, B2, kappa_2ph, E_J);
    const AsymptoticMap one(L, Bs);
    const auto map = AsymptoticMap::product(one, one);
    const CMat& B = map.basis();

    const auto plus = coherent_state(s, alpha), minus = coherent_state(s, -alpha);
    const CVec x = tensor(plus, plus).amplitudes;
    const CVec corners[2] = {tensor(minus, plus).amplitudes, tensor(plus, minus).amplitudes};
    const CVec corr = tensor(minus, minus).amplitudes;

    GammaIndResult out;
    out.dim = s.dim();
    out.report = jumps.report;
    for (const auto& R : jumps.R_ops) {
        const CVec r = R.apply(x);
        const CMat M = map.coefficients(r, r);
        auto jump_pop = [&](const CVec& c) {
            const CVec w = B.adjoint() * c;
            return (w.adjoint() * M * w)(0, 0).real();
        };
        auto anti = [&](const CVec& c) { return -(x.dot(c) * R.apply(c).dot(r)).real(); };
        for (const auto& c : corners) {
            out.jump_term += jump_pop(c);
            out.anticommutator_term += anti(c);
        }
        out.gamma_corr += jump_pop(corr) + anti(corr);
    }
    out.gamma_ind = out.jump_term + out.anticommutator_term;

    const int n = map.size();
    out.cat_dephasing = CMat::Zero(n, n);
    for (const auto& R : jumps.R_ops) {
        const CMat& img = R.image;  // R|b_s> for the same basis ordering
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const cplx g = map.coefficient(img.col(a), img.col(b), a, b) -
                               0.5 * (img.col(a).squaredNorm() + img.col(b).squaredNorm());
                out.cat_dephasing(a, b) -= g.real();
            }
    }
    return out;
}

}  // namespace catqnd
