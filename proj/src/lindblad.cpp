#include "catqnd/lindblad.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <unsupported/Eigen/MatrixFunctions>

#include "catqnd/errors.hpp"
#include "catqnd/measurement.hpp"
#include "catqnd/rwa.hpp"
#include "catqnd/zeno.hpp"

namespace catqnd {

namespace {

using Trip = Eigen::Triplet<cplx>;

SpMat to_sparse(const CMat& m) {
    std::vector<Trip> t;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0) t.emplace_back(i, j, m(i, j));
    SpMat s(m.rows(), m.cols());
    s.setFromTriplets(t.begin(), t.end());
    return s;
}

SpMat sparse_of(const FockOperator& op) {
    if (op.is_diagonal()) {
        const CVec& d = op.diagonal();
        std::vector<Trip> t;
        for (int i = 0; i < d.size(); ++i)
            if (d(i) != 0.0) t.emplace_back(i, i, d(i));
        SpMat s(d.size(), d.size());
        s.setFromTriplets(t.begin(), t.end());
        return s;
    }
    return to_sparse(op.dense());
}

void add_kron(std::vector<Trip>& out, const SpMat& a, const SpMat& b, cplx scale) {
    const int nb = static_cast<int>(b.rows());
    for (int i = 0; i < a.outerSize(); ++i)
        for (SpMat::InnerIterator ia(a, i); ia; ++ia)
            for (int k = 0; k < b.outerSize(); ++k)
                for (SpMat::InnerIterator ib(b, k); ib; ++ib)
                    out.emplace_back(ia.row() * nb + ib.row(), ia.col() * nb + ib.col(), scale * ia.value() * ib.value());
}

SpMat sparse_identity(int d) {
    SpMat I(d, d);
    I.setIdentity();
    return I;
}

struct Blocks {
    std::vector<std::vector<int>> sets;
    std::vector<int> mirror;  // block holding the transposed indices
};

Blocks mirrored_blocks(const SpMat& L, int d) {
    Blocks b;
    b.sets = liouvillian_blocks(L);
    std::vector<int> owner(L.rows());
    for (int k = 0; k < static_cast<int>(b.sets.size()); ++k)
        for (int idx : b.sets[k]) owner[idx] = k;
    for (const auto& s : b.sets) {
        const int i = s.front() / d, j = s.front() % d;
        b.mirror.push_back(owner[j * d + i]);
    }
    return b;
}

CMat dense_block(const SpMat& L, const std::vector<int>& set, std::vector<int>& local) {
    const int n = static_cast<int>(set.size());
    for (int k = 0; k < n; ++k) local[set[k]] = k;
    CMat B = CMat::Zero(n, n);
    for (int k = 0; k < n; ++k)
        for (SpMat::InnerIterator it(L, set[k]); it; ++it) B(k, local[it.col()]) = it.value();
    return B;
}

Eigen::SparseMatrix<cplx> sparse_block(const SpMat& L, const std::vector<int>& set, std::vector<int>& local) {
    const int n = static_cast<int>(set.size());
    for (int k = 0; k < n; ++k) local[set[k]] = k;
    std::vector<Trip> t;
    for (int k = 0; k < n; ++k)
        for (SpMat::InnerIterator it(L, set[k]); it; ++it) t.emplace_back(k, local[it.col()], it.value());
    Eigen::SparseMatrix<cplx> B(n, n);
    B.setFromTriplets(t.begin(), t.end());
    return B;
}

struct Recorder {
    const LindbladSpec& spec;
    Trajectory& tr;
    void operator()(double t, const CMat& rho) {
        tr.times.push_back(t);
        tr.purities.push_back(rho.squaredNorm());
        tr.traces.push_back(rho.trace().real());
        for (const auto& [label, P] : spec.observables)
            tr.populations[label].push_back((P.transpose().cwiseProduct(rho)).sum().real());
    }
};

void hermitize(CMat& rho) { rho = 0.5 * (rho + rho.adjoint()).eval(); }

long run_block_expm(const LindbladSpec& spec, const SpMat& L, const Blocks& blocks, CMat& rho, Recorder& rec) {
    const int d = static_cast<int>(rho.rows());
    const double dt = spec.t_final / spec.samples;
    std::vector<int> local(L.rows());
    std::vector<int> active;
    std::vector<CMat> prop;
    for (int k = 0; k < static_cast<int>(blocks.sets.size()); ++k) {
        if (blocks.mirror[k] < k) continue;
        active.push_back(k);
        const auto& set = blocks.sets[k];
        CMat P = (dense_block(L, set, local) * dt).exp();
        // The generator conserves the trace exactly; expm roundoff leaks ~1e-11 of it
        // per application. Restore t^T P = t^T with a rank-one correction.
        CVec t = CVec::Zero(set.size());
        for (std::size_t m = 0; m < set.size(); ++m)
            if (set[m] / d == set[m] % d) t(m) = 1.0;
        if (t.squaredNorm() > 0) P += t * (t.transpose() - t.transpose() * P) / t.squaredNorm();
        prop.push_back(std::move(P));
    }
    rec(0.0, rho);
    for (int step = 1; step <= spec.samples; ++step) {
        for (std::size_t a = 0; a < active.size(); ++a) {
            const auto& set = blocks.sets[active[a]];
            CVec v(set.size());
            for (std::size_t m = 0; m < set.size(); ++m) v(m) = rho(set[m] / d, set[m] % d);
            v = prop[a] * v;
            for (std::size_t m = 0; m < set.size(); ++m) {
                const int i = set[m] / d, j = set[m] % d;
                rho(i, j) = v(m);
                if (blocks.mirror[active[a]] != active[a]) rho(j, i) = std::conj(v(m));
            }
        }
        hermitize(rho);
        rec(step * dt, rho);
    }
    return spec.samples;
}

// Dormand-Prince 5(4) on dense rho with sparse operators.
long run_rk45(const LindbladSpec& spec, CMat& rho, Recorder& rec) {
    SpMat K = (cplx(0.0, -1.0) * sparse_of(spec.hamiltonian));
    std::vector<SpMat> Ls;
    for (const auto& c : spec.collapse_ops) {
        if (c.rate == 0.0) continue;
        SpMat l = std::sqrt(c.rate) * sparse_of(c.op);
        SpMat ld = l.adjoint();
        K -= 0.5 * SpMat(ld * l);
        Ls.push_back(l);
    }
    K.makeCompressed();

    auto f = [&](const CMat& r) {
        CMat kr = K * r;
        CMat out = kr + kr.adjoint();
        for (std::size_t m = 0; m < Ls.size(); ++m) {
            const CMat lr = Ls[m] * r;
            out += (Ls[m] * lr.adjoint()).adjoint();
        }
        return out;
    };

    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double dt_out = spec.t_final / spec.samples;
    double t = 0.0, h = std::min(spec.dt_initial, dt_out);
    long steps = 0;
    rec(0.0, rho);
    CMat k1 = f(rho);
    for (int sample = 1; sample <= spec.samples; ++sample) {
        const double t_next = sample * dt_out;
        while (t < t_next - 1e-14 * spec.t_final) {
            const double hs = std::min(h, t_next - t);
            const CMat k2 = f(rho + hs * a21 * k1);
            const CMat k3 = f(rho + hs * (a31 * k1 + a32 * k2));
            const CMat k4 = f(rho + hs * (a41 * k1 + a42 * k2 + a43 * k3));
            const CMat k5 = f(rho + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const CMat k6 = f(rho + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            CMat y = rho + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const CMat k7 = f(y);
            const double err =
                (hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).cwiseAbs().maxCoeff() /
                spec.tolerance;
            if (++steps > spec.max_steps) throw StiffnessError("RK45: step budget exhausted");
            if (err <= 1.0) {
                t += hs;
                rho = std::move(y);
                hermitize(rho);
                k1 = f(rho);  // recomputed after symmetrization
            }
            const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h = hs * fac;
            if (h < 1e-14 * std::max(1.0, spec.t_final)) throw StiffnessError("RK45: step size underflow");
        }
        rec(t_next, rho);
    }
    return steps;
}

}  // namespace

const char* integrator_name(Integrator m) {
    switch (m) {
        case Integrator::Auto: return "auto";
        case Integrator::BlockExpm: return "block-expm";
        case Integrator::RK45: return "rk45-dormand-prince";
    }
    return "?";
}

void LindbladSpec::validate() const {
    if (!(t_final > 0.0)) throw ValidationError("t_final must be positive");
    if (!(dt_initial > 0.0)) throw ValidationError("dt_initial must be positive");
    if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
    if (samples < 1) throw ValidationError("samples must be >= 1");
    for (const auto& c : collapse_ops) {
        if (!(c.rate >= 0.0)) throw ValidationError("collapse rates must be non-negative");
        require_same_space(c.op.space(), hamiltonian.space(), "LindbladSpec");
    }
    for (const auto& [label, P] : observables)
        if (P.rows() != hamiltonian.dim() || P.cols() != hamiltonian.dim())
            throw DimensionError("observable '" + label + "' has the wrong dimension");
}

SpMat liouvillian(const FockOperator& h, const std::vector<CollapseOp>& c) {
    const int d = h.dim();
    const SpMat I = sparse_identity(d);
    const SpMat H = sparse_of(h);
    std::vector<Trip> t;
    add_kron(t, H, I, cplx(0.0, -1.0));
    add_kron(t, I, SpMat(H.transpose()), cplx(0.0, 1.0));
    for (const auto& op : c) {
        if (op.rate == 0.0) continue;
        require_same_space(op.op.space(), h.space(), "liouvillian");
        const SpMat L = sparse_of(op.op);
        const SpMat K = SpMat(L.adjoint()) * L;
        add_kron(t, L, SpMat(L.conjugate()), op.rate);
        add_kron(t, K, I, -0.5 * op.rate);
        add_kron(t, I, SpMat(K.transpose()), -0.5 * op.rate);
    }
    SpMat out(static_cast<long>(d) * d, static_cast<long>(d) * d);
    out.setFromTriplets(t.begin(), t.end());
    out.prune(cplx(0.0, 0.0));
    return out;
}

std::vector<std::vector<int>> liouvillian_blocks(const SpMat& L) {
    const int n = static_cast<int>(L.rows());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (SpMat::InnerIterator it(L, i); it; ++it) {
            const int a = find(i), b = find(static_cast<int>(it.col()));
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::vector<int> id(n, -1);
    std::vector<std::vector<int>> out;
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (id[r] < 0) {
            id[r] = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[id[r]].push_back(i);
    }
    return out;
}

Trajectory evolve(const LindbladSpec& spec, const DensityMatrix& rho0) {
    spec.validate();
    require_same_space(rho0.space(), spec.hamiltonian.space(), "evolve");
    const int d = spec.hamiltonian.dim();
    Integrator mode = spec.integrator;
    SpMat L;
    Blocks blocks;
    if (mode == Integrator::BlockExpm || (mode == Integrator::Auto && d <= 256)) {
        L = liouvillian(spec.hamiltonian, spec.collapse_ops);
        blocks = mirrored_blocks(L, d);
        std::size_t largest = 0;
        for (const auto& s : blocks.sets) largest = std::max(largest, s.size());
        if (mode == Integrator::Auto)
            mode = largest <= static_cast<std::size_t>(spec.max_block_expm) ? Integrator::BlockExpm : Integrator::RK45;
    } else if (mode == Integrator::Auto) {
        mode = Integrator::RK45;
    }

    Trajectory tr{{}, {}, {}, {}, rho0, mode, 0};
    Recorder rec{spec, tr};
    CMat rho = rho0.matrix();
    tr.steps = mode == Integrator::BlockExpm ? run_block_expm(spec, L, blocks, rho, rec) : run_rk45(spec, rho, rec);
    tr.final_rho = DensityMatrix(rho0.space(), rho);
    return tr;
}

CMat relax_to_steady(const std::vector<CollapseOp>& c, const CMat& rho, const RelaxOptions& opt, double* residual) {
    if (c.empty()) throw ValidationError("relax_to_steady: no collapse operators");
    const FockSpace& space = c.front().op.space();
    const int d = space.dim();
    if (rho.rows() != d || rho.cols() != d) throw DimensionError("relax_to_steady: rho has the wrong dimension");
    const SpMat L = liouvillian(FockOperator::from_diagonal(space, CVec::Zero(d)), c);
    const Blocks blocks = mirrored_blocks(L, d);
    const double target = opt.tol * opt.kappa / std::sqrt(static_cast<double>(blocks.sets.size()));

    CMat out = rho;
    std::vector<int> local(L.rows());
    for (int k = 0; k < static_cast<int>(blocks.sets.size()); ++k) {
        if (blocks.mirror[k] < k) continue;
        const auto& set = blocks.sets[k];
        const int n = static_cast<int>(set.size());
        CVec x(n);
        for (int m = 0; m < n; ++m) x(m) = rho(set[m] / d, set[m] % d);
        if (x.norm() == 0.0) continue;
        const Eigen::SparseMatrix<cplx> B = sparse_block(L, set, local);
        Eigen::SparseMatrix<cplx> I(n, n);
        I.setIdentity();
        Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
        double h = opt.h0 / opt.kappa, factored = -1.0, res = (B * x).norm();
        int step = 0;
        while (res > target) {
            if (++step > opt.max_steps)
                throw ConvergenceError("relax_to_steady: residual " + std::to_string(res) + " above target", res);
            if (h != factored) {
                lu.compute(I - h * B);
                if (lu.info() != Eigen::Success) throw ConvergenceError("relax_to_steady: factorization failed", res);
                factored = h;
            }
            x = lu.solve(x);
            res = (B * x).norm();
            h = std::min(2.0 * h, opt.h_max / opt.kappa);
        }
        for (int m = 0; m < n; ++m) {
            const int i = set[m] / d, j = set[m] % d;
            out(i, j) = x(m);
            if (blocks.mirror[k] != k) out(j, i) = std::conj(x(m));
        }
    }
    hermitize(out);
    if (residual) {
        CVec v(static_cast<long>(d) * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) v(static_cast<long>(i) * d + j) = out(i, j);
        *residual = (L * v).norm();
    }
    return out;
}

std::vector<CMat> relax_to_steady(const std::vector<CollapseOp>& c, const std::vector<CMat>& xs,
                                  const RelaxOptions& opt, double* residual) {
    if (c.empty()) throw ValidationError("relax_to_steady: no collapse operators");
    const FockSpace& space = c.front().op.space();
    const int d = space.dim();
    for (const auto& x : xs)
        if (x.rows() != d || x.cols() != d) throw DimensionError("relax_to_steady: input has the wrong dimension");
    const SpMat L = liouvillian(FockOperator::from_diagonal(space, CVec::Zero(d)), c);
    const auto sets = liouvillian_blocks(L);
    const double target = opt.tol * opt.kappa / std::sqrt(static_cast<double>(sets.size()));
    const int m = static_cast<int>(xs.size());

    std::vector<CMat> out = xs;
    std::vector<int> local(L.rows());
    double total = 0.0;
    for (const auto& set : sets) {
        const int n = static_cast<int>(set.size());
        CMat X(n, m);
        for (int r = 0; r < m; ++r)
            for (int k = 0; k < n; ++k) X(k, r) = xs[r](set[k] / d, set[k] % d);
        if (X.norm() == 0.0) continue;
        const Eigen::SparseMatrix<cplx> B = sparse_block(L, set, local);
        Eigen::SparseMatrix<cplx> I(n, n);
        I.setIdentity();
        Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
        double h = opt.h0 / opt.kappa, factored = -1.0, res = CMat(B * X).norm();
        int step = 0;
        while (res > target) {
            if (++step > opt.max_steps)
                throw ConvergenceError("relax_to_steady: residual " + std::to_string(res) + " above target", res);
            if (h != factored) {
                lu.compute(I - h * B);
                if (lu.info() != Eigen::Success) throw ConvergenceError("relax_to_steady: factorization failed", res);
                factored = h;
            }
            X = lu.solve(X);
            res = CMat(B * X).norm();
            h = std::min(2.0 * h, opt.h_max / opt.kappa);
        }
        total += res * res;
        for (int r = 0; r < m; ++r)
            for (int k = 0; k < n; ++k) out[r](set[k] / d, set[k] % d) = X(k, r);
    }
    if (residual) *residual = std::sqrt(total);
    return out;
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi,
                        double asymptote) {
    if (t.size() != y.size()) throw DimensionError("fit_decay_rate: t and y differ in length");
    std::vector<double> xs, ls;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        const double v = y[i] - asymptote;
        if (!(v > 0.0)) throw ValidationError("fit_decay_rate: observable not above its asymptote in the window");
        xs.push_back(t[i]);
        ls.push_back(std::log(v));
    }
    const int n = static_cast<int>(xs.size());
    if (n < 10) throw ValidationError("fit_decay_rate: fewer than 10 samples in the window");
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ls.begin(), ls.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ls[i] - my);
        syy += (ls[i] - my) * (ls[i] - my);
    }
    DecayFit f;
    const double slope = sxy / sxx;
    f.rate = -slope;
    f.intercept = my - slope * mx;
    f.points = n;
    f.r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
    if (f.r2 < 0.95) throw FitQualityError("fit_decay_rate: R^2 = " + std::to_string(f.r2) + " < 0.95", f.r2);
    return f;
}

DecayFit fit_decay_rate(const Trajectory& tr, double t_lo, double t_hi, double asymptote, Observable obs,
                        const std::string& label) {
    if (obs == Observable::Purity) return fit_decay_rate(tr.times, tr.purities, t_lo, t_hi, asymptote);
    const auto it = tr.populations.find(label);
    if (it == tr.populations.end()) throw ValidationError("fit_decay_rate: no population labelled '" + label + "'");
    return fit_decay_rate(tr.times, it->second, t_lo, t_hi, asymptote);
}

int dynamics_truncation(double abs_alpha) {
    return static_cast<int>(std::ceil(abs_alpha * abs_alpha + 6.0 * abs_alpha + 14.0));
}

GammaZResult gamma_z(double E_J, double phi_a, double alpha, double kappa, const GammaZOptions& opt) {
    if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
    const FockSpace s(opt.dim > 0 ? opt.dim : dynamics_truncation(alpha));
    JunctionParams p;
    p.E_J = E_J;
    p.phi_a = phi_a;
    LindbladSpec spec(h_rwa_single(p, s), {{two_photon_dissipator(s, alpha, 1.0), kappa}});
    spec.integrator = Integrator::BlockExpm;
    const auto B = make_cat_basis(s, alpha, 2);
    const FockState plus(s, (B.states[0].amplitudes + B.states[1].amplitudes) / std::sqrt(2.0));
    const auto rho0 = DensityMatrix::from_state(plus);

    spec.t_final = opt.t0 / kappa;
    spec.samples = 20;
    auto tr = evolve(spec, rho0);
    auto fit = fit_decay_rate(tr, spec.t_final / 4, spec.t_final, 0.5);
    double g = fit.rate;
    GammaZResult out;
    out.dim = s.dim();
    for (int it = 0; it < opt.refinements; ++it) {
        if (!(g > 0.0)) throw ConvergenceError("gamma_z: purity does not decay", g);
        spec.t_final = 0.5 / g;
        spec.samples = opt.samples;
        tr = evolve(spec, rho0);
        out.t_lo = 0.1 / g;
        out.t_hi = 0.5 / g;
        fit = fit_decay_rate(tr, out.t_lo * (1 - 1e-12), out.t_hi * (1 + 1e-12), 0.5);
        g = fit.rate;
    }
    out.gamma_z = 0.5 * g;
    out.r2 = fit.r2;
    return out;
}

SweepResult efficiency_curve(double alpha, const std::vector<double>& phi_grid, double epsilon_zeno, double phi_c,
                             double n_c, const GammaZOptions& opt) {
    if (phi_grid.empty()) throw ValidationError("efficiency_curve: empty phi_a grid");
    if (!(epsilon_zeno > 0.0)) throw ValidationError("epsilon_zeno must be positive");
    ReadoutParams r;
    r.phi_c = phi_c;
    r.n_c = n_c;
    r.validate();
    // units of kappa: kappa = 1, E_J = epsilon
    const double E_J = epsilon_zeno;
    std::vector<std::vector<double>> rows(phi_grid.size());
    std::vector<double> r2(phi_grid.size());
    parallel_for(static_cast<int>(phi_grid.size()), [&](int i) {
        const double phi = phi_grid[i];
        const double gm = dispersive_rates_single(E_J, phi, alpha, r).gamma_m;
        const auto gz = gamma_z(E_J, phi, alpha, 1.0, opt);
        rows[i] = {phi, gm / E_J, gz.gamma_z / E_J, gm / (gm + gz.gamma_z)};
        r2[i] = gz.r2;
    });
    SweepResult out;
    out.columns = {"phi_a", "gamma_m_over_EJ", "gamma_z_over_EJ", "eta"};
    for (auto& row : rows) out.add_row(std::move(row));
    out.metadata["integrator"] = integrator_name(Integrator::BlockExpm);
    out.metadata["dim"] = opt.dim > 0 ? opt.dim : dynamics_truncation(alpha);
    out.metadata["fit"] = {{"window", "[0.1, 0.5]/rate"},
                           {"refinements", opt.refinements},
                           {"samples", opt.samples},
                           {"t0_kappa", opt.t0},
                           {"asymptote", 0.5},
                           {"min_r2", *std::min_element(r2.begin(), r2.end())}};
    return out;
}

}  // namespace catqnd
