#include "catqnd/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "catqnd/errors.hpp"

namespace catqnd {

namespace {

// e^{-|g|^2/2} g^n / sqrt(n!) for n < dim, no truncation guard
CVec coherent_amplitudes(int dim, cplx g) {
    CVec v(dim);
    const double r = std::abs(g);
    if (r == 0.0) {
        v.setZero();
        v(0) = 1.0;
        return v;
    }
    const double lr = std::log(r), th = std::arg(g);
    for (int n = 0; n < dim; ++n) {
        const double mag = std::exp(-r * r / 2.0 + n * lr - 0.5 * std::lgamma(n + 1.0));
        v(n) = std::polar(mag, n * th);
    }
    return v;
}

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CVec kron(const CVec& a, const CVec& b) {
    CVec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

}  // namespace

FockSpace::FockSpace(int dim) : dims_{dim}, total_(dim) {
    if (dim < 2) throw ValidationError("FockSpace: dim must be >= 2, got " + std::to_string(dim));
}

FockSpace FockSpace::product(const FockSpace& a, const FockSpace& b, long cap) {
    const long total = static_cast<long>(a.dim()) * b.dim();
    if (total > cap)
        throw DimensionError("product dimension " + std::to_string(total) + " exceeds cap " +
                             std::to_string(cap));
    FockSpace s;
    s.dims_ = a.dims_;
    s.dims_.insert(s.dims_.end(), b.dims_.begin(), b.dims_.end());
    s.total_ = static_cast<int>(total);
    return s;
}

void require_same_space(const FockSpace& a, const FockSpace& b, const char* what) {
    if (a != b) throw DimensionError(std::string(what) + ": Fock space mismatch");
}

FockOperator::FockOperator(FockSpace space, CMat matrix) : space_(std::move(space)), dense_(std::move(matrix)) {
    if (dense_->rows() != space_.dim() || dense_->cols() != space_.dim())
        throw DimensionError("FockOperator: matrix shape does not match space");
    if (!dense_->allFinite()) throw DomainError("FockOperator: non-finite entries");
}

FockOperator FockOperator::from_diagonal(FockSpace space, CVec diag) {
    if (diag.size() != space.dim()) throw DimensionError("FockOperator: diagonal length mismatch");
    if (!diag.allFinite()) throw DomainError("FockOperator: non-finite entries");
    FockOperator op(std::move(space));
    op.diag_ = std::move(diag);
    return op;
}

const CVec& FockOperator::diagonal() const {
    if (!diag_) throw Error("FockOperator::diagonal on a dense operator");
    return *diag_;
}

CMat FockOperator::dense() const {
    if (dense_) return *dense_;
    return diag_->asDiagonal();
}

cplx FockOperator::operator()(int i, int j) const {
    if (dense_) return (*dense_)(i, j);
    return i == j ? (*diag_)(i) : cplx(0.0);
}

CVec FockOperator::apply(const CVec& v) const {
    if (v.size() != dim()) throw DimensionError("FockOperator::apply: length mismatch");
    if (diag_) return diag_->cwiseProduct(v);
    return (*dense_) * v;
}

FockOperator FockOperator::adjoint() const {
    if (diag_) return from_diagonal(space_, diag_->conjugate());
    return FockOperator(space_, dense_->adjoint());
}

bool FockOperator::is_hermitian(double tol) const {
    if (diag_) return diag_->imag().cwiseAbs().maxCoeff() <= tol;
    return ((*dense_) - dense_->adjoint()).cwiseAbs().maxCoeff() <= tol;
}

FockOperator operator+(const FockOperator& a, const FockOperator& b) {
    require_same_space(a.space_, b.space_, "operator+");
    if (a.diag_ && b.diag_) return FockOperator::from_diagonal(a.space_, *a.diag_ + *b.diag_);
    return FockOperator(a.space_, a.dense() + b.dense());
}

FockOperator operator-(const FockOperator& a, const FockOperator& b) {
    return a + cplx(-1.0) * b;
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
    require_same_space(a.space_, b.space_, "operator*");
    if (a.diag_ && b.diag_) return FockOperator::from_diagonal(a.space_, a.diag_->cwiseProduct(*b.diag_));
    if (a.diag_) return FockOperator(a.space_, a.diag_->asDiagonal() * (*b.dense_));
    if (b.diag_) return FockOperator(a.space_, (*a.dense_) * b.diag_->asDiagonal());
    return FockOperator(a.space_, (*a.dense_) * (*b.dense_));
}

FockOperator operator*(cplx s, const FockOperator& a) {
    if (a.diag_) return FockOperator::from_diagonal(a.space_, s * (*a.diag_));
    return FockOperator(a.space_, s * (*a.dense_));
}

FockState::FockState(FockSpace s, CVec v) : space(std::move(s)), amplitudes(std::move(v)) {
    if (amplitudes.size() != space.dim()) throw DimensionError("FockState: length mismatch");
}

FockState FockState::normalized() const {
    const double n = norm();
    if (n == 0.0) throw DomainError("FockState::normalized: zero vector");
    return FockState(space, amplitudes / n);
}

cplx FockState::inner(const FockState& other) const {
    require_same_space(space, other.space, "FockState::inner");
    return amplitudes.dot(other.amplitudes);
}

DensityMatrix::DensityMatrix(FockSpace space, CMat matrix) : space_(std::move(space)), m_(std::move(matrix)) {
    if (m_.rows() != space_.dim() || m_.cols() != space_.dim())
        throw DimensionError("DensityMatrix: shape mismatch");
    if (!m_.allFinite()) throw DomainError("DensityMatrix: non-finite entries");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
        throw ValidationError("DensityMatrix: not Hermitian");
    if (std::abs(m_.trace() - cplx(1.0)) > kTraceTol)
        throw ValidationError("DensityMatrix: trace differs from 1");
    Eigen::SelfAdjointEigenSolver<CMat> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPosTol)
        throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
}

DensityMatrix DensityMatrix::from_state(const FockState& psi) {
    const FockState u = psi.normalized();
    return DensityMatrix(u.space, u.amplitudes * u.amplitudes.adjoint());
}

FockOperator identity(const FockSpace& space) {
    return FockOperator::from_diagonal(space, CVec::Ones(space.dim()));
}

FockOperator annihilation(const FockSpace& space, int mode) {
    if (mode < 0 || mode >= space.modes()) throw DimensionError("annihilation: no such mode");
    const int d = space.mode_dim(mode);
    CMat a = CMat::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
    FockOperator single(FockSpace(d), a);
    if (space.modes() == 1) return single;
    return embed(single, space, mode);
}

FockOperator number_operator(const FockSpace& space, int mode) {
    if (mode < 0 || mode >= space.modes()) throw DimensionError("number_operator: no such mode");
    CVec diag(space.dim());
    const int db = space.modes() == 2 ? space.mode_dim(1) : 1;
    for (int i = 0; i < space.dim(); ++i) {
        const int n = (space.modes() == 1) ? i : (mode == 0 ? i / db : i % db);
        diag(i) = double(n);
    }
    return FockOperator::from_diagonal(space, diag);
}

FockOperator displacement(const FockSpace& space, cplx beta) {
    if (space.modes() != 1) throw DimensionError("displacement: single-mode space required");
    const int d = space.dim();
    if (std::norm(beta) > d / 4.0)
        throw TruncationError("displacement: |beta|^2 exceeds dim/4");
    // exponentiate on a padded space so the truncation edge does not leak into the kept block
    const int pad = 2 * d + 10;
    CMat a = CMat::Zero(pad, pad);
    for (int n = 1; n < pad; ++n) a(n - 1, n) = std::sqrt(double(n));
    const CMat gen = beta * a.adjoint() - std::conj(beta) * a;
    const CMat D = gen.exp();
    return FockOperator(space, D.topLeftCorner(d, d));
}

double coherent_norm_deficit(double abs_alpha, int dim) {
    const double x = abs_alpha * abs_alpha;
    if (x == 0.0) return 0.0;
    const double lx = std::log(x);
    double tail = 0.0;
    for (int n = dim;; ++n) {
        const double t = std::exp(-x + n * lx - std::lgamma(n + 1.0));
        tail += t;
        if (n > x && t < 1e-30 * std::max(tail, 1e-300)) break;
        if (n > dim + 100000) break;
    }
    return tail;
}

FockState coherent_state(const FockSpace& space, cplx alpha) {
    if (space.modes() != 1) throw DimensionError("coherent_state: single-mode space required");
    const double deficit = coherent_norm_deficit(std::abs(alpha), space.dim());
    if (deficit > kNormDeficitGuard)
        throw TruncationError("coherent_state: norm deficit " + std::to_string(deficit) + " at dim " +
                              std::to_string(space.dim()));
    return FockState(space, coherent_amplitudes(space.dim(), alpha));
}

FockState cat_state(const FockSpace& space, cplx alpha, int q, int k, double* norm_constant) {
    if (space.modes() != 1) throw DimensionError("cat_state: single-mode space required");
    if (q < 1) throw DomainError("cat_state: q must be >= 1");
    if (k < 0 || k >= q) throw DomainError("cat_state: k out of range [0, q)");
    const double r = std::abs(alpha);
    const double deficit = coherent_norm_deficit(r, space.dim());
    if (deficit > kNormDeficitGuard)
        throw TruncationError("cat_state: norm deficit " + std::to_string(deficit) + " at dim " +
                              std::to_string(space.dim()));
    const CVec c = coherent_amplitudes(space.dim(), alpha);
    CVec v = CVec::Zero(space.dim());
    for (int n = k; n < space.dim(); n += q) v(n) = double(q) * c(n);
    if (v.norm() == 0.0) throw DomainError("cat_state: empty ladder (alpha = 0 with k > 0)");

    // infinite-space ladder weight sum_{n = k mod q} |c_n|^2
    if (norm_constant) {
        double w = 0.0;
        const double x = r * r;
        const int nmax = std::max(space.dim(), static_cast<int>(std::ceil(x + 12.0 * r + 60.0)));
        for (int n = k; n <= nmax; n += q) {
            if (r == 0.0) {
                w += (n == 0) ? 1.0 : 0.0;
                continue;
            }
            w += std::exp(-x + 2.0 * n * std::log(r) - std::lgamma(n + 1.0));
        }
        *norm_constant = 1.0 / (q * std::sqrt(w));
    }
    return FockState(space, v / v.norm());
}

CMat CatBasis::matrix() const {
    CMat m(space.dim(), size());
    for (int j = 0; j < size(); ++j) m.col(j) = states[j].amplitudes;
    return m;
}

CatBasis make_cat_basis(const FockSpace& space, cplx alpha, int q) {
    CatBasis b{space, {alpha}, {q}, {}, {}};
    for (int k = 0; k < q; ++k) {
        double N = 0.0;
        b.states.push_back(cat_state(space, alpha, q, k, &N));
        b.norms.push_back(N);
    }
    return b;
}

CatBasis tensor(const CatBasis& a, const CatBasis& b, long cap) {
    CatBasis out{FockSpace::product(a.space, b.space, cap), a.alphas, a.qs, {}, {}};
    out.alphas.insert(out.alphas.end(), b.alphas.begin(), b.alphas.end());
    out.qs.insert(out.qs.end(), b.qs.begin(), b.qs.end());
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j) {
            out.states.push_back(tensor(a.states[i], b.states[j], cap));
            out.norms.push_back(a.norms[i] * b.norms[j]);
        }
    return out;
}

FockOperator tensor(const FockOperator& a, const FockOperator& b, long cap) {
    FockSpace s = FockSpace::product(a.space(), b.space(), cap);
    if (a.is_diagonal() && b.is_diagonal()) return FockOperator::from_diagonal(s, kron(a.diagonal(), b.diagonal()));
    return FockOperator(s, kron(a.dense(), b.dense()));
}

FockState tensor(const FockState& a, const FockState& b, long cap) {
    return FockState(FockSpace::product(a.space, b.space, cap), kron(a.amplitudes, b.amplitudes));
}

FockOperator embed(const FockOperator& op, const FockSpace& product, int mode) {
    if (product.modes() != 2 || op.space().modes() != 1) throw DimensionError("embed: expects a two-mode space");
    if (op.dim() != product.mode_dim(mode)) throw DimensionError("embed: mode dimension mismatch");
    const FockOperator other = identity(product.mode_space(1 - mode));
    return mode == 0 ? tensor(op, other, product.dim()) : tensor(other, op, product.dim());
}

double husimi_q(const FockState& psi, cplx gamma) {
    const CVec g = coherent_amplitudes(psi.space.dim(), gamma);
    return std::norm(g.dot(psi.amplitudes)) / std::numbers::pi;
}

double husimi_q(const DensityMatrix& rho, cplx gamma) {
    const CVec g = coherent_amplitudes(rho.space().dim(), gamma);
    return (g.dot(rho.matrix() * g)).real() / std::numbers::pi;
}

Eigen::MatrixXd husimi_grid(const CMat& rho, const std::vector<double>& xs, const std::vector<double>& ys) {
    const int d = static_cast<int>(rho.rows());
    const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
    Eigen::MatrixXd Q(ny, nx);
    CMat G(d, nx);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) G.col(ix) = coherent_amplitudes(d, {xs[ix], ys[iy]});
        const CMat RG = rho * G;
        for (int ix = 0; ix < nx; ++ix) Q(iy, ix) = G.col(ix).dot(RG.col(ix)).real() / std::numbers::pi;
    }
    return Q;
}

std::vector<double> default_husimi_axis(double alpha_max, int points) {
    std::vector<double> ax(points);
    const double lo = -1.5 * alpha_max, hi = 1.5 * alpha_max;
    for (int i = 0; i < points; ++i) ax[i] = lo + (hi - lo) * i / (points - 1);
    return ax;
}

double purity(const DensityMatrix& rho) {
    return rho.matrix().cwiseAbs2().sum();
}

int default_truncation(double abs_alpha) {
    return static_cast<int>(std::ceil(abs_alpha * abs_alpha + 8.0 * abs_alpha + 20.0));
}

}  // namespace catqnd
