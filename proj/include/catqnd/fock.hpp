#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

namespace catqnd {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr long kDefaultProductCap = 16384;

// Truncated Fock space of one mode, or a product of two modes with mode a the
// slowest index: |n_a, n_b> sits at n_a * dim_b + n_b.
class FockSpace {
public:
    explicit FockSpace(int dim);
    static FockSpace product(const FockSpace& a, const FockSpace& b, long cap = kDefaultProductCap);

    int dim() const { return total_; }
    int modes() const { return static_cast<int>(dims_.size()); }
    int mode_dim(int k) const { return dims_.at(k); }
    const std::vector<int>& mode_dims() const { return dims_; }
    FockSpace mode_space(int k) const { return FockSpace(dims_.at(k)); }

    bool operator==(const FockSpace& o) const { return dims_ == o.dims_; }
    bool operator!=(const FockSpace& o) const { return !(*this == o); }

private:
    FockSpace() = default;
    std::vector<int> dims_;
    int total_ = 0;
};

void require_same_space(const FockSpace& a, const FockSpace& b, const char* what);

// Operator on a FockSpace. Stored either dense or, for operators that are
// diagonal in the Fock basis by construction, as their diagonal only.
class FockOperator {
public:
    FockOperator(FockSpace space, CMat matrix);
    static FockOperator from_diagonal(FockSpace space, CVec diag);

    const FockSpace& space() const { return space_; }
    int dim() const { return space_.dim(); }
    bool is_diagonal() const { return diag_.has_value(); }
    const CVec& diagonal() const;  // requires is_diagonal()
    CMat dense() const;
    cplx operator()(int i, int j) const;

    CVec apply(const CVec& v) const;
    FockOperator adjoint() const;
    bool is_hermitian(double tol = 1e-10) const;

    friend FockOperator operator+(const FockOperator& a, const FockOperator& b);
    friend FockOperator operator-(const FockOperator& a, const FockOperator& b);
    friend FockOperator operator*(const FockOperator& a, const FockOperator& b);
    friend FockOperator operator*(cplx s, const FockOperator& a);

private:
    FockSpace space_;
    std::optional<CMat> dense_;
    std::optional<CVec> diag_;
    FockOperator(FockSpace space) : space_(std::move(space)) {}
};

struct FockState {
    FockState(FockSpace s, CVec v);
    FockSpace space;
    CVec amplitudes;

    double norm() const { return amplitudes.norm(); }
    FockState normalized() const;
    cplx inner(const FockState& other) const;  // <this|other>
};

// Hermitian, unit-trace, positive semidefinite; checked at construction.
class DensityMatrix {
public:
    DensityMatrix(FockSpace space, CMat matrix);
    static DensityMatrix from_state(const FockState& psi);

    const FockSpace& space() const { return space_; }
    const CMat& matrix() const { return m_; }
    cplx trace() const { return m_.trace(); }

    static constexpr double kHermTol = 1e-10;
    static constexpr double kTraceTol = 1e-8;
    static constexpr double kPosTol = 1e-8;

private:
    FockSpace space_;
    CMat m_;
};

FockOperator identity(const FockSpace& space);
// Annihilation operator of mode `mode` (0 = a, 1 = b).
FockOperator annihilation(const FockSpace& space, int mode = 0);
FockOperator number_operator(const FockSpace& space, int mode = 0);

// D(beta) = exp(beta a^dag - beta^* a), single mode. Guard |beta|^2 <= dim/4.
FockOperator displacement(const FockSpace& space, cplx beta);

// 1 - sum_{n<dim} e^{-|alpha|^2} |alpha|^{2n}/n!
double coherent_norm_deficit(double abs_alpha, int dim);
inline constexpr double kNormDeficitGuard = 1e-10;

// Truncated coherent state; TruncationError when the deficit exceeds 1e-10.
FockState coherent_state(const FockSpace& space, cplx alpha);

// |C_alpha^{(k mod q)}> = N_k sum_p e^{-2 i pi p k/q} |alpha e^{2 i pi p/q}>, renormalized
// on the truncated space. norm_constant receives N_k (infinite-space value).
FockState cat_state(const FockSpace& space, cplx alpha, int q, int k, double* norm_constant = nullptr);

// Ordered orthonormal cat basis spanning M(q, alpha); for q = 2, index 0 is C^+ and 1 is C^-.
// Product bases (two modes) index as k_a * q_b + k_b.
struct CatBasis {
    FockSpace space;
    std::vector<cplx> alphas;
    std::vector<int> qs;
    std::vector<FockState> states;
    std::vector<double> norms;  // N_k per state (product of mode constants)

    int size() const { return static_cast<int>(states.size()); }
    CMat matrix() const;  // columns are the basis vectors
};

CatBasis make_cat_basis(const FockSpace& space, cplx alpha, int q);
CatBasis tensor(const CatBasis& a, const CatBasis& b, long cap = kDefaultProductCap);

FockOperator tensor(const FockOperator& a, const FockOperator& b, long cap = kDefaultProductCap);
FockState tensor(const FockState& a, const FockState& b, long cap = kDefaultProductCap);

// Embed a single-mode operator as acting on mode `mode` of a two-mode space.
FockOperator embed(const FockOperator& op, const FockSpace& product, int mode);

// Q(gamma) = <gamma|rho|gamma>/pi with |gamma> expanded on the truncated basis.
double husimi_q(const FockState& psi, cplx gamma);
double husimi_q(const DensityMatrix& rho, cplx gamma);
// Q on the grid xs (real parts) x ys (imag parts); result(iy, ix).
Eigen::MatrixXd husimi_grid(const CMat& rho, const std::vector<double>& xs, const std::vector<double>& ys);
// 201 points spanning [-1.5 amax, 1.5 amax].
std::vector<double> default_husimi_axis(double alpha_max, int points = 201);

double purity(const DensityMatrix& rho);

// ceil(|alpha|^2 + 8|alpha| + 20)
int default_truncation(double abs_alpha);

}  // namespace catqnd
