#include "catqnd/specfun.hpp"

#include <cmath>
#include <numbers>

#include "catqnd/errors.hpp"

namespace catqnd {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite argument");
}

void require_order(int n, const char* what) {
    if (n < 0) throw DomainError(std::string(what) + ": negative order");
}

constexpr double kOverflowArg = 700.0;
constexpr double kSeriesMaxReal = 30.0;
constexpr double kSeriesMaxComplex = 17.0;

// sum_k (z^2/4)^k / (k!)^2 in extended precision
std::complex<long double> i0_series(std::complex<long double> z) {
    const std::complex<long double> q = z * z / 4.0L;
    std::complex<long double> term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 1000; ++k) {
        term *= q / static_cast<long double>(k * k);
        sum += term;
        if (std::abs(term) <= 1e-19L * std::abs(sum) && std::abs(term) <= 1e-19L) break;
    }
    return sum;
}

// Hankel series sum_k c_k / z^k with c_k = ((2k-1)!!)^2 / (k! 8^k), sign s on odd k,
// cut at the smallest term.
std::complex<double> hankel_sum(std::complex<double> z, double s) {
    std::complex<double> sum = 1.0, term = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 400; ++k) {
        const double num = (2.0 * k - 1.0) * (2.0 * k - 1.0);
        std::complex<double> next = term * (s * num / (8.0 * k)) / z;
        if (std::abs(next) >= prev) break;
        term = next;
        prev = std::abs(term);
        sum += term;
        if (prev < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

std::vector<double> laguerre_all(int n_max, double x) {
    require_order(n_max, "laguerre_all");
    require_finite(x, "laguerre_all");
    std::vector<double> L(n_max + 1);
    L[0] = 1.0;
    if (n_max >= 1) L[1] = 1.0 - x;
    for (int n = 1; n < n_max; ++n)
        L[n + 1] = ((2.0 * n + 1.0 - x) * L[n] - n * L[n - 1]) / (n + 1.0);
    return L;
}

std::vector<double> laguerre_all_scaled(int n_max, double x) {
    require_order(n_max, "laguerre_all_scaled");
    require_finite(x, "laguerre_all_scaled");
    std::vector<double> L(n_max + 1);
    const double s = std::exp(-x / 2.0);
    L[0] = s;
    if (n_max >= 1) L[1] = s * (1.0 - x);
    for (int n = 1; n < n_max; ++n)
        L[n + 1] = ((2.0 * n + 1.0 - x) * L[n] - n * L[n - 1]) / (n + 1.0);
    return L;
}

std::vector<double> laguerre_generalized_all(int n_max, int l, double x) {
    require_order(n_max, "laguerre_generalized");
    require_order(l, "laguerre_generalized");
    require_finite(x, "laguerre_generalized");
    std::vector<double> L(n_max + 1);
    L[0] = 1.0;
    if (n_max >= 1) L[1] = 1.0 + l - x;
    for (int n = 1; n < n_max; ++n)
        L[n + 1] = ((2.0 * n + 1.0 + l - x) * L[n] - (n + l) * L[n - 1]) / (n + 1.0);
    return L;
}

double laguerre_generalized(int n, int l, double x) {
    return laguerre_generalized_all(n, l, x)[n];
}

std::vector<double> dressing_diagonal(int n_max, int l, double phi) {
    require_order(n_max, "dressing_diagonal");
    require_order(l, "dressing_diagonal");
    require_finite(phi, "dressing_diagonal");
    const double x = phi * phi;
    std::vector<double> a(n_max + 1, 0.0);
    if (phi == 0.0 && l > 0) return a;
    const double lphi = (l == 0) ? 0.0 : l * std::log(std::abs(phi));
    const double sgn = (phi < 0.0 && l % 2 == 1) ? -1.0 : 1.0;
    a[0] = sgn * std::exp(lphi - x / 2.0 - std::lgamma(l + 1.0));
    if (n_max >= 1) a[1] = a[0] * (1.0 + l - x) / (l + 1.0);
    for (int n = 1; n < n_max; ++n)
        a[n + 1] = ((2.0 * n + 1.0 + l - x) * a[n] - n * a[n - 1]) / (n + l + 1.0);
    return a;
}

std::vector<double> displacement_element_magnitudes(int n_max, int l, double phi) {
    require_order(n_max, "displacement_element_magnitudes");
    require_order(l, "displacement_element_magnitudes");
    require_finite(phi, "displacement_element_magnitudes");
    const double x = phi * phi;
    std::vector<double> b(n_max + 1, 0.0);
    if (phi == 0.0 && l > 0) return b;
    const double lphi = (l == 0) ? 0.0 : l * std::log(std::abs(phi));
    const double sgn = (phi < 0.0 && l % 2 == 1) ? -1.0 : 1.0;
    b[0] = sgn * std::exp(lphi - x / 2.0 - 0.5 * std::lgamma(l + 1.0));
    if (n_max >= 1) b[1] = b[0] * (1.0 + l - x) / std::sqrt(l + 1.0);
    for (int n = 1; n < n_max; ++n)
        b[n + 1] = ((2.0 * n + 1.0 + l - x) * b[n] - std::sqrt(double(n) * (n + l)) * b[n - 1]) /
                   std::sqrt((n + 1.0) * (n + l + 1.0));
    return b;
}

double bessel_j0(double x) {
    require_finite(x, "bessel_j0");
    return std::cyl_bessel_j(0.0, std::abs(x));
}

double bessel_i0_scaled_series(double x) {
    require_finite(x, "bessel_i0");
    const long double ax = std::abs(x);
    return static_cast<double>(std::exp(-ax) * i0_series({ax, 0.0L}).real());
}

double bessel_i0_scaled_asymptotic(double x) {
    require_finite(x, "bessel_i0");
    const double ax = std::abs(x);
    if (ax == 0.0) throw DomainError("bessel_i0_scaled_asymptotic: zero argument");
    return hankel_sum({ax, 0.0}, 1.0).real() / std::sqrt(2.0 * std::numbers::pi * ax);
}

double bessel_i0_scaled(double x) {
    require_finite(x, "bessel_i0");
    return std::abs(x) <= kSeriesMaxReal ? bessel_i0_scaled_series(x)
                                         : bessel_i0_scaled_asymptotic(x);
}

double bessel_i0(double x) {
    require_finite(x, "bessel_i0");
    if (std::abs(x) > kOverflowArg)
        throw RangeError("bessel_i0: |x| too large for the unscaled value, use bessel_i0_scaled");
    return std::exp(std::abs(x)) * bessel_i0_scaled(x);
}

std::complex<double> bessel_i0_complex_scaled(std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("bessel_i0_complex: non-finite argument");
    // I_0 is even: work in Re z >= 0.
    if (z.real() < 0.0) z = -z;
    if (std::abs(z) <= kSeriesMaxComplex) {
        const std::complex<long double> zl(z.real(), z.imag());
        const auto v = std::exp(-zl.real()) * i0_series(zl);
        return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
    }
    const double pi = std::numbers::pi;
    const std::complex<double> root = std::sqrt(2.0 * pi * z);
    const std::complex<double> i(0.0, 1.0);
    const double side = (z.imag() >= 0.0) ? 1.0 : -1.0;
    // e^{-Re z} [e^{z} S_+ +/- i e^{-z} S_-] / sqrt(2 pi z)
    const std::complex<double> grow = std::exp(i * z.imag()) * hankel_sum(z, 1.0);
    const std::complex<double> decay =
        side * i * std::exp(-2.0 * z.real()) * std::exp(-i * z.imag()) * hankel_sum(z, -1.0);
    return (grow + decay) / root;
}

std::complex<double> bessel_i0_complex(std::complex<double> z) {
    if (std::abs(z.real()) > kOverflowArg)
        throw RangeError("bessel_i0_complex: |Re z| too large for the unscaled value");
    return std::exp(std::abs(z.real())) * bessel_i0_complex_scaled(z);
}

double i0_asymptotic_remainder(double y) {
    if (!(y > 0.0)) throw DomainError("i0_asymptotic_remainder: y must be > 0");
    const double F = std::sqrt(2.0 * std::numbers::pi * y) * bessel_i0_scaled(y) - 1.0;
    if (y >= 8.0 && !(std::abs(F) < i0_remainder_bound(y)))
        throw Error("i0_asymptotic_remainder: bound violated at y=" + std::to_string(y));
    return F;
}

double i0_remainder_bound(double y) { return 1.0 / (4.0 * y); }

}  // namespace catqnd
