#pragma once

#include <complex>
#include <vector>

namespace catqnd {

// Laguerre polynomials L_0(x)..L_nmax(x) by the upward three-term recurrence.
std::vector<double> laguerre_all(int n_max, double x);

// e^{-x/2} L_n(x) for n = 0..n_max. Same recurrence, seeded with scaled values,
// so it stays finite for x in the hundreds where L_n itself overflows.
std::vector<double> laguerre_all_scaled(int n_max, double x);

// Generalized Laguerre L_n^{(l)}(x).
double laguerre_generalized(int n, int l, double x);
std::vector<double> laguerre_generalized_all(int n_max, int l, double x);

// A(l)_n = phi^l e^{-phi^2/2} n!/(n+l)! L_n^{(l)}(phi^2), n = 0..n_max.
std::vector<double> dressing_diagonal(int n_max, int l, double phi);

// b_n = phi^l e^{-phi^2/2} sqrt(n!/(n+l)!) L_n^{(l)}(phi^2), n = 0..n_max.
// |b_n| = |<n|D(phi)|n+l>|, hence |b_n| <= 1.
std::vector<double> displacement_element_magnitudes(int n_max, int l, double phi);

double bessel_j0(double x);

// Unscaled I_0; throws RangeError once e^{|x|} would overflow.
double bessel_i0(double x);
// e^{-|x|} I_0(x).
double bessel_i0_scaled(double x);
// Both branches of the scaled evaluation, exposed for cross-checking.
double bessel_i0_scaled_series(double x);
double bessel_i0_scaled_asymptotic(double x);

std::complex<double> bessel_i0_complex(std::complex<double> z);
// e^{-|Re z|} I_0(z).
std::complex<double> bessel_i0_complex_scaled(std::complex<double> z);

// F(y) = sqrt(2 pi y) e^{-y} I_0(y) - 1, y > 0.
double i0_asymptotic_remainder(double y);
// Bound on |F(y)| that holds for y >= 8.
double i0_remainder_bound(double y);

}  // namespace catqnd
