#pragma once

// Special functions for the spherical-scattering acoustic model: cylindrical
// J1, spherical Bessel/Hankel functions with stable recurrences, Legendre
// polynomials, and the rigid-sphere reflection coefficient.

#include <complex>
#include <vector>

namespace pszkit {

using cplx = std::complex<double>;

// Truncation control for the scattering series.
struct SeriesControl {
  int max_order = 80;      // hard cap on the summation order
  double term_tol = 1e-9;  // stop once terms are this small relative to the
                           // accumulated magnitude (two in a row)
};

// Cylindrical Bessel function of the first kind, order 1.  Power series for
// small |x|, Hankel asymptotic expansion for large |x|.
double bessel_j1(double x);

// Spherical Bessel functions of the first (j_n) and second (y_n) kind.
// j_n uses upward recurrence in the oscillatory regime and Miller's
// downward recurrence (normalized against j_0/j_1) otherwise, so it stays
// accurate — and free of overflow — for n up to ~200 at small arguments.
// y_n always recurses upward (stable direction for the irregular solution).
double spherical_bessel_j(int n, double x);
double spherical_bessel_y(int n, double x);

// Spherical Hankel function of the first kind, h_n = j_n + i y_n.
cplx spherical_hankel1(int n, double x);

// One stable pass producing j_0..j_order and y_0..y_order at x > 0.
struct SphBesselTable {
  std::vector<double> j;
  std::vector<double> y;
};
SphBesselTable sph_bessel_table(int order, double x);

// Derivative via the recurrence f'_n = f_{n-1} - (n+1)/x * f_n (f: j or h);
// f'_0 = -f_1.  Table must extend to at least order n (n >= 1 uses n-1, n).
double sph_bessel_j_deriv(const SphBesselTable& t, int n, double x);
cplx sph_hankel1_deriv(const SphBesselTable& t, int n, double x);

// Legendre polynomial P_n(x), |x| <= 1, by Bonnet's recurrence.
double legendre_p(int n, double x);

// Rigid-sphere reflection coefficient alpha_n(x) = j'_n(x) / h1'_n(x).
// Satisfies |alpha_n| <= 1 for all n, x > 0.
cplx rigid_sphere_alpha(int n, double x);

}  // namespace pszkit
