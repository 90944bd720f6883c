#pragma once

// Independent reference implementations used only by the tests.  Everything
// here is computed by a different route than the library (power series in
// long double, brute-force mirror enumeration, O(n^2) transforms, dense
// Gaussian elimination) so that library results are checked against
// genuinely separate arithmetic.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pszkit/geometry.hpp"

namespace oracle {

using cplxl = std::complex<long double>;
using cplx = std::complex<double>;

// Cylindrical J1 by long-double power series (converges for the test domain).
long double j1_series(long double x);

// First positive root of J1, found by bisection on the series.
long double j1_first_root();

// Spherical Bessel closed forms in long double.
long double sph_j0(long double x);
long double sph_j1(long double x);
long double sph_y0(long double x);
long double sph_y1(long double x);

// Spherical j_n by the ascending power series (accurate for moderate x).
long double sph_jn_series(int n, long double x);

// Legendre P_n via explicit low-order polynomials (n <= 4).
long double legendre_explicit(int n, long double x);

// O(n^2) discrete Fourier transform.
std::vector<cplx> dft(const std::vector<cplx>& x, bool inverse);

// Image-source enumeration by unfolding the room: 1-D images are indexed per
// axis and the reflection count per wall is obtained by counting wall-plane
// crossings of the straight unfolded path, independent of the lattice
// exponent formulas used by the library.  Returns (distance_m, gain) pairs of
// every image up to the order, sorted by distance.
struct Arrival {
  double distance = 0.0;
  double gain = 0.0;  // reflectance product (no 1/(4 pi d))
};
std::vector<Arrival> mirror_arrivals(const pszkit::RoomSpec& room,
                                     const pszkit::Vec3& src,
                                     const pszkit::Vec3& rcv, int max_order);

// Dense complex linear solve by Gaussian elimination with partial pivoting;
// a is row-major n x n.
std::vector<cplx> solve_dense(std::vector<cplx> a, std::vector<cplx> b,
                              std::size_t n);

// Regularized pressure-matching solution for one bin computed from scratch:
// builds the normal equations (H^H H + lambda I) w = H^H d and solves them
// with solve_dense.  h is row-major (rows x cols).
std::vector<cplx> normal_solve(const std::vector<cplx>& h, std::size_t rows,
                               std::size_t cols, const std::vector<cplx>& d,
                               double lambda);

// Rigid-sphere transfer factor via an independent series evaluation in long
// double (own Bessel recursions, Clenshaw-free direct Legendre loop).
cplx rs_hrtf_reference(double k0, double r_src, double r_pt, double cos_gamma,
                       double sphere_radius, int n_terms);

// Full linear convolution.
std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b);

// Deterministic pseudo-random doubles in [-1, 1] (64-bit LCG).
struct Lcg {
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  double next();
};

}  // namespace oracle
