#include "pszkit/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pszkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// J1 power series: (x/2) * sum_k (-1)^k (x^2/4)^k / (k! (k+1)!).
double j1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 0.5 * x;
  double sum = term;
  for (int k = 1; k < 64; ++k) {
    term *= -q / (static_cast<double>(k) * (k + 1.0));
    sum += term;
    if (std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
  }
  return sum;
}

// J1 Hankel asymptotic expansion:
//   J1(x) ~ sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)),  chi = x - 3 pi/4,
// with a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! 8^k x^k), mu = 4,
// P = a_0 - a_2 + a_4 - ...,  Q = a_1 - a_3 + ...  Truncated at the
// smallest term (optimal truncation), ample for x >= 12.
double j1_asymptotic(double x) {
  const double mu = 4.0;
  double a = 1.0;  // a_k including the x^-k factor
  double p = 0.0, q = 0.0;
  for (int k = 0; k < 40; ++k) {
    switch (k % 4) {
      case 0: p += a; break;
      case 1: q += a; break;
      case 2: p -= a; break;
      default: q -= a; break;
    }
    const double odd = 2.0 * k + 1.0;
    const double next = a * (mu - odd * odd) / (8.0 * (k + 1.0) * x);
    if (std::fabs(next) >= std::fabs(a)) break;
    a = next;
  }
  const double chi = x - 0.75 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// j_0, j_1 with series fallback near zero where the closed forms cancel.
double sph_j0(double x) {
  if (x < 1e-3) return 1.0 - x * x / 6.0 * (1.0 - x * x / 20.0);
  return std::sin(x) / x;
}

double sph_j1(double x) {
  if (x < 0.5) {
    // x/3 * [1 - (x^2/2)/5 + (x^2/2)^2/(2*5*7) - ...]
    const double h = 0.5 * x * x;
    double term = x / 3.0;
    double sum = term;
    for (int k = 1; k < 24; ++k) {
      term *= -h / (static_cast<double>(k) * (2.0 * k + 3.0));
      sum += term;
      if (std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
    }
    return sum;
  }
  return std::sin(x) / (x * x) - std::cos(x) / x;
}

// Fill j_0..j_order by Miller's downward recurrence, normalizing against
// whichever of j_0, j_1 has the larger magnitude (one of them is always
// O(1/x) or larger).  Rescales on overflow so arbitrarily steep decay of
// j_n below the turning point is handled.
void fill_j_downward(int order, double x, std::vector<double>& out) {
  const double kBig = 1e250;
  const double kSmall = 1e-250;
  const int start =
      order + static_cast<int>(std::sqrt(40.0 * (order + 1))) + 14;
  double fp = 0.0;    // f_{n+1}
  double fc = 1e-30;  // f_n, arbitrary seed at n = start
  double f0 = 0.0, f1 = 0.0;
  for (int n = start; n >= 1; --n) {
    const double fm = (2.0 * n + 1.0) / x * fc - fp;  // f_{n-1}
    fp = fc;
    fc = fm;
    const int idx = n - 1;
    if (idx <= order) out[idx] = fc;
    if (idx == 1) f1 = fc;
    if (idx == 0) f0 = fc;
    if (std::fabs(fc) > kBig) {
      fc *= kSmall;
      fp *= kSmall;
      f0 *= kSmall;
      f1 *= kSmall;
      for (double& v : out) v *= kSmall;
    }
  }
  // Normalize against whichever closed-form anchor is better conditioned.
  const double j0 = sph_j0(x);
  const double j1v = sph_j1(x);
  const double scale = (std::fabs(f0) >= std::fabs(f1)) ? j0 / f0 : j1v / f1;
  for (double& v : out) v *= scale;
  out[0] = j0;
  if (order >= 1) out[1] = j1v;
}

}  // namespace

double bessel_j1(double x) {
  if (std::isnan(x)) throw std::invalid_argument("bessel_j1: NaN argument");
  const double ax = std::fabs(x);
  const double r = (ax < 12.0) ? j1_series(ax) : j1_asymptotic(ax);
  return (x < 0.0) ? -r : r;  // J1 is odd
}

SphBesselTable sph_bessel_table(int order, double x) {
  if (order < 0) throw std::invalid_argument("sph_bessel_table: order < 0");
  if (!(x > 0.0))
    throw std::invalid_argument("sph_bessel_table: requires x > 0, got x=" +
                                std::to_string(x));
  SphBesselTable t;
  t.j.resize(order + 1);
  t.y.resize(order + 1);

  // y_n: upward recurrence is stable for the irregular solution.
  t.y[0] = -std::cos(x) / x;
  if (order >= 1) t.y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int n = 2; n <= order; ++n) {
    t.y[n] = (2.0 * n - 1.0) / x * t.y[n - 1] - t.y[n - 2];
    if (!std::isfinite(t.y[n])) {
      // Beyond double range: saturate with the correct sign; callers that
      // truncate adaptively never reach this regime.
      for (int m = n; m <= order; ++m)
        t.y[m] = (t.y[n - 1] < 0.0) ? -HUGE_VAL : HUGE_VAL;
      break;
    }
  }

  // j_n: upward recurrence is stable while n < x; otherwise Miller downward.
  if (static_cast<double>(order) <= x) {
    t.j[0] = sph_j0(x);
    if (order >= 1) t.j[1] = sph_j1(x);
    for (int n = 2; n <= order; ++n)
      t.j[n] = (2.0 * n - 1.0) / x * t.j[n - 1] - t.j[n - 2];
  } else {
    fill_j_downward(order, x, t.j);
  }
  return t;
}

double spherical_bessel_j(int n, double x) {
  if (n < 0) throw std::invalid_argument("spherical_bessel_j: n < 0");
  if (x == 0.0) return (n == 0) ? 1.0 : 0.0;
  if (!(x > 0.0))
    throw std::invalid_argument("spherical_bessel_j: requires x >= 0");
  return sph_bessel_table(n, x).j[n];
}

double spherical_bessel_y(int n, double x) {
  if (n < 0) throw std::invalid_argument("spherical_bessel_y: n < 0");
  if (!(x > 0.0))
    throw std::invalid_argument("spherical_bessel_y: requires x > 0");
  return sph_bessel_table(n, x).y[n];
}

cplx spherical_hankel1(int n, double x) {
  const SphBesselTable t = sph_bessel_table(n, x);
  return {t.j[n], t.y[n]};
}

double sph_bessel_j_deriv(const SphBesselTable& t, int n, double x) {
  if (n == 0) return -t.j[1];
  return t.j[n - 1] - (n + 1.0) / x * t.j[n];
}

cplx sph_hankel1_deriv(const SphBesselTable& t, int n, double x) {
  const cplx hm = (n == 0) ? cplx(t.j[1], t.y[1]) : cplx(t.j[n - 1], t.y[n - 1]);
  if (n == 0) return -hm;
  const cplx hn(t.j[n], t.y[n]);
  return hm - (n + 1.0) / x * hn;
}

double legendre_p(int n, double x) {
  if (n < 0) throw std::invalid_argument("legendre_p: n < 0");
  if (std::fabs(x) > 1.0 + 1e-12)
    throw std::invalid_argument("legendre_p: |x| > 1, got x=" +
                                std::to_string(x));
  if (x > 1.0) x = 1.0;
  if (x < -1.0) x = -1.0;
  if (n == 0) return 1.0;
  double pm = 1.0;  // P_0
  double pc = x;    // P_1
  for (int m = 2; m <= n; ++m) {
    const double pn = ((2.0 * m - 1.0) * x * pc - (m - 1.0) * pm) / m;
    pm = pc;
    pc = pn;
  }
  return pc;
}

cplx rigid_sphere_alpha(int n, double x) {
  if (n < 0) throw std::invalid_argument("rigid_sphere_alpha: n < 0");
  if (!(x > 0.0))
    throw std::invalid_argument("rigid_sphere_alpha: requires x > 0");
  const SphBesselTable t = sph_bessel_table(n + 1, x);
  const double jd = sph_bessel_j_deriv(t, n, x);
  const cplx hd = sph_hankel1_deriv(t, n, x);
  return jd / hd;
}

}  // namespace pszkit
