#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {
constexpr long double kPiL = 3.141592653589793238462643383279503L;
}

long double j1_series(long double x) {
  const long double q = 0.25L * x * x;
  long double term = 0.5L * x;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<long double>(k) * (k + 1.0L));
    sum += term;
    if (std::fabs(term) <= 1e-24L * std::fabs(sum)) break;
  }
  return sum;
}

long double j1_first_root() {
  long double lo = 3.5L, hi = 4.2L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if ((j1_series(lo) > 0.0L) == (j1_series(mid) > 0.0L))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5L * (lo + hi);
}

long double sph_j0(long double x) { return std::sin(x) / x; }

long double sph_j1(long double x) {
  return std::sin(x) / (x * x) - std::cos(x) / x;
}

long double sph_y0(long double x) { return -std::cos(x) / x; }

long double sph_y1(long double x) {
  return -std::cos(x) / (x * x) - std::sin(x) / x;
}

long double sph_jn_series(int n, long double x) {
  long double pref = 1.0L;
  for (int i = 1; i <= n; ++i) pref *= x / (2.0L * i + 1.0L);
  long double term = pref;
  long double sum = term;
  const long double h = 0.5L * x * x;
  for (int k = 1; k < 200; ++k) {
    term *= -h / (static_cast<long double>(k) * (2.0L * (n + k) + 1.0L));
    sum += term;
    if (std::fabs(term) <= 1e-24L * std::fabs(sum)) break;
  }
  return sum;
}

long double legendre_explicit(int n, long double x) {
  switch (n) {
    case 0: return 1.0L;
    case 1: return x;
    case 2: return 0.5L * (3.0L * x * x - 1.0L);
    case 3: return 0.5L * (5.0L * x * x * x - 3.0L * x);
    case 4:
      return 0.125L * (35.0L * x * x * x * x - 30.0L * x * x + 3.0L);
    default:
      throw std::invalid_argument("legendre_explicit: n > 4");
  }
}

std::vector<cplx> dft(const std::vector<cplx>& x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n, cplx(0.0, 0.0));
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t m = 0; m < n; ++m) {
      const double ang = sign * 2.0 * static_cast<double>(kPiL) *
                         static_cast<double>(k) * static_cast<double>(m) /
                         static_cast<double>(n);
      out[k] += x[m] * cplx(std::cos(ang), std::sin(ang));
    }
    if (inverse) out[k] /= static_cast<double>(n);
  }
  return out;
}

std::vector<Arrival> mirror_arrivals(const pszkit::RoomSpec& room,
                                     const pszkit::Vec3& src,
                                     const pszkit::Vec3& rcv, int max_order) {
  const double dims[3] = {room.dimensions.x, room.dimensions.y,
                          room.dimensions.z};
  const double s[3] = {src.x, src.y, src.z};
  const double r[3] = {rcv.x, rcv.y, rcv.z};
  const int reach = max_order + 1;

  // 1-D image position along one axis for integer index i: even i is a pure
  // translation, odd i a reflection.
  auto image_pos = [](double coord, double len, int i) {
    if (i % 2 == 0) return coord + i * len;
    return -coord + (i + 1) * len;
  };
  // Count wall-plane crossings of the unfolded straight path; planes at
  // j * len, even j being copies of the lower wall, odd j the upper.
  auto crossings = [](double a, double b, double len, int& lower, int& upper) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    const long long j_lo =
        static_cast<long long>(std::floor(lo / len)) + 1;
    const long long j_hi =
        static_cast<long long>(std::ceil(hi / len)) - 1;
    for (long long j = j_lo; j <= j_hi; ++j) {
      if (((j % 2) + 2) % 2 == 0)
        ++lower;
      else
        ++upper;
    }
  };

  std::vector<Arrival> arrivals;
  for (int ix = -reach; ix <= reach; ++ix)
    for (int iy = -reach; iy <= reach; ++iy)
      for (int iz = -reach; iz <= reach; ++iz) {
        const double pos[3] = {image_pos(s[0], dims[0], ix),
                               image_pos(s[1], dims[1], iy),
                               image_pos(s[2], dims[2], iz)};
        int hits[6] = {0, 0, 0, 0, 0, 0};
        for (int axis = 0; axis < 3; ++axis)
          crossings(pos[axis], r[axis], dims[axis], hits[2 * axis],
                    hits[2 * axis + 1]);
        const int order =
            hits[0] + hits[1] + hits[2] + hits[3] + hits[4] + hits[5];
        if (order > max_order) continue;
        double gain = 1.0;
        for (int w = 0; w < 6; ++w)
          for (int h = 0; h < hits[w]; ++h) gain *= room.reflectance[w];
        const double dx = pos[0] - r[0];
        const double dy = pos[1] - r[1];
        const double dz = pos[2] - r[2];
        arrivals.push_back(
            {std::sqrt(dx * dx + dy * dy + dz * dz), gain});
      }
  std::sort(arrivals.begin(), arrivals.end(),
            [](const Arrival& a, const Arrival& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              return a.gain < b.gain;
            });
  return arrivals;
}

std::vector<cplx> solve_dense(std::vector<cplx> a, std::vector<cplx> b,
                              std::size_t n) {
  if (a.size() != n * n || b.size() != n)
    throw std::invalid_argument("solve_dense: shape mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::abs(a[row * n + col]) > std::abs(a[piv * n + col])) piv = row;
    if (std::abs(a[piv * n + col]) == 0.0)
      throw std::runtime_error("solve_dense: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(a[piv * n + j], a[col * n + j]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t row = col + 1; row < n; ++row) {
      const cplx f = a[row * n + col] / a[col * n + col];
      a[row * n + col] = 0.0;
      for (std::size_t j = col + 1; j < n; ++j)
        a[row * n + j] -= f * a[col * n + j];
      b[row] -= f * b[col];
    }
  }
  std::vector<cplx> x(n);
  for (std::size_t i = n; i-- > 0;) {
    cplx acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i * n + j] * x[j];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

std::vector<cplx> normal_solve(const std::vector<cplx>& h, std::size_t rows,
                               std::size_t cols, const std::vector<cplx>& d,
                               double lambda) {
  if (h.size() != rows * cols || d.size() != rows)
    throw std::invalid_argument("normal_solve: shape mismatch");
  std::vector<cplx> a(cols * cols, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      cplx acc(0.0, 0.0);
      for (std::size_t r = 0; r < rows; ++r)
        acc += std::conj(h[r * cols + i]) * h[r * cols + j];
      if (i == j) acc += lambda;
      a[i * cols + j] = acc;
    }
  std::vector<cplx> b(cols, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t r = 0; r < rows; ++r)
      b[i] += std::conj(h[r * cols + i]) * d[r];
  return solve_dense(std::move(a), std::move(b), cols);
}

cplx rs_hrtf_reference(double k0, double r_src, double r_pt, double cos_gamma,
                       double sphere_radius, int n_terms) {
  using std::sin;
  using std::cos;
  const long double xs = static_cast<long double>(k0) * r_src;
  const long double xp = static_cast<long double>(k0) * r_pt;
  const long double xr = static_cast<long double>(k0) * sphere_radius;
  const int top = n_terms + 1;

  // y_n upward from closed forms; j_n by Miller's recurrence normalized with
  // the identity sum_n (2n+1) j_n(x)^2 = 1 (a different anchor than the
  // library uses).
  auto fill = [top](long double x, std::vector<long double>& j,
                    std::vector<long double>& y) {
    j.assign(top + 1, 0.0L);
    y.assign(top + 1, 0.0L);
    y[0] = sph_y0(x);
    y[1] = sph_y1(x);
    for (int n = 2; n <= top; ++n)
      y[n] = (2.0L * n - 1.0L) / x * y[n - 1] - y[n - 2];
    const int start = std::max(top, static_cast<int>(std::ceil(x))) + 60;
    long double fp = 0.0L, fc = 1e-30L;
    std::vector<long double> raw(top + 1, 0.0L);
    long double norm = (2.0L * start + 1.0L) * fc * fc;
    for (int n = start; n >= 1; --n) {
      const long double fm = (2.0L * n + 1.0L) / x * fc - fp;
      fp = fc;
      fc = fm;
      norm += (2.0L * (n - 1) + 1.0L) * fc * fc;
      if (n - 1 <= top) raw[n - 1] = fc;
      if (std::fabs(fc) > 1e300L) {
        fc *= 1e-300L;
        fp *= 1e-300L;
        norm *= 1e-600L;
        for (auto& v : raw) v *= 1e-300L;
      }
    }
    const long double scale = 1.0L / std::sqrt(norm);
    // Fix the overall sign using j0's closed form.
    const long double sign =
        (raw[0] * scale) * sph_j0(x) >= 0.0L ? 1.0L : -1.0L;
    for (int n = 0; n <= top; ++n) j[n] = raw[n] * scale * sign;
  };

  std::vector<long double> js, ys, jp, yp, jr, yr;
  fill(xs, js, ys);
  fill(xp, jp, yp);
  fill(xr, jr, yr);

  const long double x_lo = std::min(xs, xp);
  const std::vector<long double>& jlo = (xs <= xp) ? js : jp;
  const std::vector<long double>& jhi = (xs <= xp) ? jp : js;
  const std::vector<long double>& yhi = (xs <= xp) ? yp : ys;
  (void)x_lo;

  std::complex<long double> sum(0.0L, 0.0L);
  long double p_prev = 1.0L;
  long double p_cur = cos_gamma;
  for (int n = 0; n <= n_terms; ++n) {
    long double pn;
    if (n == 0)
      pn = 1.0L;
    else if (n == 1)
      pn = cos_gamma;
    else {
      const long double p_next =
          ((2.0L * n - 1.0L) * cos_gamma * p_cur - (n - 1.0L) * p_prev) / n;
      p_prev = p_cur;
      p_cur = p_next;
      pn = p_cur;
    }
    const std::complex<long double> h_hi(jhi[n], yhi[n]);
    const std::complex<long double> h_s(js[n], ys[n]);
    const std::complex<long double> h_p(jp[n], yp[n]);
    const long double jd =
        (n == 0) ? -jr[1] : jr[n - 1] - (n + 1.0L) / xr * jr[n];
    const std::complex<long double> hd =
        (n == 0) ? std::complex<long double>(-jr[1], -yr[1])
                 : std::complex<long double>(jr[n - 1], yr[n - 1]) -
                       (n + 1.0L) / xr *
                           std::complex<long double>(jr[n], yr[n]);
    const std::complex<long double> alpha = jd / hd;
    const std::complex<long double> s_n =
        jlo[n] * h_hi - alpha * h_s * h_p;
    sum += (2.0L * n + 1.0L) * s_n * pn;
  }

  // Law of cosines for the source-to-point distance.
  const long double rs = r_src, rp = r_pt;
  const long double d =
      std::sqrt(rs * rs + rp * rp - 2.0L * rs * rp * cos_gamma);
  const std::complex<long double> i_k0(0.0L, static_cast<long double>(k0));
  const std::complex<long double> num = std::conj(i_k0 * sum);
  const std::complex<long double> g_ff =
      std::polar(1.0L / d, -static_cast<long double>(k0) * d);
  const std::complex<long double> h = num / g_ff;
  return {static_cast<double>(h.real()), static_cast<double>(h.imag())};
}

std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

double Lcg::next() {
  state = state * 6364136223846793005ull + 1442695040888963407ull;
  return static_cast<double>(state >> 11) / 4503599627370496.0 - 1.0;
}

}  // namespace oracle
