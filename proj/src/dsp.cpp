#include "pszkit/dsp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pszkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sinc(double u) {
  if (u == 0.0) return 1.0;
  const double p = kPi * u;
  return std::sin(p) / p;
}

// 4-term Blackman-Harris on t in [-1, 1].
double bh_window(double t) {
  if (t < -1.0 || t > 1.0) return 0.0;
  return 0.35875 + 0.48829 * std::cos(kPi * t) +
         0.14128 * std::cos(2.0 * kPi * t) +
         0.01168 * std::cos(3.0 * kPi * t);
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n))
    throw std::invalid_argument("fft: size must be a power of two, got " +
                                std::to_string(n));
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  // One twiddle table for the full size; stage k uses stride n/len.
  std::vector<cplx> tw(n / 2);
  const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(n);
  for (std::size_t k = 0; k < n / 2; ++k)
    tw[k] = std::polar(1.0, ang * static_cast<double>(k));

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx w = tw[k * stride];
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double s = 1.0 / static_cast<double>(n);
    for (cplx& v : a) v *= s;
  }
}

std::vector<cplx> real_spectrum(std::span<const double> x, std::size_t n_fft) {
  if (!is_power_of_two(n_fft))
    throw std::invalid_argument("real_spectrum: n_fft must be a power of two");
  if (x.size() > n_fft)
    throw std::invalid_argument(
        "real_spectrum: signal length " + std::to_string(x.size()) +
        " exceeds n_fft " + std::to_string(n_fft));
  std::vector<cplx> a(n_fft, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = cplx(x[i], 0.0);
  fft(a, false);
  a.resize(n_fft / 2 + 1);
  return a;
}

std::vector<double> real_signal(std::span<const cplx> bins, std::size_t n_fft) {
  if (!is_power_of_two(n_fft))
    throw std::invalid_argument("real_signal: n_fft must be a power of two");
  if (bins.size() != n_fft / 2 + 1)
    throw std::invalid_argument("real_signal: expected " +
                                std::to_string(n_fft / 2 + 1) + " bins, got " +
                                std::to_string(bins.size()));
  std::vector<cplx> a(n_fft);
  a[0] = cplx(bins[0].real(), 0.0);
  a[n_fft / 2] = cplx(bins[n_fft / 2].real(), 0.0);
  for (std::size_t k = 1; k < n_fft / 2; ++k) {
    a[k] = bins[k];
    a[n_fft - k] = std::conj(bins[k]);
  }
  fft(a, true);
  std::vector<double> out(n_fft);
  for (std::size_t i = 0; i < n_fft; ++i) out[i] = a[i].real();
  return out;
}

void add_fractional_impulse(std::span<double> buf, double delay_samples,
                            double amplitude) {
  if (!std::isfinite(delay_samples) || delay_samples < 0.0)
    throw std::invalid_argument(
        "add_fractional_impulse: delay must be finite and non-negative");
  const int half = kFracDelayTaps / 2;
  const long long n0 = static_cast<long long>(std::ceil(delay_samples - half));
  const long long n1 = static_cast<long long>(std::floor(delay_samples + half));
  const long long sz = static_cast<long long>(buf.size());
  for (long long n = n0; n <= n1; ++n) {
    if (n < 0 || n >= sz) continue;  // truncate out-of-range taps
    const double u = static_cast<double>(n) - delay_samples;
    buf[static_cast<std::size_t>(n)] +=
        amplitude * bh_window(u / half) * sinc(u);
  }
}

std::vector<double> resample(std::span<const double> x, double fs_in,
                             double fs_out) {
  if (!(fs_in > 0.0) || !(fs_out > 0.0))
    throw std::invalid_argument("resample: sample rates must be positive");
  if (x.empty()) throw std::invalid_argument("resample: empty input");
  if (fs_in == fs_out) return {x.begin(), x.end()};

  // Cutoff at the lower Nyquist: shrink the sinc by r when downsampling.
  const double r = std::min(1.0, fs_out / fs_in);
  const double half = kFracDelayTaps / 2;
  const double span = half / r;
  const std::size_t n_out = static_cast<std::size_t>(
      std::ceil(static_cast<double>(x.size()) * fs_out / fs_in));
  const long long sz = static_cast<long long>(x.size());
  std::vector<double> out(n_out, 0.0);
  for (std::size_t m = 0; m < n_out; ++m) {
    const double t = static_cast<double>(m) * fs_in / fs_out;
    const long long n0 = static_cast<long long>(std::ceil(t - span));
    const long long n1 = static_cast<long long>(std::floor(t + span));
    double acc = 0.0;
    for (long long n = n0; n <= n1; ++n) {
      if (n < 0 || n >= sz) continue;
      const double u = (static_cast<double>(n) - t) * r;
      acc += x[static_cast<std::size_t>(n)] * bh_window(u / half) * sinc(u);
    }
    out[m] = acc * r;
  }
  return out;
}

}  // namespace pszkit
