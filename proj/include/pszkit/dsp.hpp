#pragma once

// Small deterministic DSP kernels: an iterative radix-2 FFT (thread-safe,
// no planning state), single-sided real-signal transforms, the windowed-sinc
// fractional-delay kernel shared by the room simulator and the resampler.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pszkit {

using cplx = std::complex<double>;

bool is_power_of_two(std::size_t n);

// In-place radix-2 transform; size must be a power of two.  inverse applies
// the 1/n scale.
void fft(std::vector<cplx>& a, bool inverse);

// Single-sided spectrum (bins 0..n_fft/2) of a real signal zero-padded (or
// rejected if longer) to n_fft.
std::vector<cplx> real_spectrum(std::span<const double> x, std::size_t n_fft);

// Inverse of real_spectrum: conjugate-symmetric extension, full-length
// real output (imaginary parts of DC/Nyquist bins are discarded).
std::vector<double> real_signal(std::span<const cplx> bins, std::size_t n_fft);

// Fractional-delay kernel: 64-tap Blackman-Harris windowed sinc.  Adds
// amplitude * kernel(delay) into buf at integer sample positions; taps
// falling outside the buffer are truncated.
inline constexpr int kFracDelayTaps = 64;
void add_fractional_impulse(std::span<double> buf, double delay_samples,
                            double amplitude);

// Windowed-sinc band-limited resampling from fs_in to fs_out (cutoff at the
// lower Nyquist).  Output length is ceil(n * fs_out / fs_in).
std::vector<double> resample(std::span<const double> x, double fs_in,
                             double fs_out);

}  // namespace pszkit
