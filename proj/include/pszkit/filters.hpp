#pragma once

// Regularized frequency-domain pressure matching: per bin, solve a Tikhonov
// least-squares problem steering each program to its own zone's ears while
// silencing the other zone, with per-speaker band masks confining every
// driver to its passband.

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "pszkit/atf.hpp"

namespace pszkit {

// Raised-cosine band mask for one speaker: 1 inside [f_lo, f_hi], 0 well
// outside, with a two-bin half-cosine flank at each edge.
struct BandMask {
  double f_lo = 0.0;
  double f_hi = 0.0;
};
double band_gain(const BandMask& mask, double f_hz, double bin_spacing_hz);

struct DesignConfig {
  double lambda_rel = 1e-3;          // Tikhonov weight, relative to the mean
                                     // diagonal of the masked normal matrix
  std::size_t filter_length = 4096;  // FIR taps per (speaker, program, ch)
  std::size_t modeling_delay = 2048; // samples of bulk delay in the target
  std::size_t taper_len = 32;        // raised-cosine fade at both tap ends
  std::vector<BandMask> speaker_bands;

  static DesignConfig for_scene(const Scene& scene);
  void validate(const FrequencyGrid& grid, std::size_t n_speakers) const;
};

// Per-bin design solution W(l, k, c, bin): speaker l, program k, channel c.
struct DesignSpectra {
  FrequencyGrid grid;
  std::size_t speakers = 0;
  std::size_t programs = 0;
  std::size_t channels = 2;
  std::vector<cplx> w;

  std::size_t index(std::size_t l, std::size_t k, std::size_t c,
                    std::size_t bin) const {
    return ((l * programs + k) * channels + c) * grid.n_bins() + bin;
  }
  cplx& at(std::size_t l, std::size_t k, std::size_t c, std::size_t bin) {
    return w[index(l, k, c, bin)];
  }
  const cplx& at(std::size_t l, std::size_t k, std::size_t c,
                 std::size_t bin) const {
    return w[index(l, k, c, bin)];
  }
};

// Time-domain filter bank w(l, k, c, n).
struct FilterBank {
  std::size_t speakers = 0;
  std::size_t programs = 0;
  std::size_t channels = 2;
  std::size_t taps = 0;
  double sample_rate = 0.0;
  std::vector<double> w;

  std::size_t index(std::size_t l, std::size_t k, std::size_t c,
                    std::size_t n) const {
    return ((l * programs + k) * channels + c) * taps + n;
  }
  double& at(std::size_t l, std::size_t k, std::size_t c, std::size_t n) {
    return w[index(l, k, c, n)];
  }
  const double& at(std::size_t l, std::size_t k, std::size_t c,
                   std::size_t n) const {
    return w[index(l, k, c, n)];
  }
};

// Per-bin regularized normal-equation solve on the band-masked transfer
// matrix.  The target pressure is 1 at the serving program's own-ear rows
// (ear index == channel) and 0 elsewhere.  Bins where the mask silences
// every speaker get all-zero solutions.  With lambda_rel == 0 a
// rank-deficient bin throws std::runtime_error.
DesignSpectra design_spectra(const AtfSet& atf, const DesignConfig& cfg,
                             Exec exec = Exec::parallel);

// Inverse transform to FIR taps: circular shift by modeling_delay, truncate
// to filter_length, raised-cosine taper at both ends.
FilterBank spectra_to_fir(const DesignSpectra& spectra,
                          const DesignConfig& cfg);

// Full design pipeline.
FilterBank design_pressure_matching(const AtfSet& atf, const DesignConfig& cfg,
                                    Exec exec = Exec::parallel);

// Mixes program material through the bank: speaker feed l accumulates
// sum_{k,c} (program[k][c] * w[l][k][c]).  Programs may have different
// lengths; the output length covers the longest convolution tail.
std::vector<std::vector<double>> synthesize_drive_signals(
    const FilterBank& bank,
    const std::vector<std::array<std::vector<double>, 2>>& programs);

}  // namespace pszkit
