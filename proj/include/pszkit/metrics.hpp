#pragma once

// Zone-separation metrics.  Complex ear pressures are kept per program
// channel; for uncorrelated unit-energy channels the received energy is the
// sum of per-channel energies.  Metrics:
//   IZI(k): program k's energy at its own zone vs. its leakage into others
//   IPI(k): own-program energy at zone k vs. other programs' interference
//   XTC(k): own-channel vs. cross-channel energy of the zone's 2x2
//           channel-to-ear matrix
// All are reported in dB on a 256-point log-spaced frequency grid.

#include <cstddef>
#include <vector>

#include "pszkit/atf.hpp"
#include "pszkit/filters.hpp"

namespace pszkit {

inline constexpr std::size_t kMetricPoints = 256;
inline constexpr double kMetricLoHz = 100.0;
inline constexpr double kMetricHiHz = 20000.0;

// Complex pressures P(program j, listener k, ear e, channel c, bin).
struct ProgramPressures {
  FrequencyGrid grid;
  std::size_t programs = 0;
  std::size_t listeners = 0;
  std::vector<cplx> p;

  std::size_t index(std::size_t j, std::size_t k, std::size_t e,
                    std::size_t c, std::size_t bin) const {
    return (((j * listeners + k) * 2 + e) * 2 + c) * grid.n_bins() + bin;
  }
  cplx& at(std::size_t j, std::size_t k, std::size_t e, std::size_t c,
           std::size_t bin) {
    return p[index(j, k, e, c, bin)];
  }
  const cplx& at(std::size_t j, std::size_t k, std::size_t e, std::size_t c,
                 std::size_t bin) const {
    return p[index(j, k, e, c, bin)];
  }

  // Coherent sum over channels (both channels carrying the same signal).
  cplx summed(std::size_t j, std::size_t k, std::size_t e,
              std::size_t bin) const {
    return at(j, k, e, 0, bin) + at(j, k, e, 1, bin);
  }
  // Energy for uncorrelated unit-energy channels.
  double energy(std::size_t j, std::size_t k, std::size_t e,
                std::size_t bin) const {
    const cplx a = at(j, k, e, 0, bin);
    const cplx b = at(j, k, e, 1, bin);
    return std::norm(a) + std::norm(b);
  }
};

// Ear pressures of every program at every listener through an evaluation
// transfer set (one point per ear).  The filter bank's spectra are taken on
// the evaluation grid.
ProgramPressures program_pressures(const FilterBank& bank, const AtfSet& eval,
                                   Exec exec = Exec::parallel);

struct MetricCurve {
  std::vector<double> freq_hz;   // evaluated bin frequencies
  std::vector<double> value_db;
};

// The 256 log-spaced evaluation frequencies snapped to nearest FFT bins.
// Requires the grid to reach 20 kHz.
std::vector<std::size_t> log_eval_bins(const FrequencyGrid& grid);

// Default denominator floor: 1e-12 times the largest per-bin target energy.
double default_metric_epsilon(const ProgramPressures& pp);

MetricCurve izi_curve(const ProgramPressures& pp, std::size_t k, double eps);
MetricCurve ipi_curve(const ProgramPressures& pp, std::size_t k, double eps);
MetricCurve xtc_curve(const ProgramPressures& pp, std::size_t k, double eps);

// Convenience form computing the pressures internally.
MetricCurve xtc(const FilterBank& bank, const AtfSet& eval, std::size_t k,
                double eps, Exec exec = Exec::parallel);

// Arithmetic mean of the dB values across the curve.
double broadband_mean(const MetricCurve& curve);

}  // namespace pszkit
