#include "pszkit/filters.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pszkit/dsp.hpp"

namespace pszkit {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double band_gain(const BandMask& mask, double f_hz, double bin_spacing_hz) {
  if (!(bin_spacing_hz > 0.0))
    throw std::invalid_argument("band_gain: bin spacing must be > 0");
  if (!(mask.f_hi > mask.f_lo) || mask.f_lo < 0.0)
    throw std::invalid_argument("band_gain: invalid band edges");
  const double w = 2.0 * bin_spacing_hz;
  if (f_hz >= mask.f_lo && f_hz <= mask.f_hi) return 1.0;
  const double u =
      (f_hz < mask.f_lo ? mask.f_lo - f_hz : f_hz - mask.f_hi) / w;
  if (u >= 1.0) return 0.0;
  return 0.5 * (1.0 + std::cos(kPi * u));
}

DesignConfig DesignConfig::for_scene(const Scene& scene) {
  DesignConfig cfg;
  cfg.speaker_bands.reserve(scene.speakers.size());
  for (const Loudspeaker& spk : scene.speakers)
    cfg.speaker_bands.push_back({spk.f_lo, spk.f_hi});
  return cfg;
}

void DesignConfig::validate(const FrequencyGrid& grid,
                            std::size_t n_speakers) const {
  grid.validate();
  if (!(lambda_rel >= 0.0))
    throw std::invalid_argument("DesignConfig: lambda_rel must be >= 0");
  if (filter_length == 0 || filter_length > grid.n_fft)
    throw std::invalid_argument(
        "DesignConfig: filter_length must lie in [1, n_fft]");
  if (modeling_delay >= filter_length)
    throw std::invalid_argument(
        "DesignConfig: modeling_delay must be < filter_length");
  if (taper_len > filter_length / 2)
    throw std::invalid_argument(
        "DesignConfig: taper_len must be <= filter_length / 2");
  if (speaker_bands.size() != n_speakers)
    throw std::invalid_argument(
        "DesignConfig: need one band mask per speaker (" +
        std::to_string(speaker_bands.size()) + " masks for " +
        std::to_string(n_speakers) + " speakers)");
  for (const BandMask& m : speaker_bands)
    if (!(m.f_hi > m.f_lo) || m.f_lo < 0.0)
      throw std::invalid_argument("DesignConfig: invalid band mask edges");
}

DesignSpectra design_spectra(const AtfSet& atf, const DesignConfig& cfg,
                             Exec exec) {
  cfg.validate(atf.grid, atf.speakers);
  if (atf.listeners == 0 || atf.speakers == 0 || atf.points == 0)
    throw std::invalid_argument("design_spectra: empty transfer set");

  const std::size_t n_rows = atf.listeners * atf.ears * atf.points;
  const std::size_t n_l = atf.speakers;
  const std::size_t n_k = atf.listeners;
  const std::size_t nb = atf.grid.n_bins();
  const double df = atf.grid.sample_rate / static_cast<double>(atf.grid.n_fft);

  DesignSpectra out;
  out.grid = atf.grid;
  out.speakers = n_l;
  out.programs = n_k;
  out.channels = 2;
  out.w.assign(n_l * n_k * 2 * nb, cplx(0.0, 0.0));

  for_each_index(static_cast<std::int64_t>(nb), exec, [&](std::int64_t bi) {
    const std::size_t bin = static_cast<std::size_t>(bi);
    const double f = atf.grid.freq_hz(bin);

    std::vector<double> gain(n_l);
    bool all_zero = true;
    for (std::size_t l = 0; l < n_l; ++l) {
      gain[l] = band_gain(cfg.speaker_bands[l], f, df);
      if (gain[l] != 0.0) all_zero = false;
    }
    if (all_zero) return;  // silenced bin: all-zero solution

    Eigen::MatrixXcd hm(n_rows, n_l);
    for (std::size_t k = 0; k < atf.listeners; ++k)
      for (std::size_t e = 0; e < atf.ears; ++e)
        for (std::size_t m = 0; m < atf.points; ++m) {
          const std::size_t r = (k * atf.ears + e) * atf.points + m;
          for (std::size_t l = 0; l < n_l; ++l)
            hm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l)) =
                atf.at(k, e, m, l, bin) * gain[l];
        }

    const double norm_sq = hm.squaredNorm();
    if (norm_sq == 0.0) return;  // no acoustic path in this bin

    // Target: unit pressure at the serving program's own ear rows.
    Eigen::MatrixXcd targets =
        Eigen::MatrixXcd::Zero(n_rows, static_cast<Eigen::Index>(n_k * 2));
    for (std::size_t k = 0; k < n_k; ++k)
      for (std::size_t c = 0; c < 2 && c < atf.ears; ++c)
        for (std::size_t m = 0; m < atf.points; ++m) {
          const std::size_t r = (k * atf.ears + c) * atf.points + m;
          targets(static_cast<Eigen::Index>(r),
                  static_cast<Eigen::Index>(k * 2 + c)) = 1.0;
        }

    Eigen::MatrixXcd normal = hm.adjoint() * hm;
    const Eigen::MatrixXcd rhs = hm.adjoint() * targets;
    Eigen::MatrixXcd sol;
    if (cfg.lambda_rel == 0.0) {
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(normal);
      if (lu.rank() < static_cast<Eigen::Index>(n_l))
        throw std::runtime_error(
            "design_spectra: normal matrix is rank-deficient at bin " +
            std::to_string(bin) + " (" + std::to_string(f) +
            " Hz) and no regularization was requested");
      sol = lu.solve(rhs);
    } else {
      const double lambda =
          cfg.lambda_rel * norm_sq / static_cast<double>(n_l);
      normal.diagonal().array() += lambda;
      sol = Eigen::LLT<Eigen::MatrixXcd>(normal).solve(rhs);
    }

    for (std::size_t l = 0; l < n_l; ++l)
      for (std::size_t k = 0; k < n_k; ++k)
        for (std::size_t c = 0; c < 2; ++c)
          out.at(l, k, c, bin) =
              gain[l] * sol(static_cast<Eigen::Index>(l),
                            static_cast<Eigen::Index>(k * 2 + c));
  });
  return out;
}

FilterBank spectra_to_fir(const DesignSpectra& spectra,
                          const DesignConfig& cfg) {
  cfg.validate(spectra.grid, spectra.speakers);
  const std::size_t n_fft = spectra.grid.n_fft;
  const std::size_t nb = spectra.grid.n_bins();

  FilterBank bank;
  bank.speakers = spectra.speakers;
  bank.programs = spectra.programs;
  bank.channels = spectra.channels;
  bank.taps = cfg.filter_length;
  bank.sample_rate = spectra.grid.sample_rate;
  bank.w.assign(bank.speakers * bank.programs * bank.channels * bank.taps,
                0.0);

  for (std::size_t l = 0; l < bank.speakers; ++l)
    for (std::size_t k = 0; k < bank.programs; ++k)
      for (std::size_t c = 0; c < bank.channels; ++c) {
        const std::span<const cplx> bins(&spectra.w[spectra.index(l, k, c, 0)],
                                         nb);
        const std::vector<double> full = real_signal(bins, n_fft);
        for (std::size_t n = 0; n < bank.taps; ++n) {
          const std::size_t src =
              (n + n_fft - cfg.modeling_delay) % n_fft;  // circular shift
          bank.at(l, k, c, n) = full[src];
        }
        for (std::size_t i = 0; i < cfg.taper_len; ++i) {
          const double ramp =
              0.5 * (1.0 - std::cos(kPi * (i + 0.5) /
                                    static_cast<double>(cfg.taper_len)));
          bank.at(l, k, c, i) *= ramp;
          bank.at(l, k, c, bank.taps - 1 - i) *= ramp;
        }
      }
  return bank;
}

FilterBank design_pressure_matching(const AtfSet& atf, const DesignConfig& cfg,
                                    Exec exec) {
  return spectra_to_fir(design_spectra(atf, cfg, exec), cfg);
}

std::vector<std::vector<double>> synthesize_drive_signals(
    const FilterBank& bank,
    const std::vector<std::array<std::vector<double>, 2>>& programs) {
  if (bank.taps == 0 || bank.w.empty())
    throw std::invalid_argument("synthesize_drive_signals: empty filter bank");
  if (programs.size() != bank.programs)
    throw std::invalid_argument(
        "synthesize_drive_signals: expected " + std::to_string(bank.programs) +
        " programs, got " + std::to_string(programs.size()));
  std::size_t max_len = 0;
  for (const auto& prog : programs)
    for (const auto& ch : prog) max_len = std::max(max_len, ch.size());
  if (max_len == 0)
    throw std::invalid_argument(
        "synthesize_drive_signals: all program channels are empty");

  const std::size_t out_len = max_len + bank.taps - 1;
  std::vector<std::vector<double>> feeds(bank.speakers);
  for (std::size_t l = 0; l < bank.speakers; ++l) {
    feeds[l].assign(out_len, 0.0);
    for (std::size_t k = 0; k < bank.programs; ++k)
      for (std::size_t c = 0; c < bank.channels; ++c) {
        const std::vector<double>& s = programs[k][c];
        for (std::size_t i = 0; i < s.size(); ++i) {
          const double si = s[i];
          if (si == 0.0) continue;
          for (std::size_t n = 0; n < bank.taps; ++n)
            feeds[l][i + n] += si * bank.at(l, k, c, n);
        }
      }
  }
  return feeds;
}

}  // namespace pszkit
