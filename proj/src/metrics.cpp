#include "pszkit/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pszkit/dsp.hpp"

namespace pszkit {

ProgramPressures program_pressures(const FilterBank& bank, const AtfSet& eval,
                                   Exec exec) {
  if (eval.points != 1)
    throw std::invalid_argument(
        "program_pressures: evaluation set must carry one point per ear");
  if (bank.programs != eval.listeners)
    throw std::invalid_argument(
        "program_pressures: bank programs and evaluation listeners differ");
  if (bank.speakers != eval.speakers)
    throw std::invalid_argument(
        "program_pressures: bank and evaluation speaker counts differ");
  if (bank.taps > eval.grid.n_fft)
    throw std::invalid_argument(
        "program_pressures: filter taps exceed the evaluation grid");
  if (bank.sample_rate != eval.grid.sample_rate)
    throw std::invalid_argument(
        "program_pressures: sample-rate mismatch between bank and grid");

  const std::size_t n_l = bank.speakers;
  const std::size_t n_k = eval.listeners;
  const std::size_t nb = eval.grid.n_bins();

  // Filter spectra on the evaluation grid, indexed (l, j, c).
  std::vector<std::vector<cplx>> wspec(n_l * n_k * 2);
  for_each_index(static_cast<std::int64_t>(wspec.size()), exec,
                 [&](std::int64_t t) {
                   const std::size_t l = static_cast<std::size_t>(t) / (n_k * 2);
                   const std::size_t rest = static_cast<std::size_t>(t) % (n_k * 2);
                   const std::size_t j = rest / 2;
                   const std::size_t c = rest % 2;
                   const std::span<const double> taps(
                       &bank.w[bank.index(l, j, c, 0)], bank.taps);
                   wspec[t] = real_spectrum(taps, eval.grid.n_fft);
                 });

  ProgramPressures pp;
  pp.grid = eval.grid;
  pp.programs = n_k;
  pp.listeners = n_k;
  pp.p.assign(n_k * n_k * 2 * 2 * nb, cplx(0.0, 0.0));

  const std::int64_t n_tuples = static_cast<std::int64_t>(n_k * n_k * 2 * 2);
  for_each_index(n_tuples, exec, [&](std::int64_t t) {
    std::size_t rest = static_cast<std::size_t>(t);
    const std::size_t c = rest % 2;
    rest /= 2;
    const std::size_t e = rest % 2;
    rest /= 2;
    const std::size_t k = rest % n_k;
    const std::size_t j = rest / n_k;
    const std::size_t out_base = pp.index(j, k, e, c, 0);
    for (std::size_t l = 0; l < n_l; ++l) {
      const std::vector<cplx>& w = wspec[(l * n_k + j) * 2 + c];
      const std::size_t h_base = eval.index(k, e, 0, l, 0);
      for (std::size_t b = 0; b < nb; ++b)
        pp.p[out_base + b] += eval.h[h_base + b] * w[b];
    }
  });
  return pp;
}

std::vector<std::size_t> log_eval_bins(const FrequencyGrid& grid) {
  grid.validate();
  if (grid.sample_rate / 2.0 < kMetricHiHz)
    throw std::invalid_argument(
        "log_eval_bins: the metric grid reaches " +
        std::to_string(kMetricHiHz) +
        " Hz; the sample rate must be at least twice that");
  std::vector<std::size_t> bins;
  bins.reserve(kMetricPoints);
  const double ratio = kMetricHiHz / kMetricLoHz;
  for (std::size_t i = 0; i < kMetricPoints; ++i) {
    const double f =
        kMetricLoHz *
        std::pow(ratio, static_cast<double>(i) / (kMetricPoints - 1));
    const double fb = f * static_cast<double>(grid.n_fft) / grid.sample_rate;
    std::size_t bin = static_cast<std::size_t>(std::lround(fb));
    if (bin > grid.n_fft / 2) bin = grid.n_fft / 2;
    // Coarse grids can snap neighbouring points to one bin; keep frequencies
    // strictly increasing.
    if (bins.empty() || bin > bins.back()) bins.push_back(bin);
  }
  return bins;
}

double default_metric_epsilon(const ProgramPressures& pp) {
  double max_tar = 0.0;
  const std::size_t nb = pp.grid.n_bins();
  for (std::size_t k = 0; k < pp.listeners; ++k)
    for (std::size_t b = 0; b < nb; ++b) {
      const double e_tar =
          pp.energy(k, k, 0, b) + pp.energy(k, k, 1, b);
      if (e_tar > max_tar) max_tar = e_tar;
    }
  return 1e-12 * max_tar;
}

namespace {

void check_curve_args(const ProgramPressures& pp, std::size_t k, double eps) {
  if (k >= pp.listeners)
    throw std::invalid_argument("metric curve: listener index out of range");
  if (!(eps > 0.0))
    throw std::invalid_argument("metric curve: eps must be > 0");
}

MetricCurve ratio_curve(const ProgramPressures& pp,
                        const std::vector<std::size_t>& bins, std::size_t k,
                        double eps, bool leakage_denominator) {
  MetricCurve curve;
  curve.freq_hz.resize(bins.size());
  curve.value_db.resize(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const std::size_t b = bins[i];
    const double tar = pp.energy(k, k, 0, b) + pp.energy(k, k, 1, b);
    double den = 0.0;
    if (leakage_denominator) {
      // Program k received away from its own zone.
      for (std::size_t kk = 0; kk < pp.listeners; ++kk) {
        if (kk == k) continue;
        den += pp.energy(k, kk, 0, b) + pp.energy(k, kk, 1, b);
      }
    } else {
      // Other programs received at zone k.
      for (std::size_t j = 0; j < pp.programs; ++j) {
        if (j == k) continue;
        den += pp.energy(j, k, 0, b) + pp.energy(j, k, 1, b);
      }
    }
    curve.freq_hz[i] = pp.grid.freq_hz(b);
    curve.value_db[i] = 10.0 * std::log10(tar / (den + eps));
  }
  return curve;
}

}  // namespace

MetricCurve izi_curve(const ProgramPressures& pp, std::size_t k, double eps) {
  check_curve_args(pp, k, eps);
  return ratio_curve(pp, log_eval_bins(pp.grid), k, eps, true);
}

MetricCurve ipi_curve(const ProgramPressures& pp, std::size_t k, double eps) {
  check_curve_args(pp, k, eps);
  return ratio_curve(pp, log_eval_bins(pp.grid), k, eps, false);
}

MetricCurve xtc_curve(const ProgramPressures& pp, std::size_t k, double eps) {
  check_curve_args(pp, k, eps);
  const std::vector<std::size_t> bins = log_eval_bins(pp.grid);
  MetricCurve curve;
  curve.freq_hz.resize(bins.size());
  curve.value_db.resize(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const std::size_t b = bins[i];
    // 2x2 channel-to-ear matrix of the zone's own program.
    const double t_ll = std::norm(pp.at(k, k, 0, 0, b));
    const double t_lr = std::norm(pp.at(k, k, 0, 1, b));
    const double t_rl = std::norm(pp.at(k, k, 1, 0, b));
    const double t_rr = std::norm(pp.at(k, k, 1, 1, b));
    curve.freq_hz[i] = pp.grid.freq_hz(b);
    curve.value_db[i] = 10.0 * std::log10((t_ll + t_rr) / (t_lr + t_rl + eps));
  }
  return curve;
}

MetricCurve xtc(const FilterBank& bank, const AtfSet& eval, std::size_t k,
                double eps, Exec exec) {
  return xtc_curve(program_pressures(bank, eval, exec), k, eps);
}

double broadband_mean(const MetricCurve& curve) {
  if (curve.value_db.empty())
    throw std::invalid_argument("broadband_mean: empty curve");
  double acc = 0.0;
  for (double v : curve.value_db) acc += v;
  return acc / static_cast<double>(curve.value_db.size());
}

}  // namespace pszkit
