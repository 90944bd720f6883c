// Compares the serial reference kernels against the OpenMP paths on the
// stock scene: transfer-set synthesis, per-bin filter design, and pressure
// evaluation.  Also verifies that both paths agree bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "pszkit/ablation.hpp"

using namespace pszkit;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return seconds_since(t0);
}

bool bits_equal(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  // Default: a reduced grid so the benchmark turns around quickly;
  // --full uses the production grid.
  std::size_t n_fft = 4096;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--full") n_fft = 16384;

  SceneParams params;
  params.rir_seconds = static_cast<double>(n_fft) / params.sample_rate * 0.7;
  const Scene scene = make_scene(params);
  const FrequencyGrid grid{params.sample_rate, n_fft};
  const SeriesControl series;
  const FrMap frs = synthetic_fr_map(scene, grid);

  std::printf("scene: %zu speakers, %zu listeners, n_fft %zu\n",
              scene.speakers.size(), scene.listeners.size(), grid.n_fft);

  AtfSet atf_serial, atf_parallel;
  const double t_atf_s = timed([&] {
    atf_serial = build_atf_set(scene, Stage::C3, frs, grid, series,
                               Exec::serial);
  });
  const double t_atf_p = timed([&] {
    atf_parallel = build_atf_set(scene, Stage::C3, frs, grid, series,
                                 Exec::parallel);
  });
  std::printf("build_atf_set (C3):      serial %7.3fs  parallel %7.3fs  "
              "speedup %5.2fx  bit-identical %s\n",
              t_atf_s, t_atf_p, t_atf_s / t_atf_p,
              bits_equal(atf_serial.h, atf_parallel.h) ? "yes" : "NO");

  DesignConfig cfg = DesignConfig::for_scene(scene);
  cfg.filter_length = std::min<std::size_t>(4096, n_fft / 2);
  cfg.modeling_delay = cfg.filter_length / 2;

  DesignSpectra ds_serial, ds_parallel;
  const double t_design_s =
      timed([&] { ds_serial = design_spectra(atf_serial, cfg, Exec::serial); });
  const double t_design_p = timed(
      [&] { ds_parallel = design_spectra(atf_serial, cfg, Exec::parallel); });
  std::printf("design_spectra:          serial %7.3fs  parallel %7.3fs  "
              "speedup %5.2fx  bit-identical %s\n",
              t_design_s, t_design_p, t_design_s / t_design_p,
              bits_equal(ds_serial.w, ds_parallel.w) ? "yes" : "NO");

  const FilterBank bank = spectra_to_fir(ds_serial, cfg);
  ProgramPressures pp_serial, pp_parallel;
  const double t_pp_s = timed(
      [&] { pp_serial = program_pressures(bank, atf_serial, Exec::serial); });
  const double t_pp_p = timed([&] {
    pp_parallel = program_pressures(bank, atf_serial, Exec::parallel);
  });
  std::printf("program_pressures:       serial %7.3fs  parallel %7.3fs  "
              "speedup %5.2fx  bit-identical %s\n",
              t_pp_s, t_pp_p, t_pp_s / t_pp_p,
              bits_equal(pp_serial.p, pp_parallel.p) ? "yes" : "NO");
  return 0;
}
