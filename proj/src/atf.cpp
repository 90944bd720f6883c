#include "pszkit/atf.hpp"

#include <cmath>
#include <stdexcept>

#include "pszkit/dsp.hpp"

namespace pszkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

cplx table_h(const SphBesselTable& t, int n) { return {t.j[n], t.y[n]}; }

bool finite(const cplx& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

}  // namespace

double FrequencyGrid::omega(std::size_t bin) const {
  return 2.0 * kPi * freq_hz(bin);
}

void FrequencyGrid::validate() const {
  if (!(sample_rate > 0.0))
    throw std::invalid_argument("FrequencyGrid: sample_rate must be > 0");
  if (!is_power_of_two(n_fft) || n_fft < 2)
    throw std::invalid_argument(
        "FrequencyGrid: n_fft must be a power of two >= 2");
}

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::C0: return "C0";
    case Stage::C1: return "C1";
    case Stage::C2: return "C2";
    default: return "C3";
  }
}

Stage stage_from_name(const std::string& name) {
  if (name == "C0" || name == "c0") return Stage::C0;
  if (name == "C1" || name == "c1") return Stage::C1;
  if (name == "C2" || name == "c2") return Stage::C2;
  if (name == "C3" || name == "c3") return Stage::C3;
  throw std::invalid_argument("unknown stage name: '" + name +
                              "' (expected C0..C3)");
}

StageLayers layers_for(Stage s) {
  StageLayers ly;
  ly.fr = s >= Stage::C1;
  ly.dir = s >= Stage::C2;
  ly.hrtf = s >= Stage::C3;
  return ly;
}

std::pair<std::vector<cplx>, std::vector<cplx>> fft_components(
    const DecomposedRir& rir, const FrequencyGrid& grid) {
  grid.validate();
  if (rir.direct.size() != rir.reflected.size())
    throw std::invalid_argument(
        "fft_components: direct/reflected length mismatch");
  if (rir.direct.size() > grid.n_fft)
    throw std::invalid_argument(
        "fft_components: impulse response longer than n_fft");
  if (rir.sample_rate != grid.sample_rate)
    throw std::invalid_argument(
        "fft_components: impulse response sample rate does not match grid");
  return {real_spectrum(rir.direct, grid.n_fft),
          real_spectrum(rir.reflected, grid.n_fft)};
}

double piston_directivity(double omega, double theta_rad,
                          double piston_radius, double speed_of_sound) {
  if (!(piston_radius > 0.0))
    throw std::invalid_argument("piston_directivity: radius must be > 0");
  if (!(speed_of_sound > 0.0))
    throw std::invalid_argument("piston_directivity: speed must be > 0");
  if (!(omega >= 0.0))
    throw std::invalid_argument("piston_directivity: omega must be >= 0");
  const double u =
      omega / speed_of_sound * piston_radius * std::sin(theta_rad);
  const double au = std::fabs(u);  // the pattern is even in u
  if (au < 1e-8) return 1.0;
  return 2.0 * bessel_j1(au) / au;
}

cplx sphere_series(double k0, double r_src, double r_pt, double cos_gamma,
                   double sphere_radius, const SeriesControl& ctl,
                   bool with_scattering) {
  if (!(k0 > 0.0))
    throw std::invalid_argument("sphere_series: k0 must be > 0");
  if (!(r_src > 0.0) || !(r_pt > 0.0))
    throw std::invalid_argument("sphere_series: radii must be > 0");
  if (ctl.max_order < 2 || !(ctl.term_tol > 0.0))
    throw std::invalid_argument("sphere_series: invalid SeriesControl");
  if (with_scattering) {
    if (!(sphere_radius > 0.0))
      throw std::invalid_argument("sphere_series: sphere radius must be > 0");
    if (!(r_src > sphere_radius))
      throw std::invalid_argument(
          "sphere_series: source must lie outside the sphere");
    if (r_pt < sphere_radius * (1.0 - 1e-9))
      throw std::invalid_argument(
          "sphere_series: evaluation point must lie on or outside the sphere");
  }
  if (cos_gamma > 1.0) cos_gamma = 1.0;
  if (cos_gamma < -1.0) cos_gamma = -1.0;

  const double x_src = k0 * r_src;
  const double x_pt = k0 * r_pt;
  const double x_r = k0 * sphere_radius;
  const bool src_is_far = x_src >= x_pt;

  int target = std::min(
      ctl.max_order,
      static_cast<int>(std::ceil(std::max(x_src, x_pt))) + 24);
  for (;;) {
    const SphBesselTable ts = sph_bessel_table(target, x_src);
    const SphBesselTable tp = sph_bessel_table(target, x_pt);
    const SphBesselTable tr =
        with_scattering ? sph_bessel_table(target + 1, x_r) : SphBesselTable{};

    cplx sum(0.0, 0.0);
    double sum_abs = 0.0;
    int small_run = 0;
    double p_prev = 1.0;       // P_{n-1}
    double p_cur = cos_gamma;  // P_n for n = 1
    for (int n = 0; n <= target; ++n) {
      double pn;
      if (n == 0) {
        pn = 1.0;
      } else if (n == 1) {
        pn = cos_gamma;
      } else {
        const double p_next =
            ((2.0 * n - 1.0) * cos_gamma * p_cur - (n - 1.0) * p_prev) / n;
        p_prev = p_cur;
        p_cur = p_next;
        pn = p_cur;
      }
      const double j_lo = src_is_far ? tp.j[n] : ts.j[n];
      const cplx h_hi = src_is_far ? table_h(ts, n) : table_h(tp, n);
      cplx s_n = j_lo * h_hi;
      if (with_scattering) {
        const double jd = sph_bessel_j_deriv(tr, n, x_r);
        const cplx hd = sph_hankel1_deriv(tr, n, x_r);
        // |h'| -> inf means the scattered mode vanishes.
        const cplx alpha = finite(hd) ? cplx(jd) / hd : cplx(0.0, 0.0);
        s_n -= alpha * table_h(ts, n) * table_h(tp, n);
      }
      const cplx term = (2.0 * n + 1.0) * s_n * pn;
      if (!finite(term))
        throw std::runtime_error(
            "sphere_series: non-finite term at order " + std::to_string(n) +
            " (k0=" + std::to_string(k0) + ")");
      sum += term;
      sum_abs += std::abs(term);
      if (n >= 2 && std::abs(term) <= ctl.term_tol * sum_abs) {
        if (++small_run >= 2) return sum;
      } else {
        small_run = 0;
      }
    }
    if (target >= ctl.max_order)
      throw std::runtime_error(
          "sphere_series: series did not settle within " +
          std::to_string(ctl.max_order) + " terms (k0=" + std::to_string(k0) +
          ", r_src=" + std::to_string(r_src) +
          ", r_pt=" + std::to_string(r_pt) + ")");
    target = std::min(ctl.max_order, 2 * target);
  }
}

namespace {

// Shared tail: normalize the summed series by the free-field Green's
// function between the two locations.
cplx normalize_series(double k0, const Vec3& r_src, const Vec3& r_pt,
                      const cplx& sum) {
  const double d = distance(r_src, r_pt);
  if (d == 0.0)
    throw std::invalid_argument("rs_hrtf: source and point coincide");
  const cplx g_ff = std::polar(1.0 / d, -k0 * d);
  const cplx scaled = std::conj(cplx(0.0, 1.0) * k0 * sum);
  return scaled / g_ff;
}

}  // namespace

cplx rs_hrtf(double omega, const Vec3& r_src, const Vec3& r_pt,
             double sphere_radius, double speed_of_sound,
             const SeriesControl& ctl) {
  if (!(omega > 0.0))
    throw std::invalid_argument("rs_hrtf: omega must be > 0");
  if (!(speed_of_sound > 0.0))
    throw std::invalid_argument("rs_hrtf: speed_of_sound must be > 0");
  const double k0 = omega / speed_of_sound;
  const double rs = r_src.norm();
  const double rp = r_pt.norm();
  if (!(rs > 0.0) || !(rp > 0.0))
    throw std::invalid_argument("rs_hrtf: zero-length position vector");
  const double cg = r_src.dot(r_pt) / (rs * rp);
  const cplx sum =
      sphere_series(k0, rs, rp, cg, sphere_radius, ctl, /*with_scattering=*/true);
  return normalize_series(k0, r_src, r_pt, sum);
}

cplx rs_hrtf_far(double omega, const Vec3& r_src, const Vec3& r_pt,
                 double sphere_radius, double speed_of_sound,
                 const SeriesControl& ctl) {
  if (!(omega > 0.0))
    throw std::invalid_argument("rs_hrtf_far: omega must be > 0");
  if (!(speed_of_sound > 0.0))
    throw std::invalid_argument("rs_hrtf_far: speed_of_sound must be > 0");
  const double k0 = omega / speed_of_sound;
  const double rs = r_src.norm();
  const double rp = r_pt.norm();
  if (!(rs > 0.0) || !(rp > 0.0))
    throw std::invalid_argument("rs_hrtf_far: zero-length position vector");
  if (rs < rp)
    throw std::invalid_argument(
        "rs_hrtf_far: the far-source form requires the source beyond the "
        "evaluation point");
  if (!(sphere_radius > 0.0) || !(rs > sphere_radius) ||
      rp < sphere_radius * (1.0 - 1e-9))
    throw std::invalid_argument("rs_hrtf_far: invalid sphere geometry");
  double cg = r_src.dot(r_pt) / (rs * rp);
  if (cg > 1.0) cg = 1.0;
  if (cg < -1.0) cg = -1.0;

  const double x_src = k0 * rs;
  const double x_pt = k0 * rp;
  const double x_r = k0 * sphere_radius;
  int target =
      std::min(ctl.max_order, static_cast<int>(std::ceil(x_pt)) + 24);
  for (;;) {
    const SphBesselTable tp = sph_bessel_table(target, x_pt);
    const SphBesselTable tr = sph_bessel_table(target + 1, x_r);
    // (-i)^{n+1} e^{i x_src} / x_src replaces h_n(x_src).
    cplx src_factor = std::polar(1.0 / x_src, x_src) * cplx(0.0, -1.0);
    cplx sum(0.0, 0.0);
    double sum_abs = 0.0;
    int small_run = 0;
    double p_prev = 1.0;
    double p_cur = cg;
    for (int n = 0; n <= target; ++n) {
      double pn;
      if (n == 0) {
        pn = 1.0;
      } else if (n == 1) {
        pn = cg;
      } else {
        const double p_next =
            ((2.0 * n - 1.0) * cg * p_cur - (n - 1.0) * p_prev) / n;
        p_prev = p_cur;
        p_cur = p_next;
        pn = p_cur;
      }
      const double jd = sph_bessel_j_deriv(tr, n, x_r);
      const cplx hd = sph_hankel1_deriv(tr, n, x_r);
      const cplx alpha = finite(hd) ? cplx(jd) / hd : cplx(0.0, 0.0);
      const cplx radial = cplx(tp.j[n]) - alpha * table_h(tp, n);
      const cplx term = (2.0 * n + 1.0) * radial * src_factor * pn;
      if (!finite(term))
        throw std::runtime_error(
            "rs_hrtf_far: non-finite term at order " + std::to_string(n));
      sum += term;
      sum_abs += std::abs(term);
      if (n >= 2 && std::abs(term) <= ctl.term_tol * sum_abs) {
        if (++small_run >= 2) return normalize_series(k0, r_src, r_pt, sum);
      } else {
        small_run = 0;
      }
      src_factor *= cplx(0.0, -1.0);
    }
    if (target >= ctl.max_order)
      throw std::runtime_error(
          "rs_hrtf_far: series did not settle within " +
          std::to_string(ctl.max_order) + " terms");
    target = std::min(ctl.max_order, 2 * target);
  }
}

LoudspeakerFr ingest_fr_measurement(const std::string& speaker_id,
                                    std::span<const double> impulse_response,
                                    double source_rate,
                                    const FrequencyGrid& grid) {
  grid.validate();
  if (impulse_response.empty())
    throw std::invalid_argument("ingest_fr_measurement: empty measurement");
  if (!(source_rate > 0.0))
    throw std::invalid_argument("ingest_fr_measurement: bad sample rate");
  bool any = false;
  for (double v : impulse_response)
    if (v != 0.0) { any = true; break; }
  if (!any)
    throw std::invalid_argument(
        "ingest_fr_measurement: measurement is identically zero");

  std::vector<double> x;
  if (source_rate == grid.sample_rate) {
    x.assign(impulse_response.begin(), impulse_response.end());
  } else {
    // resample keeps sample values; a transfer function must keep its
    // discrete spectrum, which scales with the rate ratio.
    x = resample(impulse_response, source_rate, grid.sample_rate);
    const double s = source_rate / grid.sample_rate;
    for (double& v : x) v *= s;
  }

  std::size_t n = grid.n_fft;
  while (x.size() > n) n <<= 1;
  const std::vector<cplx> spec = real_spectrum(x, n);

  LoudspeakerFr fr;
  fr.speaker_id = speaker_id;
  fr.response.resize(grid.n_bins());
  const std::size_t stride = n / grid.n_fft;  // exact power-of-two ratio
  for (std::size_t i = 0; i < fr.response.size(); ++i)
    fr.response[i] = spec[i * stride];
  return fr;
}

FrMap synthetic_fr_map(const Scene& scene, const FrequencyGrid& grid) {
  grid.validate();
  FrMap frs;
  const double delay_s = 16.0 / grid.sample_rate;
  for (std::size_t l = 0; l < scene.speakers.size(); ++l) {
    const Loudspeaker& spk = scene.speakers[l];
    LoudspeakerFr fr;
    fr.speaker_id = spk.fr_id;
    fr.response.resize(grid.n_bins());
    // Deterministic per-speaker ripple phase, spread by the golden ratio.
    const double phase0 =
        2.0 * kPi * std::fmod(0.6180339887498949 * (l + 1), 1.0);
    fr.response[0] = cplx(0.0, 0.0);  // high-pass kills DC
    for (std::size_t b = 1; b < fr.response.size(); ++b) {
      const double f = grid.freq_hz(b);
      const double r = f / spk.f_lo;
      // Second-order Butterworth high-pass, s = i f / f_lo.
      const cplx s(0.0, r);
      const cplx hp = (s * s) / (s * s + std::sqrt(2.0) * s + cplx(1.0, 0.0));
      // +/-1.5 dB ripple, one cycle per three octaves.
      const double rip_db =
          1.5 * std::sin(2.0 * kPi * std::log2(r) / 3.0 + phase0);
      const double gain = std::pow(10.0, rip_db / 20.0);
      const cplx lat = std::polar(1.0, -grid.omega(b) * delay_s);
      fr.response[b] = hp * gain * lat;
    }
    frs.emplace(l, std::move(fr));
  }
  return frs;
}

AtfSet build_atf_set(const Scene& scene, Stage stage, const FrMap& frs,
                     const FrequencyGrid& grid, const SeriesControl& ctl,
                     Exec exec) {
  return build_atf_set_layers(scene, stage, layers_for(stage), frs, grid, ctl,
                              exec);
}

AtfSet build_atf_set_layers(const Scene& scene, Stage stage_label,
                            StageLayers layers, const FrMap& frs,
                            const FrequencyGrid& grid,
                            const SeriesControl& ctl, Exec exec) {
  scene.validate();
  grid.validate();
  if (static_cast<std::size_t>(scene.room.rir_length) > grid.n_fft)
    throw std::invalid_argument(
        "build_atf_set: rir_length exceeds n_fft; shorten the response or "
        "enlarge the grid");
  for (std::size_t k = 1; k < scene.listeners.size(); ++k)
    if (scene.listeners[k].points_per_ear !=
        scene.listeners[0].points_per_ear)
      throw std::invalid_argument(
          "build_atf_set: listeners must share points_per_ear");
  if (layers.fr) {
    std::string missing;
    for (std::size_t l = 0; l < scene.speakers.size(); ++l) {
      auto it = frs.find(l);
      if (it == frs.end()) {
        missing += (missing.empty() ? "" : ", ") + std::to_string(l);
        continue;
      }
      if (it->second.response.size() != grid.n_bins())
        throw std::invalid_argument(
            "build_atf_set: frequency response for speaker " +
            std::to_string(l) + " has the wrong bin count");
    }
    if (!missing.empty())
      throw std::invalid_argument(
          "build_atf_set: missing frequency response for speaker(s) " +
          missing);
  }

  const std::vector<ControlPoint> cps = scene_control_points(scene);
  AtfSet atf;
  atf.stage = stage_label;
  atf.grid = grid;
  atf.listeners = scene.listeners.size();
  atf.ears = 2;
  atf.points = static_cast<std::size_t>(scene.listeners[0].points_per_ear);
  atf.speakers = scene.speakers.size();
  atf.scene_digest = scene.digest();
  atf.h.assign(atf.listeners * atf.ears * atf.points * atf.speakers *
                   grid.n_bins(),
               cplx(0.0, 0.0));

  const std::size_t n_speakers = atf.speakers;
  const std::size_t nb = grid.n_bins();
  const std::int64_t n_tuples =
      static_cast<std::int64_t>(cps.size() * n_speakers);

  for_each_index(n_tuples, exec, [&](std::int64_t t) {
    const ControlPoint& cp = cps[static_cast<std::size_t>(t) / n_speakers];
    const std::size_t l = static_cast<std::size_t>(t) % n_speakers;
    const Loudspeaker& spk = scene.speakers[l];
    const Listener& head = scene.listeners[cp.listener];
    try {
      const DecomposedRir rir =
          simulate_rir(scene.room, spk.position, cp.position,
                       scene.speed_of_sound, scene.sample_rate);
      const auto [h_dir, h_refl] = fft_components(rir, grid);
      const double theta = off_axis_angle(spk, cp.position);
      const Vec3 r_src = spk.position - head.head_center;
      const Vec3 r_pt = cp.position - head.head_center;
      const LoudspeakerFr* fr = layers.fr ? &frs.at(l) : nullptr;
      const std::size_t base =
          atf.index(cp.listener, static_cast<std::size_t>(cp.ear), cp.point,
                    l, 0);
      for (std::size_t b = 0; b < nb; ++b) {
        cplx v = h_dir[b];
        if (layers.dir)
          v *= piston_directivity(grid.omega(b), theta, spk.piston_radius,
                                  scene.speed_of_sound);
        if (layers.hrtf && b > 0)
          v *= rs_hrtf(grid.omega(b), r_src, r_pt, head.head_radius,
                       scene.speed_of_sound, ctl);
        v += h_refl[b];
        if (layers.fr) v *= fr->response[b];
        atf.h[base + b] = v;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(
          std::string("build_atf_set: stage ") + stage_name(stage_label) +
          " tuple (listener=" + std::to_string(cp.listener) +
          ", ear=" + std::to_string(static_cast<int>(cp.ear)) +
          ", point=" + std::to_string(cp.point) +
          ", speaker=" + std::to_string(l) + "): " + e.what());
    }
  });
  return atf;
}

}  // namespace pszkit
