#pragma once

// Acoustic transfer function synthesis: combines room simulation, loudspeaker
// frequency response, piston directivity, and rigid-sphere head scattering
// into per-(listener, ear, point, speaker) transfer spectra.  The model
// layers accumulate across stages C0..C3:
//   C0  room impulse response only
//   C1  + measured/synthesized loudspeaker frequency response
//   C2  + piston directivity on the direct path
//   C3  + rigid-sphere scattering on the direct path
// Directivity and scattering multiply only the direct component; the
// reflected field stays diffuse.

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pszkit/geometry.hpp"
#include "pszkit/parallel.hpp"
#include "pszkit/room.hpp"
#include "pszkit/specfun.hpp"

namespace pszkit {

struct FrequencyGrid {
  double sample_rate = 48000.0;
  std::size_t n_fft = 16384;

  std::size_t n_bins() const { return n_fft / 2 + 1; }
  double freq_hz(std::size_t bin) const {
    return sample_rate * static_cast<double>(bin) /
           static_cast<double>(n_fft);
  }
  double omega(std::size_t bin) const;
  void validate() const;  // throws std::invalid_argument
};

enum class Stage { C0 = 0, C1 = 1, C2 = 2, C3 = 3 };

const char* stage_name(Stage s);
Stage stage_from_name(const std::string& name);  // throws on unknown name

// Which model layers are active.  Stage collapse is exact by construction:
// a disabled layer skips its multiplication entirely rather than multiplying
// by one, so all-disabled reproduces the C0 arithmetic bit for bit.
struct StageLayers {
  bool fr = false;
  bool dir = false;
  bool hrtf = false;
};
StageLayers layers_for(Stage s);

// Single-sided loudspeaker frequency response on the analysis grid.
struct LoudspeakerFr {
  std::string speaker_id;
  std::vector<cplx> response;  // n_bins() entries
};

using FrMap = std::map<std::size_t, LoudspeakerFr>;  // keyed by speaker index

// Transfer spectra, indexed (listener, ear, point, speaker, bin).
struct AtfSet {
  Stage stage = Stage::C0;
  FrequencyGrid grid;
  std::size_t listeners = 0;
  std::size_t ears = 2;
  std::size_t points = 0;
  std::size_t speakers = 0;
  std::uint64_t scene_digest = 0;
  std::vector<cplx> h;

  std::size_t index(std::size_t k, std::size_t e, std::size_t m,
                    std::size_t l, std::size_t bin) const {
    return (((k * ears + e) * points + m) * speakers + l) * grid.n_bins() +
           bin;
  }
  cplx& at(std::size_t k, std::size_t e, std::size_t m, std::size_t l,
           std::size_t bin) {
    return h[index(k, e, m, l, bin)];
  }
  const cplx& at(std::size_t k, std::size_t e, std::size_t m, std::size_t l,
                 std::size_t bin) const {
    return h[index(k, e, m, l, bin)];
  }
};

// Direct and reflected spectra of a decomposed impulse response.
// Requires rir length <= n_fft.
std::pair<std::vector<cplx>, std::vector<cplx>> fft_components(
    const DecomposedRir& rir, const FrequencyGrid& grid);

// Baffled rigid-piston directivity 2 J1(ka sin th) / (ka sin th); exactly 1
// on axis and in the ka sin th -> 0 limit.  Signed: sidelobes go negative.
double piston_directivity(double omega, double theta_rad, double piston_radius,
                          double speed_of_sound);

// Raw scattering series sum_n (2n+1) S_n P_n(cos gamma) with
//   S_n = j_n(k r_min) h_n(k r_max) - alpha_n(k R) h_n(k r_src) h_n(k r_pt).
// with_scattering=false drops the alpha term (free field).  Throws
// std::runtime_error if the series has not settled by max_order or a term
// is non-finite.
cplx sphere_series(double k0, double r_src, double r_pt, double cos_gamma,
                   double sphere_radius, const SeriesControl& ctl,
                   bool with_scattering);

// Rigid-sphere head-related transfer factor for a point source at r_src and
// a surface/near-surface point r_pt (positions relative to the head center),
// normalized by the free-field Green's function between the same two
// locations; tends to 1 as the sphere radius' effect vanishes.
cplx rs_hrtf(double omega, const Vec3& r_src, const Vec3& r_pt,
             double sphere_radius, double speed_of_sound,
             const SeriesControl& ctl);

// Far-source variant replacing the source-side Hankel factor with its
// large-argument asymptotic form; cheaper and accurate once the source is
// many wavelengths away.
cplx rs_hrtf_far(double omega, const Vec3& r_src, const Vec3& r_pt,
                 double sphere_radius, double speed_of_sound,
                 const SeriesControl& ctl);

// Resamples a measured loudspeaker impulse response onto the analysis grid
// and returns its single-sided spectrum.
LoudspeakerFr ingest_fr_measurement(const std::string& speaker_id,
                                    std::span<const double> impulse_response,
                                    double source_rate,
                                    const FrequencyGrid& grid);

// Synthesized stand-in response: second-order high-pass at the speaker's
// band edge plus a gentle log-periodic ripple (+/-1.5 dB) and a small
// propagation-style delay, so every speaker gets a plausible, deterministic
// response without measurement data.
FrMap synthetic_fr_map(const Scene& scene, const FrequencyGrid& grid);

// Builds the transfer set for every (listener, ear, point, speaker) tuple.
// frs may be empty unless the stage includes the FR layer.  Errors from the
// per-tuple model are annotated with the stage and tuple indices.
AtfSet build_atf_set(const Scene& scene, Stage stage, const FrMap& frs,
                     const FrequencyGrid& grid, const SeriesControl& ctl,
                     Exec exec = Exec::parallel);

// Same, with explicit layer toggles (the stage argument is only a label).
AtfSet build_atf_set_layers(const Scene& scene, Stage stage_label,
                            StageLayers layers, const FrMap& frs,
                            const FrequencyGrid& grid,
                            const SeriesControl& ctl,
                            Exec exec = Exec::parallel);

}  // namespace pszkit
