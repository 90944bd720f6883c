#pragma once

// Run configuration: one INI-style text file with sections mirroring the
// pipeline modules ([geometry], [room], [atf], [filters], [metrics],
// [ablation]).  Unknown sections or keys are rejected with the offending
// line number; command-line flags override file values.

#include <filesystem>
#include <string>
#include <vector>

#include "pszkit/ablation.hpp"
#include "pszkit/geometry.hpp"

namespace pszkit {

struct RunConfig {
  SceneParams scene_params;

  std::size_t n_fft = 16384;
  SeriesControl series;

  double lambda_rel = 1e-3;
  std::size_t filter_length = 4096;
  // < 0 => filter_length / 2.
  long modeling_delay = -1;
  std::size_t taper_len = 32;

  double epsilon = 0.0;  // 0 => derived floor

  std::vector<Stage> design_stages{Stage::C0, Stage::C1, Stage::C2,
                                   Stage::C3};
  Stage eval_stage = Stage::C3;
  std::string plan_id = "ablation";
  bool synthetic_fr = true;
  bool enable_fr = true;
  bool enable_dir = true;
  bool enable_hrtf = true;

  std::string fr_dir;   // directory of <fr_id>.wav / <fr_id>.txt measurements
  std::string out_dir = "out";

  Scene build_scene() const { return make_scene(scene_params); }
  FrequencyGrid build_grid() const {
    return {scene_params.sample_rate, n_fft};
  }
  DesignConfig build_design(const Scene& scene) const;
  AblationPlan build_plan() const;  // without FR measurements loaded
};

// Parses "stages" syntax like "C0,C1,C3".
std::vector<Stage> parse_stage_list(const std::string& text);

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin);
RunConfig load_config_file(const std::filesystem::path& path);

}  // namespace pszkit
