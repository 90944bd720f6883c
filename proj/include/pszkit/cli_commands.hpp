#pragma once

// Implementation of the command-line subcommands, kept in the library so the
// test suite can drive them end to end.

#include <optional>
#include <string>

#include "pszkit/config.hpp"

namespace pszkit {

struct CliOptions {
  std::string config_path;  // --scene: INI config (defaults when empty)
  std::string atf_path;     // --atf: archive input for `design`

  // Overrides applied on top of the config file.
  std::string stages;
  std::string eval_stage;
  std::optional<double> lambda;
  std::optional<double> sample_rate;
  std::optional<std::size_t> n_fft;
  std::optional<std::size_t> filter_length;
  std::optional<double> epsilon;
  std::optional<bool> synthetic_fr;
  std::string fr_dir;
  std::string out_dir;
  std::string plan_id;
  bool serial = false;  // run the serial reference kernels
};

// Config file + flag overrides -> effective run configuration.
RunConfig resolve_config(const CliOptions& opt);

// Loads <fr_id>.wav / <fr_id>.txt measurements for every speaker.
FrMap load_fr_directory(const Scene& scene, const FrequencyGrid& grid,
                        const std::string& dir);

// Subcommands; they throw on failure and return 0 on success.
int cmd_simulate_atf(const CliOptions& opt);
int cmd_design(const CliOptions& opt);
int cmd_ablate(const CliOptions& opt);

}  // namespace pszkit
