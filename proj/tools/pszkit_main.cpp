// Command-line front end: personal-sound-zone simulation, filter design,
// and the stage-ablation study.

#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "pszkit/cli_commands.hpp"

namespace {

void add_common_flags(CLI::App* cmd, pszkit::CliOptions& opt) {
  cmd->add_option("--scene", opt.config_path,
                  "INI config describing the scene and run parameters");
  cmd->add_option("--stages", opt.stages,
                  "comma-separated design stages, e.g. C0,C1,C2,C3");
  cmd->add_option("--eval-stage", opt.eval_stage,
                  "evaluation model stage (default C3)");
  cmd->add_option("--lambda", opt.lambda, "relative regularization weight");
  cmd->add_option("--fs", opt.sample_rate, "sample rate in Hz");
  cmd->add_option("--nfft", opt.n_fft, "FFT size (power of two)");
  cmd->add_option("--filter-length", opt.filter_length,
                  "FIR taps per control filter (<= nfft)");
  cmd->add_option("--epsilon", opt.epsilon,
                  "metric denominator floor (0 = derived)");
  cmd->add_option("--fr-dir", opt.fr_dir,
                  "directory of loudspeaker measurements (<id>.wav|.txt)");
  cmd->add_option("--synthetic-fr", opt.synthetic_fr,
                  "synthesize loudspeaker responses when none are given");
  cmd->add_option("--out", opt.out_dir, "output directory (default: out)");
  cmd->add_option("--plan-id", opt.plan_id, "basename for output files");
  cmd->add_flag("--serial", opt.serial,
                "run the serial reference kernels instead of OpenMP");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"personal sound zone toolkit"};
  app.require_subcommand(1);

  pszkit::CliOptions sim_opt, design_opt, ablate_opt;

  CLI::App* sim = app.add_subcommand(
      "simulate-atf", "simulate transfer functions and write archives");
  add_common_flags(sim, sim_opt);

  CLI::App* design = app.add_subcommand(
      "design", "design a filter bank from a transfer archive");
  add_common_flags(design, design_opt);
  design->add_option("--atf", design_opt.atf_path, "transfer archive input")
      ->required();

  CLI::App* ablate = app.add_subcommand(
      "ablate", "run the stage ablation and write reports");
  add_common_flags(ablate, ablate_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return pszkit::cmd_simulate_atf(sim_opt);
    if (design->parsed()) return pszkit::cmd_design(design_opt);
    if (ablate->parsed()) return pszkit::cmd_ablate(ablate_opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
