#include "pszkit/cli_commands.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "pszkit/io.hpp"

namespace pszkit {

namespace fs = std::filesystem;

RunConfig resolve_config(const CliOptions& opt) {
  RunConfig cfg;
  if (!opt.config_path.empty()) cfg = load_config_file(opt.config_path);

  if (!opt.stages.empty()) cfg.design_stages = parse_stage_list(opt.stages);
  if (!opt.eval_stage.empty()) cfg.eval_stage = stage_from_name(opt.eval_stage);
  if (opt.lambda) cfg.lambda_rel = *opt.lambda;
  if (opt.sample_rate) cfg.scene_params.sample_rate = *opt.sample_rate;
  if (opt.n_fft) cfg.n_fft = *opt.n_fft;
  if (opt.filter_length) cfg.filter_length = *opt.filter_length;
  if (opt.epsilon) cfg.epsilon = *opt.epsilon;
  if (opt.synthetic_fr) cfg.synthetic_fr = *opt.synthetic_fr;
  if (!opt.fr_dir.empty()) cfg.fr_dir = opt.fr_dir;
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (!opt.plan_id.empty()) cfg.plan_id = opt.plan_id;
  return cfg;
}

FrMap load_fr_directory(const Scene& scene, const FrequencyGrid& grid,
                        const std::string& dir) {
  if (!fs::is_directory(dir))
    throw std::invalid_argument(
        "frequency-response directory does not exist: " + dir);
  FrMap frs;
  std::string missing;
  for (std::size_t l = 0; l < scene.speakers.size(); ++l) {
    const std::string& id = scene.speakers[l].fr_id;
    fs::path path = fs::path(dir) / (id + ".wav");
    if (!fs::exists(path)) path = fs::path(dir) / (id + ".txt");
    if (!fs::exists(path)) {
      missing += (missing.empty() ? "" : ", ") + id;
      continue;
    }
    const auto [samples, rate] = load_impulse_response(path);
    frs.emplace(l, ingest_fr_measurement(id, samples, rate, grid));
  }
  if (!missing.empty())
    throw std::invalid_argument(
        "no measurement (<id>.wav or <id>.txt) found in " + dir +
        " for speaker(s): " + missing);
  return frs;
}

namespace {

Exec exec_mode(const CliOptions& opt) {
  return opt.serial ? Exec::serial : Exec::parallel;
}

// FR measurements for the plan: explicit directory wins, otherwise the
// synthesized responses (when enabled and any stage needs them).
void attach_frs(AblationPlan& plan, const RunConfig& cfg) {
  if (!cfg.fr_dir.empty()) {
    plan.frs = load_fr_directory(plan.scene, plan.grid, cfg.fr_dir);
    plan.synthetic_fr = false;
  }
}

void print_report(const AblationReport& report) {
  std::printf("stage  listener     izi_db     ipi_db     xtc_db\n");
  for (const ReportRow& r : report.rows)
    std::printf("%-5s  %8zu  %9.3f  %9.3f  %9.3f\n", stage_name(r.stage),
                r.listener, r.izi_db, r.ipi_db, r.xtc_db);
  if (!report.deltas.empty()) {
    std::printf("step        component   listener   d_izi_db   d_ipi_db   "
                "d_xtc_db\n");
    for (const DeltaRow& d : report.deltas)
      std::printf("%s->%s    %-10s  %8zu  %9.3f  %9.3f  %9.3f\n",
                  stage_name(d.from), stage_name(d.to), d.component.c_str(),
                  d.listener, d.d_izi_db, d.d_ipi_db, d.d_xtc_db);
  }
}

}  // namespace

int cmd_simulate_atf(const CliOptions& opt) {
  const RunConfig cfg = resolve_config(opt);
  const Scene scene = cfg.build_scene();
  const FrequencyGrid grid = cfg.build_grid();

  FrMap frs;
  bool need_fr = false;
  for (Stage s : cfg.design_stages)
    need_fr = need_fr || (layers_for(s).fr && cfg.enable_fr);
  if (need_fr) {
    if (!cfg.fr_dir.empty())
      frs = load_fr_directory(scene, grid, cfg.fr_dir);
    else if (cfg.synthetic_fr)
      frs = synthetic_fr_map(scene, grid);
    else
      throw std::invalid_argument(
          "stages beyond C0 need loudspeaker responses: give --fr-dir or "
          "enable synthetic_fr");
  }

  const DirLock lock(cfg.out_dir);
  for (Stage s : cfg.design_stages) {
    const AtfSet atf =
        build_atf_set(scene, s, frs, grid, cfg.series, exec_mode(opt));
    const fs::path path =
        fs::path(cfg.out_dir) /
        (cfg.plan_id + "_atf_" + stage_name(s) + ".txt");
    save_atf_archive(atf, path);
    std::printf("wrote %s (%zu tuples x %zu bins)\n", path.c_str(),
                atf.listeners * atf.ears * atf.points * atf.speakers,
                atf.grid.n_bins());
  }
  return 0;
}

int cmd_design(const CliOptions& opt) {
  if (opt.atf_path.empty())
    throw std::invalid_argument("design requires --atf <archive>");
  const RunConfig cfg = resolve_config(opt);
  const Scene scene = cfg.build_scene();
  const AtfSet atf = load_atf_archive(opt.atf_path);
  if (atf.scene_digest != scene.digest())
    throw std::invalid_argument(
        "archive " + opt.atf_path +
        " was built for a different scene (digest mismatch); pass the "
        "matching --scene config");

  const FilterBank bank =
      design_pressure_matching(atf, cfg.build_design(scene), exec_mode(opt));

  const DirLock lock(cfg.out_dir);
  const fs::path path =
      fs::path(cfg.out_dir) /
      (cfg.plan_id + "_bank_" + stage_name(atf.stage) + ".txt");
  save_filter_bank(bank, path);
  std::printf("wrote %s (%zu speakers x %zu programs x %zu taps)\n",
              path.c_str(), bank.speakers, bank.programs, bank.taps);
  return 0;
}

int cmd_ablate(const CliOptions& opt) {
  const RunConfig cfg = resolve_config(opt);
  AblationPlan plan = cfg.build_plan();
  attach_frs(plan, cfg);

  const DirLock lock(cfg.out_dir);
  const AblationReport report = run_ablation(plan, exec_mode(opt));
  emit_report(report, cfg.out_dir, ReportFormat::csv);
  emit_report(report, cfg.out_dir, ReportFormat::json);
  print_report(report);
  std::printf("reports written to %s\n", cfg.out_dir.c_str());
  return 0;
}

}  // namespace pszkit
