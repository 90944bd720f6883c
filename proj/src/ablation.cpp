#include "pszkit/ablation.hpp"

#include <stdexcept>

namespace pszkit {

void AblationPlan::validate() const {
  scene.validate();
  grid.validate();
  if (design_stages.empty())
    throw std::invalid_argument("AblationPlan: no design stages given");
  for (std::size_t i = 1; i < design_stages.size(); ++i)
    if (static_cast<int>(design_stages[i]) <=
        static_cast<int>(design_stages[i - 1]))
      throw std::invalid_argument(
          "AblationPlan: design stages must be strictly ascending");
  if (epsilon < 0.0)
    throw std::invalid_argument("AblationPlan: epsilon must be >= 0");
}

std::string delta_component_name(Stage from, Stage to) {
  const StageLayers a = layers_for(from);
  const StageLayers b = layers_for(to);
  std::string name;
  auto add = [&name](const char* part) {
    if (!name.empty()) name += '+';
    name += part;
  };
  if (b.fr && !a.fr) add("FR");
  if (b.dir && !a.dir) add("DIR");
  if (b.hrtf && !a.hrtf) add("RS-HRTF");
  if (name.empty()) name = "NONE";
  return name;
}

AblationReport run_ablation(const AblationPlan& plan, Exec exec) {
  plan.validate();

  DesignConfig cfg = plan.design;
  if (cfg.speaker_bands.empty())
    cfg.speaker_bands = DesignConfig::for_scene(plan.scene).speaker_bands;
  cfg.validate(plan.grid, plan.scene.speakers.size());

  auto effective = [&plan](Stage s) {
    StageLayers ly = layers_for(s);
    ly.fr = ly.fr && plan.enable_fr;
    ly.dir = ly.dir && plan.enable_dir;
    ly.hrtf = ly.hrtf && plan.enable_hrtf;
    return ly;
  };

  bool need_fr = effective(plan.eval_stage).fr;
  for (Stage s : plan.design_stages) need_fr = need_fr || effective(s).fr;

  FrMap frs = plan.frs;
  const bool used_synthetic = need_fr && frs.empty() && plan.synthetic_fr;
  if (used_synthetic) frs = synthetic_fr_map(plan.scene, plan.grid);

  // One fixed evaluation model, one point per ear.
  Scene eval_scene = plan.scene;
  for (Listener& l : eval_scene.listeners) l.points_per_ear = 1;
  const AtfSet eval_atf =
      build_atf_set_layers(eval_scene, plan.eval_stage,
                           effective(plan.eval_stage), frs, plan.grid,
                           plan.series, exec);

  std::vector<ProgramPressures> pressures;
  pressures.reserve(plan.design_stages.size());
  for (Stage s : plan.design_stages) {
    const AtfSet design_atf = build_atf_set_layers(
        plan.scene, s, effective(s), frs, plan.grid, plan.series, exec);
    const FilterBank bank = design_pressure_matching(design_atf, cfg, exec);
    pressures.push_back(program_pressures(bank, eval_atf, exec));
  }

  double eps = plan.epsilon;
  if (eps == 0.0) {
    for (const ProgramPressures& pp : pressures)
      eps = std::max(eps, default_metric_epsilon(pp));
    if (eps == 0.0)
      throw std::runtime_error(
          "run_ablation: evaluated fields are identically zero; cannot "
          "derive a metric floor");
  }

  AblationReport report;
  report.plan_id = plan.plan_id;
  report.eval_stage = plan.eval_stage;
  report.epsilon = eps;
  report.lambda_rel = cfg.lambda_rel;
  report.synthetic_fr = used_synthetic;
  report.scene_digest = plan.scene.digest();
  report.sample_rate = plan.grid.sample_rate;
  report.n_fft = plan.grid.n_fft;

  const std::size_t n_k = plan.scene.listeners.size();
  for (std::size_t i = 0; i < plan.design_stages.size(); ++i) {
    for (std::size_t k = 0; k < n_k; ++k) {
      CurveSet cs;
      cs.stage = plan.design_stages[i];
      cs.listener = k;
      cs.izi = izi_curve(pressures[i], k, eps);
      cs.ipi = ipi_curve(pressures[i], k, eps);
      cs.xtc = xtc_curve(pressures[i], k, eps);

      ReportRow row;
      row.stage = cs.stage;
      row.listener = k;
      row.izi_db = broadband_mean(cs.izi);
      row.ipi_db = broadband_mean(cs.ipi);
      row.xtc_db = broadband_mean(cs.xtc);
      report.rows.push_back(row);
      report.curves.push_back(std::move(cs));
    }
  }

  for (std::size_t i = 1; i < plan.design_stages.size(); ++i)
    for (std::size_t k = 0; k < n_k; ++k) {
      const ReportRow& prev = report.rows[(i - 1) * n_k + k];
      const ReportRow& cur = report.rows[i * n_k + k];
      DeltaRow d;
      d.from = plan.design_stages[i - 1];
      d.to = plan.design_stages[i];
      d.component = delta_component_name(d.from, d.to);
      d.listener = k;
      d.d_izi_db = cur.izi_db - prev.izi_db;
      d.d_ipi_db = cur.ipi_db - prev.ipi_db;
      d.d_xtc_db = cur.xtc_db - prev.xtc_db;
      report.deltas.push_back(d);
    }
  return report;
}

}  // namespace pszkit
