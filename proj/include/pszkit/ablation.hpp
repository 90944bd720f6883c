#pragma once

// Cumulative ablation over the model stages: design filters against each
// stage's transfer model, evaluate every design against one fixed evaluation
// model, and report per-stage metrics plus stage-to-stage deltas.

#include <cstdint>
#include <string>
#include <vector>

#include "pszkit/atf.hpp"
#include "pszkit/filters.hpp"
#include "pszkit/metrics.hpp"

namespace pszkit {

struct AblationPlan {
  Scene scene;
  std::vector<Stage> design_stages{Stage::C0, Stage::C1, Stage::C2, Stage::C3};
  Stage eval_stage = Stage::C3;
  FrequencyGrid grid;
  DesignConfig design;       // speaker_bands filled from the scene if empty
  SeriesControl series;
  double epsilon = 0.0;      // 0 => default floor from the evaluated fields

  // Loudspeaker responses for the FR layer; when empty and synthetic_fr is
  // set they are synthesized from the scene.
  FrMap frs;
  bool synthetic_fr = true;

  // Layer toggles applied on top of each stage's layer set (both design and
  // evaluation).  Disabling all of them collapses every stage to C0.
  bool enable_fr = true;
  bool enable_dir = true;
  bool enable_hrtf = true;

  std::string plan_id = "ablation";

  void validate() const;
};

struct ReportRow {
  Stage stage = Stage::C0;
  std::size_t listener = 0;
  double izi_db = 0.0;
  double ipi_db = 0.0;
  double xtc_db = 0.0;
};

// Change between consecutive design stages; component names the model layer
// introduced by the step.
struct DeltaRow {
  Stage from = Stage::C0;
  Stage to = Stage::C1;
  std::string component;
  std::size_t listener = 0;
  double d_izi_db = 0.0;
  double d_ipi_db = 0.0;
  double d_xtc_db = 0.0;
};

struct CurveSet {
  Stage stage = Stage::C0;
  std::size_t listener = 0;
  MetricCurve izi;
  MetricCurve ipi;
  MetricCurve xtc;
};

struct AblationReport {
  std::string plan_id;
  Stage eval_stage = Stage::C3;
  double epsilon = 0.0;
  double lambda_rel = 0.0;
  bool synthetic_fr = true;
  std::uint64_t scene_digest = 0;
  double sample_rate = 0.0;
  std::size_t n_fft = 0;
  std::vector<ReportRow> rows;      // (stage, listener) in plan order
  std::vector<DeltaRow> deltas;     // consecutive stage pairs
  std::vector<CurveSet> curves;
};

// Name of the model layer(s) a stage step introduces, e.g. "FR" for C0->C1
// or "DIR+RS-HRTF" for C1->C3.
std::string delta_component_name(Stage from, Stage to);

AblationReport run_ablation(const AblationPlan& plan,
                            Exec exec = Exec::parallel);

}  // namespace pszkit
