#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vista/run_config.hpp"
#include "vista/solver.hpp"
#include "vista/transform.hpp"

namespace vista::cli {

struct PipelineOptions {
  double boxcox_lambda = 0.5;
  double boxcox_offset = 1e-3;
  bool keep_observed = false;
};

struct PipelineOutput {
  /// Imputation in the original data scale.
  std::vector<Matrix> imputed;
  std::vector<Eigen::Index> effective_ranks;
  SolverState state;
  transform::TransformParams params;
  /// Entries clamped during inversion.
  std::size_t clamped = 0;
};

/// Transform -> solve -> invert. `raw_auxiliary` is read only when the
/// penalty has lambda3 > 0.
PipelineOutput run_pipeline(const MaskedVideo& video,
                            const AuxiliaryVideo* raw_auxiliary,
                            const PenaltyConfig& penalty,
                            const PipelineOptions& options);

PipelineOptions pipeline_options(const RunConfig& cfg);

/// Spherical-harmonic auxiliary video on the regular grid of the frame size.
AuxiliaryVideo sh_auxiliary(const MaskedVideo& video, int l_max, double v);

/// Writes a fully observed smooth test video (truth.vmc) and manifest.txt.
void cmd_synthesize(const RunConfig& cfg, std::ostream& log);

/// Imposes a missingness pattern on a complete video.
/// Writes masked.vmc, truth.vmc, dropped.vmc and manifest.txt.
void cmd_simulate(const RunConfig& cfg, std::ostream& log);

/// Runs one model on a masked video (optionally after a random holdout).
/// Writes imputed.vmc, diagnostics.csv, frame_change.csv, manifest.txt, and
/// auxiliary.vmc / test_mask.vmc when those are produced.
void cmd_impute(const RunConfig& cfg, std::ostream& log);

/// Scores "name=path" results against a truth video on an eval mask.
/// Writes per_frame.csv, summary.csv and margins.csv.
void cmd_evaluate(const RunConfig& cfg, std::ostream& log);

/// Simulate + four models + direct SH for every missingness level.
void cmd_experiment(const RunConfig& cfg, std::ostream& log);

struct GridPoint {
  int stage = 0;
  LambdaTriple lambdas;
  double rse_pct = 0.0;
};

struct GridSearchResult {
  LambdaTriple best;
  std::vector<GridPoint> points;
};

/// Two-stage search: lambda1 with lambda2 = lambda3 = 0, then lambda2 and
/// lambda3 separately at the best lambda1. Scores are mean per-frame test
/// RSE on `test` pixels of `truth`.
GridSearchResult grid_search(const MaskedVideo& train,
                             const std::vector<Mask>& test,
                             const MaskedVideo& truth, const RunConfig& cfg);

/// Holdout + grid_search. Writes grid.csv and manifest.txt.
void cmd_gridsearch(const RunConfig& cfg, std::ostream& log);

/// Box-Cox log-likelihood over a coarse lambda grid. Writes boxcox_scan.csv.
void cmd_boxcox_scan(const RunConfig& cfg, std::ostream& log);

}  // namespace vista::cli
