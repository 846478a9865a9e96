#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vista/video.hpp"

namespace vista::eval {

/// ||P_E(imputed - truth)||_F / ||P_E(truth)||_F in percent, E = eval mask.
double rse(const Matrix& truth, const Matrix& imputed, const Mask& eval_mask);

/// Mean squared residual over the eval mask.
double mse(const Matrix& truth, const Matrix& imputed, const Mask& eval_mask);

struct ModelResult {
  std::string name;
  std::vector<Matrix> frames;
};

struct Interval {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Mean with a 95% normal-approximation interval (1.96 sample standard
/// errors). A single sample yields a zero-width interval.
Interval mean_interval(std::span<const double> values);

struct ModelRow {
  std::string name;
  std::vector<double> rse_pct;
  std::vector<double> mse;
  double mean_rse_pct = 0.0;
  double mean_mse = 0.0;
  /// RSE_t(baseline) - RSE_t(model).
  std::vector<double> margin;
  Interval margin_summary;
  /// Frames with a strictly lower RSE than the baseline.
  std::size_t better_than_baseline = 0;
  /// Frames with a strictly higher RSE than the full model.
  std::size_t worse_than_full = 0;
};

struct EvalReport {
  std::string baseline;
  std::string full;
  std::size_t frames = 0;
  std::vector<ModelRow> rows;

  const ModelRow& row(const std::string& name) const;
};

/// Scores every model on the same truth and per-frame eval masks.
/// `baseline` and `full` name rows of `results`; an empty `full` disables
/// the worse-than-full counts.
EvalReport compare_models(std::span<const ModelResult> results,
                          std::span<const Matrix> truth,
                          std::span<const Mask> eval_masks,
                          const std::string& baseline = "soft",
                          const std::string& full = "full");

/// model,t,rse_pct,mse
void write_per_frame_csv(std::ostream& out, const EvalReport& report);

/// One row per model with means, margin interval and win counts.
void write_summary_csv(std::ostream& out, const EvalReport& report);

}  // namespace vista::eval
