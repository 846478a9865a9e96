#include "vista/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace vista::eval {

namespace {

void check_shapes(const Matrix& truth, const Matrix& imputed,
                  const Mask& eval_mask) {
  if (truth.rows() != imputed.rows() || truth.cols() != imputed.cols() ||
      truth.rows() != eval_mask.rows() || truth.cols() != eval_mask.cols()) {
    throw DimensionError("truth, imputation and eval mask shapes differ");
  }
  if (!eval_mask.any()) throw std::invalid_argument("eval mask is empty");
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double rse(const Matrix& truth, const Matrix& imputed, const Mask& eval_mask) {
  check_shapes(truth, imputed, eval_mask);
  const double denom = eval_mask.select(truth, 0.0).norm();
  if (denom == 0.0) {
    throw std::domain_error("RSE undefined: truth is zero on the eval mask");
  }
  return 100.0 * eval_mask.select(imputed - truth, 0.0).norm() / denom;
}

double mse(const Matrix& truth, const Matrix& imputed, const Mask& eval_mask) {
  check_shapes(truth, imputed, eval_mask);
  return eval_mask.select(imputed - truth, 0.0).squaredNorm() /
         static_cast<double>(eval_mask.count());
}

Interval mean_interval(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("no values to summarize");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  Interval out;
  out.mean = sum / n;
  if (values.size() < 2) {
    out.low = out.high = out.mean;
    return out;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double half = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  out.low = out.mean - half;
  out.high = out.mean + half;
  return out;
}

const ModelRow& EvalReport::row(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("no model named '" + name + "' in the report");
}

EvalReport compare_models(std::span<const ModelResult> results,
                          std::span<const Matrix> truth,
                          std::span<const Mask> eval_masks,
                          const std::string& baseline,
                          const std::string& full) {
  if (truth.size() != eval_masks.size()) {
    throw DimensionError("truth has " + std::to_string(truth.size()) +
                         " frames but there are " +
                         std::to_string(eval_masks.size()) + " eval masks");
  }
  EvalReport report;
  report.baseline = baseline;
  report.full = full;
  report.frames = truth.size();
  for (const auto& result : results) {
    if (result.frames.size() != truth.size()) {
      throw DimensionError("model '" + result.name + "' has " +
                           std::to_string(result.frames.size()) +
                           " frames, expected " + std::to_string(truth.size()));
    }
    ModelRow row;
    row.name = result.name;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      row.rse_pct.push_back(rse(truth[t], result.frames[t], eval_masks[t]));
      row.mse.push_back(mse(truth[t], result.frames[t], eval_masks[t]));
    }
    row.mean_rse_pct = mean_interval(row.rse_pct).mean;
    row.mean_mse = mean_interval(row.mse).mean;
    report.rows.push_back(std::move(row));
  }

  const ModelRow& base = report.row(baseline);
  const std::vector<double> base_rse = base.rse_pct;
  const ModelRow* full_row = nullptr;
  if (!full.empty()) full_row = &report.row(full);
  const std::vector<double> full_rse =
      full_row != nullptr ? full_row->rse_pct : std::vector<double>{};

  for (auto& row : report.rows) {
    row.margin.resize(report.frames);
    for (std::size_t t = 0; t < report.frames; ++t) {
      row.margin[t] = base_rse[t] - row.rse_pct[t];
      if (row.rse_pct[t] < base_rse[t]) ++row.better_than_baseline;
      if (!full_rse.empty() && row.rse_pct[t] > full_rse[t]) {
        ++row.worse_than_full;
      }
    }
    row.margin_summary = mean_interval(row.margin);
  }
  return report;
}

void write_per_frame_csv(std::ostream& out, const EvalReport& report) {
  out << "model,t,rse_pct,mse\n";
  for (const auto& row : report.rows) {
    for (std::size_t t = 0; t < report.frames; ++t) {
      out << row.name << ',' << t << ',' << format(row.rse_pct[t]) << ','
          << format(row.mse[t]) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const EvalReport& report) {
  out << "model,mean_rse_pct,mean_mse,better_than_" << report.baseline
      << ",worse_than_" << (report.full.empty() ? "full" : report.full)
      << ",margin_mean,margin_ci_low,margin_ci_high\n";
  for (const auto& row : report.rows) {
    out << row.name << ',' << format(row.mean_rse_pct) << ','
        << format(row.mean_mse) << ',' << row.better_than_baseline << ','
        << row.worse_than_full << ',' << format(row.margin_summary.mean) << ','
        << format(row.margin_summary.low) << ','
        << format(row.margin_summary.high) << '\n';
  }
}

}  // namespace vista::eval
