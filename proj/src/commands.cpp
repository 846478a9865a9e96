#include "vista/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "vista/evaluation.hpp"
#include "vista/io.hpp"
#include "vista/missingness.hpp"
#include "vista/spherical_harmonics.hpp"
#include "vista/synthetic.hpp"

namespace vista::cli {

namespace fs = std::filesystem;

namespace {

fs::path prepare_output(const RunConfig& cfg) {
  const fs::path dir = cfg.output_dir.empty() ? fs::path(".") : fs::path(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw std::invalid_argument(std::string("missing --") + flag);
}

std::ofstream open_text(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io::IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

sim::MissingnessSpec missingness_spec(const RunConfig& cfg, double fraction,
                                      std::size_t patch_size) {
  sim::MissingnessSpec spec;
  spec.pattern = sim::parse_pattern(cfg.pattern);
  spec.fraction = fraction;
  spec.patch_size = patch_size;
  spec.shift = cfg.shift;
  spec.seed = cfg.seed;
  return spec;
}

std::string level_label(const sim::MissingnessSpec& spec) {
  return sim::is_patch(spec.pattern) ? std::to_string(spec.patch_size)
                                     : io::format_double(spec.fraction);
}

void record_missingness(io::Manifest& m, const sim::SimulatedMissingness& sim,
                        const std::string& prefix) {
  m.set(prefix + "box.row_begin", sim.box.row_begin);
  m.set(prefix + "box.row_end", sim.box.row_end);
  m.set(prefix + "box.col_begin", sim.box.col_begin);
  m.set(prefix + "box.col_end", sim.box.col_end);
  std::size_t dropped = 0;
  for (const auto& d : sim.dropped) dropped += static_cast<std::size_t>(d.count());
  m.set(prefix + "dropped.total", dropped);
  for (std::size_t t = 0; t < sim.centres.size(); ++t) {
    m.set(prefix + "centre." + std::to_string(t),
          std::to_string(sim.centres[t].row) + "," + std::to_string(sim.centres[t].col));
  }
}

void write_diagnostics(const fs::path& dir, const SolverState& state) {
  auto out = open_text(dir / "diagnostics.csv");
  out << "sweep,objective,max_rel_change\n";
  for (std::size_t k = 0; k < state.objective_history.size(); ++k) {
    out << k << ',' << io::format_double(state.objective_history[k]) << ',';
    if (k > 0) out << io::format_double(state.max_change_history[k - 1]);
    out << '\n';
  }
  auto frames = open_text(dir / "frame_change.csv");
  frames << "t,rel_change\n";
  for (std::size_t t = 0; t < state.relative_change.size(); ++t) {
    frames << t << ',' << io::format_double(state.relative_change[t]) << '\n';
  }
}

void write_margins(std::ostream& out, const eval::EvalReport& report,
                   const std::string& pattern, const std::string& level) {
  for (const auto& row : report.rows) {
    if (row.name == report.baseline || row.name == "sh-direct") continue;
    out << row.name << ',' << pattern << ',' << level << ','
        << io::format_double(row.margin_summary.mean) << ','
        << io::format_double(row.margin_summary.low) << ','
        << io::format_double(row.margin_summary.high) << '\n';
  }
}

constexpr const char* kMarginsHeader = "model,pattern,level,margin_mean,ci_low,ci_high\n";

double mean_rse(const std::vector<Matrix>& imputed, const MaskedVideo& truth,
                const std::vector<Mask>& test) {
  double total = 0.0;
  for (std::size_t t = 0; t < imputed.size(); ++t) {
    total += eval::rse(truth.frame(t), imputed[t], test[t]);
  }
  return total / static_cast<double>(imputed.size());
}

}  // namespace

PipelineOptions pipeline_options(const RunConfig& cfg) {
  return {cfg.boxcox_lambda, cfg.boxcox_offset, cfg.keep_observed};
}

PipelineOutput run_pipeline(const MaskedVideo& video,
                            const AuxiliaryVideo* raw_auxiliary,
                            const PenaltyConfig& penalty,
                            const PipelineOptions& options) {
  const AuxiliaryVideo* aux = penalty.lambda3 > 0.0 ? raw_auxiliary : nullptr;
  if (penalty.lambda3 > 0.0 && aux == nullptr) {
    throw std::invalid_argument("lambda3 > 0 requires auxiliary data");
  }
  const auto data = transform::fit_transform(video, aux, options.boxcox_lambda,
                                             options.boxcox_offset);
  const VistaProblem problem(data.video,
                             data.auxiliary ? &*data.auxiliary : nullptr, penalty);
  auto solved = solve(problem);
  auto inverted = transform::invert(solved.imputed.frames, data.params);

  PipelineOutput out;
  out.imputed = std::move(inverted.frames);
  out.clamped = inverted.clamped;
  out.effective_ranks = std::move(solved.imputed.effective_ranks);
  out.state = std::move(solved.state);
  out.params = data.params;
  if (options.keep_observed) {
    for (std::size_t t = 0; t < video.num_frames(); ++t) {
      out.imputed[t] = video.mask(t).select(video.frame(t), out.imputed[t]);
    }
  }
  return out;
}

AuxiliaryVideo sh_auxiliary(const MaskedVideo& video, int l_max, double v) {
  return sh::build_auxiliary(
      video, sh::SphericalGrid::regular(video.rows(), video.cols()), l_max, v);
}

void cmd_synthesize(const RunConfig& cfg, std::ostream&) {
  const auto dir = prepare_output(cfg);
  sim::SyntheticSpec spec;
  spec.rows = cfg.rows;
  spec.cols = cfg.cols;
  spec.frames = cfg.frames;
  spec.noise_std = cfg.noise;
  spec.seed = cfg.seed;
  io::write_raw_video(dir / "truth.vmc", sim::make_synthetic_video(spec));
  io::Manifest manifest;
  manifest.set("command.name", "synthesize");
  cfg.record(manifest);
  manifest.write(dir / "manifest.txt");
}

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  require(cfg.input, "input");
  const auto dir = prepare_output(cfg);
  const auto truth = io::read_video(cfg.input);
  const auto spec = missingness_spec(cfg, cfg.fractions.at(0), cfg.patch_sizes.at(0));
  const auto notes = sim::validate(spec, truth.rows(), truth.cols());
  for (const auto& n : notes) log << "warning: " << n << '\n';

  const auto sim = sim::apply(truth, spec);
  io::write_video(dir / "masked.vmc", sim.video);
  io::write_video(dir / "truth.vmc", truth);
  io::write_masks(dir / "dropped.vmc", sim.dropped);

  io::Manifest manifest;
  manifest.set("command.name", "simulate");
  cfg.record(manifest);
  record_missingness(manifest, sim, "");
  for (std::size_t i = 0; i < notes.size(); ++i) {
    manifest.set("note." + std::to_string(i), notes[i]);
  }
  manifest.write(dir / "manifest.txt");
}

void cmd_impute(const RunConfig& cfg, std::ostream& log) {
  require(cfg.input, "input");
  const auto dir = prepare_output(cfg);
  const auto penalty = cfg.penalty();
  auto video = io::read_video(cfg.input);

  io::Manifest manifest;
  manifest.set("command.name", "impute");
  cfg.record(manifest);

  if (cfg.holdout > 0.0) {
    auto split = sim::holdout(video, cfg.holdout, cfg.seed);
    io::write_masks(dir / "test_mask.vmc", split.test);
    video = std::move(split.train);
  }

  std::optional<AuxiliaryVideo> aux;
  if (penalty.lambda3 > 0.0) {
    if (!cfg.auxiliary.empty()) {
      aux.emplace(io::read_auxiliary(cfg.auxiliary));
    } else {
      aux.emplace(sh_auxiliary(video, cfg.sh_lmax, cfg.sh_v));
      io::write_raw_video(dir / "auxiliary.vmc", aux->frames());
    }
  }

  const auto out = run_pipeline(video, aux ? &*aux : nullptr, penalty,
                                pipeline_options(cfg));
  if (!out.state.converged) {
    log << "warning: stopped at max-iter " << cfg.max_iter
        << " before reaching tol " << cfg.tol << '\n';
  }
  if (out.clamped > 0) {
    log << "warning: " << out.clamped
        << " imputed values fell outside the Box-Cox domain and were clamped\n";
  }
  io::write_raw_video(dir / "imputed.vmc", out.imputed);
  write_diagnostics(dir, out.state);

  manifest.set("result.sweeps", out.state.iteration);
  manifest.set("result.converged", out.state.converged ? "true" : "false");
  manifest.set("result.objective", out.state.objective_history.back());
  manifest.set("result.clamped", out.clamped);
  manifest.set("transform.mean", out.params.mean);
  manifest.set("transform.std", out.params.std);
  for (std::size_t t = 0; t < out.effective_ranks.size(); ++t) {
    manifest.set("result.rank." + std::to_string(t),
                 static_cast<std::int64_t>(out.effective_ranks[t]));
  }
  manifest.write(dir / "manifest.txt");
}

void cmd_evaluate(const RunConfig& cfg, std::ostream&) {
  require(cfg.truth, "truth");
  require(cfg.eval_mask, "eval-mask");
  if (cfg.results.empty()) throw std::invalid_argument("missing --result name=path");
  const auto dir = prepare_output(cfg);
  const auto truth = io::read_raw_video(cfg.truth);
  const auto masks = io::read_masks(cfg.eval_mask);

  std::vector<eval::ModelResult> results;
  bool has_soft = false;
  bool has_full = false;
  for (const auto& spec : cfg.results) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("--result expects name=path, got '" + spec + "'");
    }
    eval::ModelResult r;
    r.name = spec.substr(0, eq);
    r.frames = io::read_raw_video(spec.substr(eq + 1)).frames;
    has_soft = has_soft || r.name == "soft";
    has_full = has_full || r.name == "full";
    results.push_back(std::move(r));
  }
  const std::string baseline = has_soft ? "soft" : results.front().name;
  const auto report = eval::compare_models(results, truth.frames, masks, baseline,
                                           has_full ? "full" : "");
  auto per_frame = open_text(dir / "per_frame.csv");
  eval::write_per_frame_csv(per_frame, report);
  auto summary = open_text(dir / "summary.csv");
  eval::write_summary_csv(summary, report);
  auto margins = open_text(dir / "margins.csv");
  margins << kMarginsHeader;
  const std::string level = sim::is_patch(sim::parse_pattern(cfg.pattern))
                                ? std::to_string(cfg.patch_sizes.at(0))
                                : io::format_double(cfg.fractions.at(0));
  write_margins(margins, report, cfg.pattern, level);
}

void cmd_experiment(const RunConfig& cfg, std::ostream& log) {
  require(cfg.input, "input");
  const auto dir = prepare_output(cfg);
  const auto truth = io::read_video(cfg.input);
  const auto pattern = sim::parse_pattern(cfg.pattern);

  std::vector<sim::MissingnessSpec> levels;
  if (sim::is_patch(pattern)) {
    for (auto size : cfg.patch_sizes) levels.push_back(missingness_spec(cfg, 0.5, size));
  } else {
    for (auto f : cfg.fractions) levels.push_back(missingness_spec(cfg, f, 27));
  }

  io::Manifest manifest;
  manifest.set("command.name", "experiment");
  cfg.record(manifest);
  auto margins = open_text(dir / "margins.csv");
  margins << kMarginsHeader;
  const auto options = pipeline_options(cfg);

  for (const auto& spec : levels) {
    const auto label = level_label(spec);
    for (const auto& n : sim::validate(spec, truth.rows(), truth.cols())) {
      log << "warning: " << n << '\n';
    }
    const auto sim = sim::apply(truth, spec);
    record_missingness(manifest, sim, "level." + label + ".");
    const auto aux = sh_auxiliary(sim.video, cfg.sh_lmax, cfg.sh_v);

    std::vector<eval::ModelResult> results;
    for (Model model : {Model::kSoft, Model::kTs, Model::kSh, Model::kFull}) {
      const auto out = run_pipeline(sim.video, &aux, cfg.penalty(model), options);
      manifest.set("level." + label + "." + std::string(to_string(model)) + ".sweeps",
                   out.state.iteration);
      results.push_back({std::string(to_string(model)), out.imputed});
    }
    results.push_back({"sh-direct", {aux.frames().begin(), aux.frames().end()}});

    const auto report = eval::compare_models(
        results, truth.frames(), sim.dropped, "soft", "full");
    auto per_frame = open_text(dir / ("per_frame_" + label + ".csv"));
    eval::write_per_frame_csv(per_frame, report);
    auto summary = open_text(dir / ("summary_" + label + ".csv"));
    eval::write_summary_csv(summary, report);
    write_margins(margins, report, cfg.pattern, label);
  }
  manifest.write(dir / "manifest.txt");
}

GridSearchResult grid_search(const MaskedVideo& train,
                             const std::vector<Mask>& test,
                             const MaskedVideo& truth, const RunConfig& cfg) {
  if (cfg.grid_lambda1.empty()) throw std::invalid_argument("empty lambda1 grid");
  const auto options = pipeline_options(cfg);
  std::optional<AuxiliaryVideo> aux;
  for (double l3 : cfg.grid_lambda3) {
    if (l3 > 0.0 && !aux) aux.emplace(sh_auxiliary(train, cfg.sh_lmax, cfg.sh_v));
  }

  GridSearchResult result;
  auto evaluate = [&](int stage, LambdaTriple l) {
    PenaltyConfig p = cfg.penalty(Model::kFull);
    p.lambda1 = l.lambda1;
    p.lambda2 = l.lambda2;
    p.lambda3 = l.lambda3;
    const auto out = run_pipeline(train, aux ? &*aux : nullptr, p, options);
    const double score = mean_rse(out.imputed, truth, test);
    result.points.push_back({stage, l, score});
    return score;
  };
  auto argmin = [&](int stage, const std::vector<double>& grid, auto make) {
    double best_score = 0.0;
    double best = grid.front();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double score = evaluate(stage, make(grid[i]));
      if (i == 0 || score < best_score) {
        best_score = score;
        best = grid[i];
      }
    }
    return best;
  };

  result.best.lambda1 = argmin(1, cfg.grid_lambda1, [](double v) {
    return LambdaTriple{v, 0.0, 0.0};
  });
  const double l1 = result.best.lambda1;
  result.best.lambda2 = cfg.grid_lambda2.empty()
                            ? 0.0
                            : argmin(2, cfg.grid_lambda2, [&](double v) {
                                return LambdaTriple{l1, v, 0.0};
                              });
  result.best.lambda3 = cfg.grid_lambda3.empty()
                            ? 0.0
                            : argmin(3, cfg.grid_lambda3, [&](double v) {
                                return LambdaTriple{l1, 0.0, v};
                              });
  return result;
}

void cmd_gridsearch(const RunConfig& cfg, std::ostream& log) {
  require(cfg.input, "input");
  const auto dir = prepare_output(cfg);
  const auto video = io::read_video(cfg.input);
  const double fraction = cfg.holdout > 0.0 ? cfg.holdout : 0.2;
  const auto split = sim::holdout(video, fraction, cfg.seed);
  io::write_masks(dir / "test_mask.vmc", split.test);

  const auto result = grid_search(split.train, split.test, video, cfg);
  auto grid = open_text(dir / "grid.csv");
  grid << "stage,lambda1,lambda2,lambda3,rse_pct\n";
  for (const auto& p : result.points) {
    grid << p.stage << ',' << io::format_double(p.lambdas.lambda1) << ','
         << io::format_double(p.lambdas.lambda2) << ','
         << io::format_double(p.lambdas.lambda3) << ','
         << io::format_double(p.rse_pct) << '\n';
  }

  io::Manifest manifest;
  manifest.set("command.name", "gridsearch");
  cfg.record(manifest);
  manifest.set("stage.1", "lambda1");
  manifest.set("stage.2", "lambda2");
  manifest.set("stage.3", "lambda3");
  manifest.set("best.lambda1", result.best.lambda1);
  manifest.set("best.lambda2", result.best.lambda2);
  manifest.set("best.lambda3", result.best.lambda3);
  manifest.write(dir / "manifest.txt");
  log << "best lambda1=" << io::format_double(result.best.lambda1)
      << " lambda2=" << io::format_double(result.best.lambda2)
      << " lambda3=" << io::format_double(result.best.lambda3) << '\n';
}

void cmd_boxcox_scan(const RunConfig& cfg, std::ostream& log) {
  require(cfg.input, "input");
  const auto dir = prepare_output(cfg);
  const auto video = io::read_video(cfg.input);
  const std::vector<double> grid{-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5};
  const auto scan = transform::scan_boxcox_lambda(video, grid, cfg.boxcox_offset);
  auto out = open_text(dir / "boxcox_scan.csv");
  out << "lambda,log_likelihood\n";
  for (std::size_t i = 0; i < scan.lambdas.size(); ++i) {
    out << io::format_double(scan.lambdas[i]) << ','
        << io::format_double(scan.log_likelihood[i]) << '\n';
  }
  log << "highest log-likelihood at boxcox-lambda=" << io::format_double(scan.best)
      << '\n';
}

}  // namespace vista::cli
