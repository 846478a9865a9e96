#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vista/io.hpp"
#include "vista/missingness.hpp"
#include "vista/video.hpp"

namespace vista {

enum class Model { kSoft, kTs, kSh, kFull };

std::string_view to_string(Model model);
Model parse_model(std::string_view name);

struct LambdaTriple {
  double lambda1 = 0.9;
  double lambda2 = 0.05;
  double lambda3 = 0.01;
};

/// Published penalty presets: "storm", "nonstorm", "sim-demo".
LambdaTriple profile_lambdas(std::string_view profile);

/// Zeroes the penalties a model does not use: soft keeps lambda1 only,
/// ts drops lambda3, sh drops lambda2.
LambdaTriple constrain(Model model, LambdaTriple lambdas);

/// Every knob of a CLI run. Keys of the key=value form equal the long flag
/// names without the leading dashes.
struct RunConfig {
  std::string input;
  std::string output_dir = ".";
  std::string auxiliary;
  std::string truth;
  std::string eval_mask;
  std::vector<std::string> results;

  Model model = Model::kFull;
  std::string profile;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::optional<double> lambda3;
  Eigen::Index rank = 10;
  std::size_t max_iter = 500;
  double tol = 1e-5;
  bool keep_observed = false;

  int sh_lmax = 11;
  double sh_v = 0.1;
  double boxcox_lambda = 0.5;
  double boxcox_offset = 1e-3;

  std::size_t rows = 60;
  std::size_t cols = 90;
  std::size_t frames = 24;
  double noise = 0.0;

  std::string pattern = "random";
  std::vector<double> fractions{0.5};
  std::vector<std::size_t> patch_sizes{27};
  std::size_t shift = 6;
  double holdout = 0.0;
  std::uint64_t seed = 1;

  std::vector<double> grid_lambda1{0.5, 0.9, 1.3};
  std::vector<double> grid_lambda2{0.0, 0.05, 0.1, 0.2, 0.31};
  std::vector<double> grid_lambda3{0.0, 0.01, 0.021, 0.03};

  /// Lambdas after default < profile < explicit values, before model
  /// constraints.
  LambdaTriple lambdas() const;
  /// Penalty configuration of the selected model.
  PenaltyConfig penalty() const;
  PenaltyConfig penalty(Model model) const;

  /// Applies key=value entries. Dotted keys are run outputs and are skipped;
  /// any other unknown key is an error.
  void apply(const io::Manifest& entries);
  /// Writes every setting except output-dir, so runs that differ only in
  /// their output location produce identical manifests.
  void record(io::Manifest& manifest) const;
};

}  // namespace vista
