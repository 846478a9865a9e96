#include "vista/run_config.hpp"

#include <sstream>
#include <stdexcept>

namespace vista {

namespace {

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) {
    throw std::invalid_argument("config key '" + key + "': '" + v +
                                "' is not a number");
  }
  return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || v.front() == '-') {
    throw std::invalid_argument("config key '" + key + "': '" + v +
                                "' is not a non-negative integer");
  }
  return out;
}

std::vector<std::string> split(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& items, F format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ',';
    out += format(items[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(Model model) {
  switch (model) {
    case Model::kSoft:
      return "soft";
    case Model::kTs:
      return "ts";
    case Model::kSh:
      return "sh";
    case Model::kFull:
      return "full";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  if (name == "soft") return Model::kSoft;
  if (name == "ts") return Model::kTs;
  if (name == "sh") return Model::kSh;
  if (name == "full") return Model::kFull;
  throw std::invalid_argument("unknown model '" + std::string(name) +
                              "' (expected soft, ts, sh or full)");
}

LambdaTriple profile_lambdas(std::string_view profile) {
  if (profile == "storm") return {0.9, 0.2, 0.021};
  if (profile == "nonstorm") return {0.9, 0.31, 0.03};
  if (profile == "sim-demo") return {0.9, 0.05, 0.01};
  throw std::invalid_argument("unknown profile '" + std::string(profile) +
                              "' (expected storm, nonstorm or sim-demo)");
}

LambdaTriple constrain(Model model, LambdaTriple lambdas) {
  switch (model) {
    case Model::kSoft:
      lambdas.lambda2 = 0.0;
      lambdas.lambda3 = 0.0;
      break;
    case Model::kTs:
      lambdas.lambda3 = 0.0;
      break;
    case Model::kSh:
      lambdas.lambda2 = 0.0;
      break;
    case Model::kFull:
      break;
  }
  return lambdas;
}

LambdaTriple RunConfig::lambdas() const {
  LambdaTriple out = profile.empty() ? LambdaTriple{} : profile_lambdas(profile);
  if (lambda1) out.lambda1 = *lambda1;
  if (lambda2) out.lambda2 = *lambda2;
  if (lambda3) out.lambda3 = *lambda3;
  return out;
}

PenaltyConfig RunConfig::penalty() const { return penalty(model); }

PenaltyConfig RunConfig::penalty(Model which) const {
  const auto l = constrain(which, lambdas());
  PenaltyConfig cfg;
  cfg.lambda1 = l.lambda1;
  cfg.lambda2 = l.lambda2;
  cfg.lambda3 = l.lambda3;
  cfg.rank = rank;
  cfg.max_iter = max_iter;
  cfg.tol = tol;
  cfg.seed = seed;
  return cfg;
}

void RunConfig::apply(const io::Manifest& entries) {
  for (const auto& [key, v] : entries.entries()) {
    if (key.find('.') != std::string::npos) continue;
    if (key == "input") input = v;
    else if (key == "output-dir") output_dir = v;
    else if (key == "auxiliary") auxiliary = v;
    else if (key == "truth") truth = v;
    else if (key == "eval-mask") eval_mask = v;
    else if (key == "result") results = split(v);
    else if (key == "model") model = parse_model(v);
    else if (key == "profile") profile = v;
    else if (key == "lambda1") lambda1 = to_double(key, v);
    else if (key == "lambda2") lambda2 = to_double(key, v);
    else if (key == "lambda3") lambda3 = to_double(key, v);
    else if (key == "rank") rank = static_cast<Eigen::Index>(to_unsigned(key, v));
    else if (key == "max-iter") max_iter = to_unsigned(key, v);
    else if (key == "tol") tol = to_double(key, v);
    else if (key == "keep-observed") keep_observed = (v == "true" || v == "1");
    else if (key == "sh-lmax") sh_lmax = static_cast<int>(to_unsigned(key, v));
    else if (key == "sh-v") sh_v = to_double(key, v);
    else if (key == "boxcox-lambda") boxcox_lambda = to_double(key, v);
    else if (key == "boxcox-offset") boxcox_offset = to_double(key, v);
    else if (key == "rows") rows = to_unsigned(key, v);
    else if (key == "cols") cols = to_unsigned(key, v);
    else if (key == "frames") frames = to_unsigned(key, v);
    else if (key == "noise") noise = to_double(key, v);
    else if (key == "pattern") pattern = v;
    else if (key == "fraction") {
      fractions.clear();
      for (const auto& s : split(v)) fractions.push_back(to_double(key, s));
    } else if (key == "patch-size") {
      patch_sizes.clear();
      for (const auto& s : split(v)) patch_sizes.push_back(to_unsigned(key, s));
    } else if (key == "shift") shift = to_unsigned(key, v);
    else if (key == "holdout") holdout = to_double(key, v);
    else if (key == "seed") seed = to_unsigned(key, v);
    else if (key == "grid-lambda1" || key == "grid-lambda2" || key == "grid-lambda3") {
      std::vector<double> grid;
      for (const auto& s : split(v)) grid.push_back(to_double(key, s));
      (key == "grid-lambda1"   ? grid_lambda1
       : key == "grid-lambda2" ? grid_lambda2
                               : grid_lambda3) = std::move(grid);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
}

void RunConfig::record(io::Manifest& m) const {
  auto num = [](double d) { return io::format_double(d); };
  auto idx = [](std::size_t s) { return std::to_string(s); };
  m.set("input", input);
  if (!auxiliary.empty()) m.set("auxiliary", auxiliary);
  if (!truth.empty()) m.set("truth", truth);
  if (!eval_mask.empty()) m.set("eval-mask", eval_mask);
  if (!results.empty()) m.set("result", join(results, [](const std::string& s) { return s; }));
  m.set("model", std::string(to_string(model)));
  if (!profile.empty()) m.set("profile", profile);
  const auto l = lambdas();
  m.set("lambda1", l.lambda1);
  m.set("lambda2", l.lambda2);
  m.set("lambda3", l.lambda3);
  m.set("rank", static_cast<std::int64_t>(rank));
  m.set("max-iter", max_iter);
  m.set("tol", tol);
  m.set("keep-observed", keep_observed ? "true" : "false");
  m.set("sh-lmax", sh_lmax);
  m.set("sh-v", sh_v);
  m.set("boxcox-lambda", boxcox_lambda);
  m.set("boxcox-offset", boxcox_offset);
  m.set("rows", static_cast<std::uint64_t>(rows));
  m.set("cols", static_cast<std::uint64_t>(cols));
  m.set("frames", static_cast<std::uint64_t>(frames));
  m.set("noise", noise);
  m.set("pattern", pattern);
  m.set("fraction", join(fractions, num));
  m.set("patch-size", join(patch_sizes, idx));
  m.set("shift", shift);
  m.set("holdout", holdout);
  m.set("seed", seed);
  m.set("grid-lambda1", join(grid_lambda1, num));
  m.set("grid-lambda2", join(grid_lambda2, num));
  m.set("grid-lambda3", join(grid_lambda3, num));
}

}  // namespace vista
