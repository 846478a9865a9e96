#include "vista/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace vista {

VistaProblem::VistaProblem(const MaskedVideo& video,
                           const AuxiliaryVideo* auxiliary,
                           PenaltyConfig config)
    : video_(&video), auxiliary_(auxiliary), config_(config) {
  config_.validate(auxiliary != nullptr);
  if (auxiliary_ != nullptr && !(auxiliary_->dims() == video_->dims())) {
    throw DimensionError("auxiliary video is " + to_string(auxiliary_->dims()) +
                         " but the masked video is " +
                         to_string(video_->dims()));
  }
  const auto max_rank = std::min(video_->rows(), video_->cols());
  if (static_cast<std::size_t>(config_.rank) > max_rank) {
    throw std::invalid_argument("rank " + std::to_string(config_.rank) +
                                " exceeds min(m, n) = " +
                                std::to_string(max_rank));
  }
}

double VistaProblem::gram_weight(std::size_t t) const {
  const std::size_t last = num_frames() - 1;
  const double neighbours = (t < last ? 1.0 : 0.0) + (t > 0 ? 1.0 : 0.0);
  return 1.0 + config_.lambda2 * neighbours + config_.lambda3;
}

double objective(const VistaProblem& problem, const FactorSequence& factors) {
  const auto& video = problem.video();
  const auto& cfg = problem.config();
  factors.validate(video.rows(), video.cols());
  if (factors.num_frames() != video.num_frames()) {
    throw DimensionError("factor count does not match the number of frames");
  }

  double fit = 0.0;
  double ridge = 0.0;
  double temporal = 0.0;
  double auxiliary = 0.0;
  Matrix previous;
  for (std::size_t t = 0; t < video.num_frames(); ++t) {
    Matrix current = factors.product(t);
    fit += video.mask(t).select(video.frame(t) - current, 0.0).squaredNorm();
    ridge += factors.a[t].squaredNorm() + factors.b[t].squaredNorm();
    if (cfg.lambda2 > 0.0 && t > 0) {
      temporal += (current - previous).squaredNorm();
    }
    if (cfg.lambda3 > 0.0) {
      auxiliary += (problem.auxiliary()->frame(t) - current).squaredNorm();
    }
    previous = std::move(current);
  }
  return 0.5 * fit + 0.5 * cfg.lambda1 * ridge + 0.5 * cfg.lambda2 * temporal +
         0.5 * cfg.lambda3 * auxiliary;
}

Matrix weighted_label(const VistaProblem& problem,
                      const FactorSequence& factors, std::size_t t) {
  const auto& video = problem.video();
  const auto& cfg = problem.config();
  Matrix label =
      fill_in(video.frame(t), video.mask(t), factors.a[t], factors.b[t]);
  if (cfg.lambda2 > 0.0) {
    if (t > 0) {
      label.noalias() +=
          cfg.lambda2 * (factors.a[t - 1] * factors.b[t - 1].transpose());
    }
    if (t + 1 < video.num_frames()) {
      label.noalias() +=
          cfg.lambda2 * (factors.a[t + 1] * factors.b[t + 1].transpose());
    }
  }
  if (cfg.lambda3 > 0.0) label += cfg.lambda3 * problem.auxiliary()->frame(t);
  return label;
}

namespace {

// Solves X H = rhs for X with H = weight * design^T design + lambda1 I,
// factoring H once for all rows of rhs.
Matrix ridge_solve(const Matrix& design, const Matrix& rhs, double weight,
                   double lambda1, std::size_t t) {
  Matrix gram = weight * (design.transpose() * design);
  gram.diagonal().array() += lambda1;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Gram-plus-ridge matrix is not positive definite", t);
  }
  return llt.solve(rhs.transpose()).transpose();
}

}  // namespace

Matrix update_a(const VistaProblem& problem, const FactorSequence& factors,
                std::size_t t) {
  const Matrix& b = factors.b[t];
  const Matrix rhs = weighted_label(problem, factors, t) * b;
  return ridge_solve(b, rhs, problem.gram_weight(t), problem.config().lambda1,
                     t);
}

Matrix update_b(const VistaProblem& problem, const FactorSequence& factors,
                std::size_t t) {
  const Matrix& a = factors.a[t];
  const Matrix rhs = weighted_label(problem, factors, t).transpose() * a;
  return ridge_solve(a, rhs, problem.gram_weight(t), problem.config().lambda1,
                     t);
}

double relative_change(const Matrix& a_old, const Matrix& b_old,
                       const Matrix& a_new, const Matrix& b_new) {
  const Matrix before = a_old * b_old.transpose();
  const double change = (a_new * b_new.transpose() - before).squaredNorm();
  const double scale = before.squaredNorm();
  if (scale > 0.0) return change / scale;
  return change == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

void sweep(SolverState& state, const VistaProblem& problem,
           const SolverOptions& options) {
  auto& factors = state.factors;
  const std::size_t frames = problem.num_frames();
  const FactorSequence previous = factors;

  for (std::size_t t = 0; t < frames; ++t) {
    factors.a[t] = update_a(problem, factors, t);
    if (options.record_update_objectives) {
      state.update_history.push_back(objective(problem, factors));
    }
  }
  if (options.record_phase_objectives) {
    state.half_step_history.push_back(objective(problem, factors));
  }
  for (std::size_t t = 0; t < frames; ++t) {
    factors.b[t] = update_b(problem, factors, t);
    if (options.record_update_objectives) {
      state.update_history.push_back(objective(problem, factors));
    }
  }

  state.objective_history.push_back(objective(problem, factors));
  state.relative_change.resize(frames);
  double worst = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    state.relative_change[t] = relative_change(previous.a[t], previous.b[t],
                                               factors.a[t], factors.b[t]);
    worst = std::max(worst, state.relative_change[t]);
  }
  state.max_change_history.push_back(worst);
  ++state.iteration;
}

bool check_convergence(const SolverState& state, double tol) {
  if (state.relative_change.empty()) return false;
  return *std::max_element(state.relative_change.begin(),
                           state.relative_change.end()) < tol;
}

FactorSequence initialize_factors(std::size_t rows, std::size_t cols,
                                  std::size_t frames, Eigen::Index rank,
                                  std::uint64_t seed) {
  if (rank < 1 || static_cast<std::size_t>(rank) > std::min(rows, cols)) {
    throw std::invalid_argument("rank must lie in [1, min(m, n)]");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto orthonormal = [&](std::size_t n) {
    Matrix gaussian(static_cast<Eigen::Index>(n), rank);
    for (Eigen::Index j = 0; j < gaussian.cols(); ++j) {
      for (Eigen::Index i = 0; i < gaussian.rows(); ++i) {
        gaussian(i, j) = normal(rng);
      }
    }
    Eigen::HouseholderQR<Matrix> qr(gaussian);
    return Matrix(qr.householderQ() *
                  Matrix::Identity(gaussian.rows(), rank));
  };

  FactorSequence factors;
  factors.a.reserve(frames);
  factors.b.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    factors.a.push_back(orthonormal(rows));
    factors.b.push_back(orthonormal(cols));
  }
  return factors;
}

Matrix finalize_frame(const Matrix& frame, const Mask& mask, const Matrix& a,
                      const Matrix& b, double lambda1,
                      Eigen::Index* effective_rank) {
  const Matrix completed = fill_in(frame, mask, a, b);
  const auto r = a.cols();

  // Right singular vectors of A B^T via thin QRs of the factors.
  Eigen::HouseholderQR<Matrix> qr_a(a);
  Eigen::HouseholderQR<Matrix> qr_b(b);
  const Matrix r_a = qr_a.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Matrix r_b = qr_b.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Matrix q_b = qr_b.householderQ() * Matrix::Identity(b.rows(), r);
  Eigen::JacobiSVD<Matrix> core(r_a * r_b.transpose(), Eigen::ComputeFullV);
  if (core.info() != Eigen::Success) {
    throw std::runtime_error("SVD of the factor core failed");
  }
  const Matrix v = q_b * core.matrixV();

  Eigen::BDCSVD<Matrix> svd(completed * v,
                            Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw std::runtime_error("SVD of the projected frame failed");
  }
  const Vector shrunk =
      (svd.singularValues().array() - lambda1).max(0.0).matrix();
  if (effective_rank != nullptr) {
    *effective_rank = static_cast<Eigen::Index>((shrunk.array() > 0.0).count());
  }
  return svd.matrixU() * shrunk.asDiagonal() *
         (v * svd.matrixV()).transpose();
}

ImputedVideo finalize(const SolverState& state, const VistaProblem& problem) {
  const auto& video = problem.video();
  ImputedVideo out;
  out.frames.reserve(video.num_frames());
  out.effective_ranks.reserve(video.num_frames());
  for (std::size_t t = 0; t < video.num_frames(); ++t) {
    Eigen::Index rank = 0;
    try {
      out.frames.push_back(finalize_frame(
          video.frame(t), video.mask(t), state.factors.a[t],
          state.factors.b[t], problem.config().lambda1, &rank));
    } catch (const NumericalError&) {
      throw;
    } catch (const std::runtime_error& e) {
      throw NumericalError(e.what(), t);
    }
    out.effective_ranks.push_back(rank);
  }
  return out;
}

SolverState make_state(const VistaProblem& problem, FactorSequence factors,
                       const SolverOptions& options) {
  factors.validate(problem.video().rows(), problem.video().cols());
  if (factors.num_frames() != problem.num_frames()) {
    throw DimensionError("factor count does not match the number of frames");
  }
  SolverState state;
  state.factors = std::move(factors);
  const double initial = objective(problem, state.factors);
  state.objective_history.push_back(initial);
  if (options.record_update_objectives) state.update_history.push_back(initial);
  return state;
}

void iterate(SolverState& state, const VistaProblem& problem,
             const SolverOptions& options) {
  const auto& cfg = problem.config();
  while (state.iteration < cfg.max_iter) {
    sweep(state, problem, options);
    if (check_convergence(state, cfg.tol)) {
      state.converged = true;
      break;
    }
  }
}

SolveResult solve(const VistaProblem& problem, const SolverOptions& options) {
  const auto& video = problem.video();
  const auto& cfg = problem.config();
  SolveResult result;
  result.state = make_state(
      problem,
      initialize_factors(video.rows(), video.cols(), video.num_frames(),
                         cfg.rank, cfg.seed),
      options);
  iterate(result.state, problem, options);
  result.imputed = finalize(result.state, problem);
  return result;
}

void keep_observed(ImputedVideo& imputed, const MaskedVideo& video) {
  if (imputed.frames.size() != video.num_frames()) {
    throw DimensionError("imputation and video differ in frame count");
  }
  for (std::size_t t = 0; t < video.num_frames(); ++t) {
    imputed.frames[t] = video.mask(t).select(video.frame(t), imputed.frames[t]);
  }
}

}  // namespace vista
