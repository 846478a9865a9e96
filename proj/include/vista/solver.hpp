#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "vista/video.hpp"

namespace vista {

/// Inputs of one VISTA run: the masked video, the optional auxiliary video
/// and the penalty configuration, checked against each other once.
///
/// Holds references; the videos must outlive the problem.
class VistaProblem {
 public:
  VistaProblem(const MaskedVideo& video, const AuxiliaryVideo* auxiliary,
               PenaltyConfig config);

  const MaskedVideo& video() const { return *video_; }
  const AuxiliaryVideo* auxiliary() const { return auxiliary_; }
  const PenaltyConfig& config() const { return config_; }
  std::size_t num_frames() const { return video_->num_frames(); }

  /// Weight on the Gram matrix in the closed-form update of frame t:
  /// 1 + lambda2 (I{t<T} + I{t>1}) + lambda3.
  double gram_weight(std::size_t t) const;

 private:
  const MaskedVideo* video_;
  const AuxiliaryVideo* auxiliary_;
  PenaltyConfig config_;
};

/// Surfaced when an SVD or factorization fails on a specific frame.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t frame)
      : std::runtime_error(what + " (frame " + std::to_string(frame) + ")"),
        frame_(frame) {}
  std::size_t frame() const { return frame_; }

 private:
  std::size_t frame_;
};

struct SolverOptions {
  /// Record F after the A-phase of every sweep.
  bool record_phase_objectives = false;
  /// Record F after every single factor update (2T values per sweep).
  bool record_update_objectives = false;
};

struct SolverState {
  FactorSequence factors;
  std::size_t iteration = 0;
  /// F at initialization followed by F after each completed sweep.
  std::vector<double> objective_history;
  /// F after the A-phase of each sweep (debug only).
  std::vector<double> half_step_history;
  /// F after each factor update, in update order (debug only).
  std::vector<double> update_history;
  /// Relative change of A_t B_t^T over the last sweep, per frame.
  std::vector<double> relative_change;
  /// max_t relative_change for every sweep.
  std::vector<double> max_change_history;
  bool converged = false;
};

struct ImputedVideo {
  std::vector<Matrix> frames;
  std::vector<Eigen::Index> effective_ranks;
};

struct SolveResult {
  ImputedVideo imputed;
  SolverState state;
};

/// The four-term objective F(A_{1:T}, B_{1:T}).
double objective(const VistaProblem& problem, const FactorSequence& factors);

/// Weighted regression target of frame t built from the current factors.
///
/// During the A-phase the current factors are (A_{<t} new, the rest old), so
/// this is the A-update label; during the B-phase (all A new, B_{<t} new) it
/// is the B-update label. Both phases share the same formula.
Matrix weighted_label(const VistaProblem& problem,
                      const FactorSequence& factors, std::size_t t);

/// Closed-form minimizer of the majorized A_t surrogate.
Matrix update_a(const VistaProblem& problem, const FactorSequence& factors,
                std::size_t t);

/// Closed-form minimizer of the majorized B_t surrogate.
Matrix update_b(const VistaProblem& problem, const FactorSequence& factors,
                std::size_t t);

/// ||A'B'^T - AB^T||_F^2 / ||AB^T||_F^2.
double relative_change(const Matrix& a_old, const Matrix& b_old,
                       const Matrix& a_new, const Matrix& b_new);

/// One cyclic pass A_1..A_T, B_1..B_T.
void sweep(SolverState& state, const VistaProblem& problem,
           const SolverOptions& options = {});

/// True iff max_t relative_change < tol.
bool check_convergence(const SolverState& state, double tol);

/// Random orthonormal U_t, V_t (QR of Gaussian draws), D_t = I.
FactorSequence initialize_factors(std::size_t rows, std::size_t cols,
                                  std::size_t frames, Eigen::Index rank,
                                  std::uint64_t seed);

/// Soft-thresholded SVD output of Algorithm 1 for frame t.
Matrix finalize_frame(const Matrix& frame, const Mask& mask, const Matrix& a,
                      const Matrix& b, double lambda1,
                      Eigen::Index* effective_rank = nullptr);

ImputedVideo finalize(const SolverState& state, const VistaProblem& problem);

/// Starts a state from given factors, evaluating the initial objective.
SolverState make_state(const VistaProblem& problem, FactorSequence factors,
                       const SolverOptions& options = {});

/// Sweeps from `state` until convergence or config().max_iter sweeps.
void iterate(SolverState& state, const VistaProblem& problem,
             const SolverOptions& options = {});

/// Full algorithm: seeded initialization, sweeps, finalization.
SolveResult solve(const VistaProblem& problem,
                  const SolverOptions& options = {});

/// Overwrites observed pixels of an imputation with the observed values.
void keep_observed(ImputedVideo& imputed, const MaskedVideo& video);

}  // namespace vista
