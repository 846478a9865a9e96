#pragma once

// Independent reference implementations used as test oracles. Everything
// here is written from the textbook definitions, loop by loop, and shares
// no code with the library beyond the data types.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "vista/video.hpp"

namespace oracle {

using vista::Mask;
using vista::Matrix;

struct Instance {
  std::vector<Matrix> x;
  std::vector<Mask> mask;
  std::optional<std::vector<Matrix>> y;
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  Eigen::Index rank = 2;

  std::size_t rows() const { return static_cast<std::size_t>(x.front().rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(x.front().cols()); }
  std::size_t frames() const { return x.size(); }
  vista::MaskedVideo video() const { return vista::MaskedVideo(x, mask); }
  std::optional<vista::AuxiliaryVideo> auxiliary() const {
    if (!y) return std::nullopt;
    return vista::AuxiliaryVideo(*y);
  }
  vista::PenaltyConfig penalty(std::uint64_t seed = 1) const {
    vista::PenaltyConfig p;
    p.lambda1 = lambda1;
    p.lambda2 = lambda2;
    p.lambda3 = lambda3;
    p.rank = rank;
    p.seed = seed;
    return p;
  }
};

struct InstanceLimits {
  int max_rows = 20;
  int max_cols = 30;
  int max_frames = 8;
  int max_rank = 4;
  double min_missing = 0.3;
  double max_missing = 0.7;
  bool random_penalties = true;
};

/// Low-rank-plus-noise video with a random mask, random penalties and (when
/// lambda3 > 0) a random auxiliary video.
Instance random_instance(std::mt19937_64& rng, const InstanceLimits& limits = {});

/// Random factor sequence with i.i.d. standard normal entries.
std::vector<Matrix> random_factors(std::mt19937_64& rng, std::size_t count,
                                   Eigen::Index rows, Eigen::Index rank);

/// The four-term objective, summed entry by entry.
double objective(const Instance& inst, const std::vector<Matrix>& a,
                 const std::vector<Matrix>& b);

/// Majorized surrogate of frame t as a function of the free factor
/// (`a_phase` selects A_t or B_t), with the fill-in taken at `anchor_a`,
/// `anchor_b` (the factors before the update) and all other frames at
/// their current values in `a`, `b`.
double surrogate(const Instance& inst, const std::vector<Matrix>& a,
                 const std::vector<Matrix>& b, std::size_t t, bool a_phase,
                 const Matrix& free_factor);

/// Minimizer of `surrogate` by a dense least-squares solve of the
/// vectorized problem (Kronecker form), without any closed-form shortcut.
Matrix dense_surrogate_minimizer(const Instance& inst,
                                 const std::vector<Matrix>& a,
                                 const std::vector<Matrix>& b, std::size_t t,
                                 bool a_phase);

/// Central-difference gradient of `surrogate` in the free factor.
Matrix surrogate_gradient(const Instance& inst, const std::vector<Matrix>& a,
                          const std::vector<Matrix>& b, std::size_t t,
                          bool a_phase, const Matrix& at, double h = 1e-4);

/// One iteration of single-matrix softImpute-ALS: A-step then B-step, each
/// re-imputing the missing entries with the current product.
void soft_impute_als_step(const Matrix& x, const Mask& mask, double lambda,
                          Matrix& a, Matrix& b);

/// Literal output step: fill in, full SVD of the product for V, project,
/// SVD, soft-threshold, rebuild.
Matrix literal_finalize(const Matrix& x, const Mask& mask, const Matrix& a,
                        const Matrix& b, double lambda1);

/// ||A_t B_t^T||_* computed from a full SVD.
double nuclear_norm(const Matrix& m);

}  // namespace oracle
