#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace oracle {

namespace {

Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

Matrix filled(const Matrix& x, const Mask& mask, const Matrix& product) {
  Matrix out = product;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (mask(i, j)) out(i, j) = x(i, j);
  return out;
}

// Weighted targets of the frame-t surrogate, each paired with its weight.
std::vector<std::pair<double, Matrix>> surrogate_targets(
    const Instance& inst, const std::vector<Matrix>& a,
    const std::vector<Matrix>& b, std::size_t t) {
  std::vector<std::pair<double, Matrix>> out;
  out.emplace_back(1.0, filled(inst.x[t], inst.mask[t], a[t] * b[t].transpose()));
  if (inst.lambda2 > 0.0) {
    if (t > 0) out.emplace_back(inst.lambda2, a[t - 1] * b[t - 1].transpose());
    if (t + 1 < inst.frames()) {
      out.emplace_back(inst.lambda2, a[t + 1] * b[t + 1].transpose());
    }
  }
  if (inst.lambda3 > 0.0) out.emplace_back(inst.lambda3, (*inst.y)[t]);
  return out;
}

Eigen::VectorXd vec(const Matrix& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

}  // namespace

Instance random_instance(std::mt19937_64& rng, const InstanceLimits& limits) {
  std::uniform_int_distribution<int> rank_draw(1, limits.max_rank);
  Instance inst;
  inst.rank = rank_draw(rng);
  const int lo = static_cast<int>(inst.rank) + 1;
  const int rows = std::uniform_int_distribution<int>(std::min(lo + 2, limits.max_rows), limits.max_rows)(rng);
  const int cols = std::uniform_int_distribution<int>(std::min(lo + 2, limits.max_cols), limits.max_cols)(rng);
  const int frames = std::uniform_int_distribution<int>(1, limits.max_frames)(rng);
  const double missing =
      std::uniform_real_distribution<double>(limits.min_missing, limits.max_missing)(rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (limits.random_penalties) {
    inst.lambda1 = 0.05 + 1.95 * unit(rng);
    inst.lambda2 = unit(rng) < 0.25 ? 0.0 : unit(rng);
    inst.lambda3 = unit(rng) < 0.25 ? 0.0 : unit(rng);
  }

  const Matrix u = gaussian(rng, rows, 2);
  const Matrix v = gaussian(rng, cols, 2);
  std::vector<Matrix> truth;
  for (int t = 0; t < frames; ++t) {
    Matrix frame = u * (Matrix::Identity(2, 2) * (1.0 + 0.1 * t)) * v.transpose();
    frame += 0.1 * gaussian(rng, rows, cols);
    truth.push_back(frame);

    Mask mask(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) mask(i, j) = unit(rng) >= missing;
    mask(0, 0) = true;
    inst.mask.push_back(mask);
    inst.x.push_back(filled(frame, mask, Matrix::Zero(rows, cols)));
  }
  if (inst.lambda3 > 0.0) {
    std::vector<Matrix> y;
    for (const auto& frame : truth) y.push_back(frame + 0.3 * gaussian(rng, rows, cols));
    inst.y = std::move(y);
  }
  return inst;
}

std::vector<Matrix> random_factors(std::mt19937_64& rng, std::size_t count,
                                   Eigen::Index rows, Eigen::Index rank) {
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(gaussian(rng, rows, rank));
  return out;
}

double objective(const Instance& inst, const std::vector<Matrix>& a,
                 const std::vector<Matrix>& b) {
  double total = 0.0;
  for (std::size_t t = 0; t < inst.frames(); ++t) {
    const Matrix p = a[t] * b[t].transpose();
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      for (Eigen::Index i = 0; i < p.rows(); ++i) {
        if (inst.mask[t](i, j)) {
          const double r = inst.x[t](i, j) - p(i, j);
          total += 0.5 * r * r;
        }
        if (inst.lambda3 > 0.0) {
          const double r = (*inst.y)[t](i, j) - p(i, j);
          total += 0.5 * inst.lambda3 * r * r;
        }
        if (t > 0 && inst.lambda2 > 0.0) {
          double prev = 0.0;
          for (Eigen::Index k = 0; k < a[t - 1].cols(); ++k)
            prev += a[t - 1](i, k) * b[t - 1](j, k);
          const double r = p(i, j) - prev;
          total += 0.5 * inst.lambda2 * r * r;
        }
      }
    }
    total += 0.5 * inst.lambda1 * (a[t].array().square().sum() + b[t].array().square().sum());
  }
  return total;
}

double surrogate(const Instance& inst, const std::vector<Matrix>& a,
                 const std::vector<Matrix>& b, std::size_t t, bool a_phase,
                 const Matrix& free_factor) {
  const Matrix product = a_phase ? Matrix(free_factor * b[t].transpose())
                                 : Matrix(a[t] * free_factor.transpose());
  double total = 0.5 * inst.lambda1 * free_factor.squaredNorm();
  for (const auto& [w, target] : surrogate_targets(inst, a, b, t)) {
    total += 0.5 * w * (target - product).squaredNorm();
  }
  return total;
}

Matrix dense_surrogate_minimizer(const Instance& inst,
                                 const std::vector<Matrix>& a,
                                 const std::vector<Matrix>& b, std::size_t t,
                                 bool a_phase) {
  // A-phase: vec(A B^T) = (B kron I_m) vec(A).
  // B-phase: vec(B A^T) = (A kron I_n) vec(B), targets transposed.
  const Matrix& fixed = a_phase ? b[t] : a[t];
  const Eigen::Index free_rows = a_phase ? a[t].rows() : b[t].rows();
  const Eigen::Index r = fixed.cols();
  const Eigen::Index cells = free_rows * fixed.rows();
  const Eigen::Index unknowns = free_rows * r;

  Matrix kron = Matrix::Zero(cells, unknowns);
  for (Eigen::Index p = 0; p < fixed.rows(); ++p)
    for (Eigen::Index k = 0; k < r; ++k)
      kron.block(p * free_rows, k * free_rows, free_rows, free_rows) =
          fixed(p, k) * Matrix::Identity(free_rows, free_rows);

  const auto targets = surrogate_targets(inst, a, b, t);
  const auto blocks = static_cast<Eigen::Index>(targets.size());
  Matrix system = Matrix::Zero(blocks * cells + unknowns, unknowns);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(system.rows());
  for (Eigen::Index s = 0; s < blocks; ++s) {
    const double w = std::sqrt(targets[static_cast<std::size_t>(s)].first);
    const Matrix& target = targets[static_cast<std::size_t>(s)].second;
    system.block(s * cells, 0, cells, unknowns) = w * kron;
    rhs.segment(s * cells, cells) =
        w * (a_phase ? vec(target) : vec(Matrix(target.transpose())));
  }
  system.bottomRows(unknowns) =
      std::sqrt(inst.lambda1) * Matrix::Identity(unknowns, unknowns);

  const Eigen::VectorXd solution = system.colPivHouseholderQr().solve(rhs);
  return Eigen::Map<const Matrix>(solution.data(), free_rows, r);
}

Matrix surrogate_gradient(const Instance& inst, const std::vector<Matrix>& a,
                          const std::vector<Matrix>& b, std::size_t t,
                          bool a_phase, const Matrix& at, double h) {
  Matrix grad(at.rows(), at.cols());
  for (Eigen::Index j = 0; j < at.cols(); ++j) {
    for (Eigen::Index i = 0; i < at.rows(); ++i) {
      Matrix plus = at;
      Matrix minus = at;
      plus(i, j) += h;
      minus(i, j) -= h;
      grad(i, j) = (surrogate(inst, a, b, t, a_phase, plus) -
                    surrogate(inst, a, b, t, a_phase, minus)) /
                   (2.0 * h);
    }
  }
  return grad;
}

void soft_impute_als_step(const Matrix& x, const Mask& mask, double lambda,
                          Matrix& a, Matrix& b) {
  const Eigen::Index r = a.cols();
  const Matrix ridge = lambda * Matrix::Identity(r, r);

  Matrix completed = filled(x, mask, a * b.transpose());
  // (B^T B + lambda I) A^T = B^T X*^T
  a = (b.transpose() * b + ridge).ldlt().solve(b.transpose() * completed.transpose()).transpose();

  completed = filled(x, mask, a * b.transpose());
  b = (a.transpose() * a + ridge).ldlt().solve(a.transpose() * completed).transpose();
}

Matrix literal_finalize(const Matrix& x, const Mask& mask, const Matrix& a,
                        const Matrix& b, double lambda1) {
  const Eigen::Index r = a.cols();
  const Matrix completed = filled(x, mask, a * b.transpose());
  Eigen::JacobiSVD<Matrix> product_svd(a * b.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix v = product_svd.matrixV().leftCols(r);
  const Matrix m = completed * v;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd d = svd.singularValues();
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = std::max(d(k) - lambda1, 0.0);
  return svd.matrixU() * d.asDiagonal() * (v * svd.matrixV()).transpose();
}

double nuclear_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues().sum();
}

}  // namespace oracle
