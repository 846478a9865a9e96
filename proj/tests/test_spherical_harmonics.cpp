#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vista/evaluation.hpp"
#include "vista/missingness.hpp"
#include "vista/spherical_harmonics.hpp"
#include "vista/synthetic.hpp"

using namespace vista;
using namespace vista::sh;

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

Vector random_coeffs(int l_max, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector c(static_cast<Eigen::Index>(coefficient_count(l_max)));
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = normal(rng);
  return c;
}

}  // namespace

TEST_CASE("closed-form low-degree harmonics") {
  const double th = 0.7, ph = 1.9;
  const double s = std::sin(th), c = std::cos(th);
  CHECK(eval_basis(0, 0, th, ph) == doctest::Approx(0.28209479177387814));
  CHECK(eval_basis(1, 0, kPi / 2, ph) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(eval_basis(1, 0, th, ph) == doctest::Approx(std::sqrt(3 / (4 * kPi)) * c));
  CHECK(eval_basis(1, 1, th, ph) == doctest::Approx(std::sqrt(3 / (4 * kPi)) * s * std::cos(ph)));
  CHECK(eval_basis(1, -1, th, ph) == doctest::Approx(std::sqrt(3 / (4 * kPi)) * s * std::sin(ph)));
  CHECK(eval_basis(2, 0, th, ph) ==
        doctest::Approx(std::sqrt(5 / (16 * kPi)) * (3 * c * c - 1)));
  CHECK(eval_basis(2, 2, th, ph) ==
        doctest::Approx(std::sqrt(15 / (16 * kPi)) * s * s * std::cos(2 * ph)));
  CHECK(eval_basis(2, -1, th, ph) ==
        doctest::Approx(std::sqrt(15 / (4 * kPi)) * s * c * std::sin(ph)));
  CHECK_THROWS(eval_basis(2, 3, th, ph));
}

TEST_CASE("eval_all agrees with eval_basis") {
  const Vector all = eval_all(6, 1.1, 4.0);
  REQUIRE(all.size() == 49);
  for (int l = 0; l <= 6; ++l)
    for (int m = -l; m <= l; ++m)
      CHECK(all(static_cast<Eigen::Index>(coefficient_index(l, m))) ==
            doctest::Approx(eval_basis(l, m, 1.1, 4.0)).epsilon(1e-13));
  CHECK(coefficient_count(11) == 144);
}

TEST_CASE("orthonormality by Gauss-Legendre quadrature") {
  const int l_max = 11;
  std::vector<double> x, w;
  gauss_legendre(2 * l_max + 2, x, w);
  const int n_phi = 4 * l_max + 4;
  const auto count = static_cast<Eigen::Index>(coefficient_count(l_max));
  Matrix gram = Matrix::Zero(count, count);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int j = 0; j < n_phi; ++j) {
      const Vector y = eval_all(l_max, std::acos(x[i]), 2 * kPi * j / n_phi);
      gram += (w[i] * 2 * kPi / n_phi) * y * y.transpose();
    }
  }
  CHECK((gram - Matrix::Identity(count, count)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("regular grid geometry") {
  const auto g = SphericalGrid::regular(4, 8);
  CHECK(g.latitudes().front() == doctest::Approx(67.5));
  CHECK(g.latitudes().back() == doctest::Approx(-67.5));
  CHECK(g.longitudes().front() == doctest::Approx(22.5));
  CHECK(g.colatitude(0) == doctest::Approx(22.5 * kPi / 180));
  CHECK(g.local_time(1) == doctest::Approx(67.5 / 15));
  CHECK_THROWS(SphericalGrid({0.0, 10.0, 5.0}, {0.0, 1.0}));
  CHECK_THROWS(SphericalGrid({95.0, 0.0}, {0.0, 1.0}));
}

TEST_CASE("constant frame fits to the zonal term") {
  const auto grid = SphericalGrid::regular(19, 36);
  const Matrix frame = Matrix::Constant(19, 36, 3.5);
  const auto model = fit_frame(frame, Mask::Constant(19, 36, true), grid, 4, 0.0);
  CHECK(model.coefficient(0, 0) == doctest::Approx(3.5 * std::sqrt(4 * kPi)));
  for (Eigen::Index k = 1; k < model.coeffs.size(); ++k) {
    CHECK(std::abs(model.coeffs(k)) < 1e-8);
  }
}

TEST_CASE("band-limited frames are recovered on a 61x121 grid") {
  std::mt19937_64 rng(1);
  const auto grid = SphericalGrid::regular(61, 121);
  const BasisMatrix basis(grid, 11);
  ShModel truth{11, random_coeffs(11, rng), 0.0};
  const Matrix frame = evaluate(truth, basis);
  const auto fit = fit_frame(frame, Mask::Constant(61, 121, true), basis, 0.0);
  CHECK((fit.coeffs - truth.coeffs).norm() / truth.coeffs.norm() < 1e-6);
  CHECK((evaluate(fit, basis) - frame).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("render") {
  const auto grid = SphericalGrid::regular(5, 7);
  ShModel zero{3, Vector::Zero(16), 0.0};
  CHECK(render(zero, grid).norm() == 0.0);
  ShModel one{3, Vector::Zero(16), 0.0};
  one.coeffs(0) = std::sqrt(4 * kPi);
  CHECK((render(one, grid) - Matrix::Ones(5, 7)).cwiseAbs().maxCoeff() < 1e-12);
  ShModel negative{3, Vector::Zero(16), 0.0};
  negative.coeffs(0) = -1.0;
  CHECK(render(negative, grid).maxCoeff() == 0.0);
  CHECK(evaluate(negative, BasisMatrix(grid, 3)).maxCoeff() < 0.0);
}

TEST_CASE("ridge shrinkage") {
  std::mt19937_64 rng(2);
  const auto grid = SphericalGrid::regular(20, 30);
  const BasisMatrix basis(grid, 6);
  Matrix frame = Matrix::Random(20, 30).array() + 2.0;
  Mask mask = Mask::Constant(20, 30, true);
  for (int k = 0; k < 200; ++k) mask(k % 20, (k * 7) % 30) = false;
  double previous = fit_frame(frame, mask, basis, 0.0).coeffs.norm();
  for (double v : {0.1, 1.0, 10.0, 100.0, 1e12}) {
    const double norm = fit_frame(frame, mask, basis, v).coeffs.norm();
    CHECK(norm <= previous + 1e-12);
    previous = norm;
  }
  CHECK(previous < 1e-6);
  CHECK_THROWS(fit_frame(frame, Mask::Constant(20, 30, false), basis, 0.1));
}

TEST_CASE("fit then evaluate is linear in the frame") {
  const auto grid = SphericalGrid::regular(12, 18);
  const BasisMatrix basis(grid, 5);
  Mask mask = Mask::Constant(12, 18, true);
  mask.block(2, 3, 4, 5) = false;
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix f = Matrix::Random(12, 18);
    const Matrix g = Matrix::Random(12, 18);
    const double a = 0.3 + rep, b = -1.7;
    const Matrix lhs = evaluate(fit_frame(a * f + b * g, mask, basis, 0.1), basis);
    const Matrix rhs = a * evaluate(fit_frame(f, mask, basis, 0.1), basis) +
                       b * evaluate(fit_frame(g, mask, basis, 0.1), basis);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("auxiliary video") {
  sim::SyntheticSpec spec;
  spec.rows = 30;
  spec.cols = 45;
  spec.frames = 4;
  const auto truth = MaskedVideo::fully_observed(sim::make_synthetic_video(spec));
  sim::MissingnessSpec miss;
  miss.pattern = sim::Pattern::kTemporalPatch;
  miss.patch_size = 15;
  const auto simulated = sim::apply(truth, miss);
  const auto grid = SphericalGrid::regular(30, 45);
  const auto aux = build_auxiliary(simulated.video, grid, 6, 0.1);
  CHECK(aux.dims() == truth.dims());
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(eval::rse(truth.frame(t), aux.frame(t), simulated.dropped[t]) < 100.0);
  }

  // A single observed pixel still yields a bounded, nearly flat map.
  Mask lone = Mask::Constant(30, 45, false);
  lone(10, 10) = true;
  const MaskedVideo sparse({truth.frame(0)}, {lone});
  const auto flat = build_auxiliary(sparse, grid, 11, 0.1);
  CHECK(flat.frame(0).allFinite());
  CHECK(flat.frame(0).maxCoeff() <= truth.frame(0)(10, 10));
}
