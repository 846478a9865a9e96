#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vista/transform.hpp"

using namespace vista;
using namespace vista::transform;

namespace {

std::vector<Matrix> random_positive(std::mt19937_64& rng, int frames, int rows, int cols) {
  std::lognormal_distribution<double> draw(1.0, 0.8);
  std::vector<Matrix> out;
  for (int t = 0; t < frames; ++t) {
    Matrix f(rows, cols);
    for (Eigen::Index c = 0; c < f.size(); ++c) f(c) = draw(rng);
    out.push_back(f);
  }
  return out;
}

}  // namespace

TEST_CASE("boxcox values") {
  CHECK(boxcox(1.0, 0.5) == 0.0);
  CHECK(boxcox(1.0, -2.0) == 0.0);
  CHECK(boxcox(4.0, 0.5) == doctest::Approx(2.0));
  CHECK(boxcox(std::numbers::e, 0.0) == doctest::Approx(1.0));
  CHECK(boxcox(9.0, 1.0) == doctest::Approx(8.0));
  CHECK_THROWS_AS(boxcox(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(boxcox(-1.0, 0.0), std::domain_error);
  for (double lambda : {-1.0, 0.0, 0.5, 2.0}) {
    double previous = boxcox(0.01, lambda);
    for (double y = 0.02; y < 50.0; y *= 1.3) {
      const double v = boxcox(y, lambda);
      CHECK(v > previous);
      CHECK(inverse_boxcox(v, lambda) == doctest::Approx(y).epsilon(1e-12));
      previous = v;
    }
  }
}

TEST_CASE("standardized observed population has mean 0 and std 1") {
  std::mt19937_64 rng(1);
  auto frames = random_positive(rng, 3, 6, 7);
  std::vector<Mask> masks(3, Mask::Constant(6, 7, true));
  masks[1](2, 3) = masks[2](0, 0) = false;
  const MaskedVideo video(frames, masks);
  const auto data = fit_transform(video, nullptr, 0.5);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < 3; ++t)
    for (Eigen::Index c = 0; c < 42; ++c)
      if (masks[t](c)) {
        sum += data.video.frame(t)(c);
        sq += data.video.frame(t)(c) * data.video.frame(t)(c);
        ++n;
      }
  CHECK(n == data.params.fitted_count);
  CHECK(std::abs(sum / n) < 1e-12);
  CHECK(std::sqrt(sq / n) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(data.auxiliary.has_value());
}

TEST_CASE("auxiliary pixels join the pooled moments") {
  std::mt19937_64 rng(2);
  const auto video = MaskedVideo::fully_observed(random_positive(rng, 2, 4, 5));
  const AuxiliaryVideo aux(random_positive(rng, 2, 4, 5));
  const auto data = fit_transform(video, &aux, 0.25);
  CHECK(data.params.includes_auxiliary);
  CHECK(data.params.fitted_count == 80);
  double sum = 0.0;
  for (std::size_t t = 0; t < 2; ++t)
    sum += data.video.frame(t).sum() + data.auxiliary->frame(t).sum();
  CHECK(std::abs(sum) < 1e-10);
  CHECK((apply(aux.frame(1), data.params) - data.auxiliary->frame(1)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("round trip on random positive videos") {
  std::mt19937_64 rng(3);
  for (double lambda : {-0.5, 0.0, 0.5, 1.0, 1.5}) {
    const auto frames = random_positive(rng, 4, 8, 9);
    const auto video = MaskedVideo::fully_observed(frames);
    const auto data = fit_transform(video, nullptr, lambda);
    const auto back = invert(data.video.frames(), data.params);
    CHECK(back.clamped == 0);
    for (std::size_t t = 0; t < frames.size(); ++t) {
      CHECK((back.frames[t] - frames[t]).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("inversion boundary") {
  TransformParams p;
  p.boxcox_lambda = 1.0;
  p.mean = 0.0;
  p.std = 1.0;
  p.offset = 0.0;
  Matrix v(1, 2);
  v << 2.0, -0.5;
  auto out = invert(std::vector<Matrix>{v}, p);
  CHECK(out.frames[0](0, 0) == doctest::Approx(3.0));
  CHECK(out.frames[0](0, 1) == doctest::Approx(0.5));

  p.boxcox_lambda = 0.5;
  v << -5.0, 0.0;
  out = invert(std::vector<Matrix>{v}, p);
  CHECK(out.clamped == 1);
  CHECK(out.frames[0](0, 0) == 0.0);
  CHECK(out.frames[0](0, 1) == doctest::Approx(1.0));
}

TEST_CASE("fit_transform errors") {
  const auto flat = MaskedVideo::fully_observed({Matrix::Constant(3, 3, 2.0)});
  CHECK_THROWS_AS(fit_transform(flat, nullptr, 0.5), std::domain_error);
  Matrix neg = Matrix::Ones(2, 2);
  neg(1, 0) = -1.0;
  neg(0, 1) = 3.0;
  try {
    fit_transform(MaskedVideo::fully_observed({neg}), nullptr, 0.5);
    FAIL("expected an error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("t=0, i=1, j=0") != std::string::npos);
  }
  // Zero is fine thanks to the offset.
  Matrix zero = Matrix::Ones(2, 2);
  zero(0, 0) = 0.0;
  CHECK_NOTHROW(fit_transform(MaskedVideo::fully_observed({zero}), nullptr, 0.5));
}

TEST_CASE("lambda scan prefers the generating exponent") {
  // Squares of normal draws become normal again under lambda = 0.5.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(10.0, 1.0);
  Matrix f(50, 50);
  for (Eigen::Index c = 0; c < f.size(); ++c) {
    const double z = normal(rng);
    f(c) = z * z;
  }
  const std::vector<double> grid{-1.0, 0.0, 0.5, 1.0, 2.0};
  const auto scan = scan_boxcox_lambda(MaskedVideo::fully_observed({f}), grid);
  CHECK(scan.best == 0.5);
  CHECK(scan.log_likelihood.size() == grid.size());
}
