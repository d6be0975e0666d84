#include "doctest.h"
#include "logtr/degradation.hpp"
#include "oracles.hpp"

using namespace logtr;

namespace {

void check_row_stochastic(const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    CHECK(std::abs(m.row(r).sum() - 1.0) < 1e-12);
    CHECK(m.row(r).minCoeff() >= 0.0);
  }
}

}  // namespace

TEST_CASE("delta kernel gives pure decimation") {
  const Matrix op = build_spatial_operator(4, 2, BlurSpec::delta());
  Matrix expect = Matrix::Zero(2, 4);
  expect(0, 0) = 1.0;
  expect(1, 2) = 1.0;
  CHECK(op == expect);
}

TEST_CASE("two-tap average kernel") {
  const Matrix op = build_spatial_operator(4, 2, BlurSpec::explicit_taps({0.5, 0.5}));
  Eigen::Vector4d x(1, 2, 3, 4);
  const Eigen::VectorXd y = op * x;
  REQUIRE(y.size() == 2);
  CHECK(y(0) == doctest::Approx(1.5));
  CHECK(y(1) == doctest::Approx(3.5));
}

TEST_CASE("Gaussian operator rows are the circularly placed sampled kernel") {
  const Matrix op = build_spatial_operator(16, 4, BlurSpec::gaussian(7, 2.0));
  REQUIRE(op.rows() == 4);
  check_row_stochastic(op);
  double taps[7], total = 0.0;
  for (int i = 0; i < 7; ++i) total += taps[i] = std::exp(-(i - 3.0) * (i - 3.0) / 8.0);
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (int i = 0; i < 7; ++i) {
      const long col = ((4 * r + i - 3) % 16 + 16) % 16;
      CHECK(std::abs(op(r, col) - taps[i] / total) < 1e-15);
    }
    CHECK((op.row(r).array() > 0.0).count() == 7);
  }
}

TEST_CASE("spatial operator argument checks") {
  CHECK_THROWS_AS(build_spatial_operator(10, 4, BlurSpec::delta()), ValueError);
  CHECK_THROWS_AS(build_spatial_operator(8, 2, BlurSpec::gaussian(6, 2.0)), ValueError);
  CHECK_THROWS_AS(build_spatial_operator(8, 2, BlurSpec::gaussian(7, 0.0)), ValueError);
  CHECK_THROWS_AS(build_spatial_operator(8, 2, BlurSpec::explicit_taps({0.5, -0.1})), ValueError);
}

TEST_CASE("band-averaging spectral operator") {
  const Matrix op = build_spectral_operator(4, BandGroups{{0, 1}, {2, 3}});
  Matrix expect(2, 4);
  expect << 0.5, 0.5, 0, 0, 0, 0, 0.5, 0.5;
  CHECK(op == expect);
  CHECK(build_spectral_operator(5, contiguous_groups(5, 5)) == Matrix::Identity(5, 5));
  check_row_stochastic(build_spectral_operator(16, contiguous_groups(16, 3)));
  CHECK_THROWS_AS(build_spectral_operator(4, BandGroups{{0, 1}, {1, 2, 3}}), ValueError);
  CHECK_THROWS_AS(build_spectral_operator(4, BandGroups{{0, 1}, {3}}), ValueError);
  CHECK_THROWS_AS(build_spectral_operator(4, BandGroups{{0, 1}, {}}), ValueError);
}

TEST_CASE("explicit spectral responses are row-normalized") {
  Matrix resp(2, 3);
  resp << 1, 1, 0, 0, 1, 3;
  const Matrix op = build_spectral_operator(resp);
  check_row_stochastic(op);
  CHECK(op(1, 2) == doctest::Approx(0.75));
  resp(0, 0) = std::nan("");
  CHECK_THROWS_AS(build_spectral_operator(resp), ValueError);
}

TEST_CASE("degrade with identity and constant inputs") {
  const Tensor x = oracle::random_tensor({4, 4, 3}, 3);
  const DegradationModel id = make_degradation(x.dims(), 1, BlurSpec::delta(), Matrix::Identity(3, 3));
  const Observations o = degrade(x, id);
  CHECK(o.lr_hsi == x);
  CHECK(o.hr_msi == x);

  const Tensor ones({16, 8, 6}, 1.0);
  const DegradationModel m =
      make_degradation(ones.dims(), 4, BlurSpec::gaussian(7, 2.0), build_spectral_operator(6, contiguous_groups(6, 2)));
  const Observations c = degrade(ones, m);
  CHECK(c.lr_hsi.dims() == Dims{4, 2, 6});
  CHECK(c.hr_msi.dims() == Dims{16, 8, 2});
  for (double v : c.lr_hsi.data()) CHECK(std::abs(v - 1.0) < 1e-12);
  for (double v : c.hr_msi.data()) CHECK(std::abs(v - 1.0) < 1e-12);
  CHECK_THROWS_AS(degrade(oracle::random_tensor({8, 8, 6}, 1), m), ShapeError);
}

TEST_CASE("degrading a ring equals composing degraded cores") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TRFactors f = random_init({16, 12, 8}, {2, 3, 2}, 40 + seed);
    const Tensor x = compose(f);
    const DegradationModel m =
        make_degradation(x.dims(), 4, BlurSpec::gaussian(7, 2.0), build_spectral_operator(8, contiguous_groups(8, 3)));
    const Observations o = degrade(x, m);
    CHECK(rel_change(o.lr_hsi, compose(lr_hsi_factors(f, m))) < 1e-10);
    CHECK(rel_change(o.hr_msi, compose(hr_msi_factors(f, m))) < 1e-10);
  }
}

TEST_CASE("noise calibration and determinism") {
  const Tensor t = oracle::random_tensor({64, 64, 16}, 6, 0.0, 1.0);
  CHECK(add_noise(t, kNoiseDisabled, 1) == t);
  const Tensor a = add_noise(t, 25.0, 99);
  CHECK(a == add_noise(t, 25.0, 99));
  CHECK_FALSE(a == add_noise(t, 25.0, 100));
  CHECK(std::abs(empirical_snr_db(t, a) - 25.0) < 0.5);
  CHECK_THROWS_AS(add_noise(Tensor({3, 3}, 0.0), 20.0, 1), ValueError);
}
