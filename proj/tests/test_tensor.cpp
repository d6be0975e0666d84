#include "doctest.h"
#include "logtr/tensor.hpp"
#include "oracles.hpp"

using namespace logtr;

namespace {

// t(i,j,k) = 100 i + 10 j + k with 1-based indices.
Tensor hundreds() {
  Tensor t({2, 2, 2});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) t(i, j, k) = 100.0 * (i + 1) + 10.0 * (j + 1) + (k + 1);
  return t;
}

}  // namespace

TEST_CASE("unfold_first places the origin entry first") {
  CHECK(unfold_first(hundreds(), 1)(0, 0) == 111.0);
  const Tensor one({1, 1, 1}, 4.5);
  const Matrix m = unfold_first(one, 0);
  CHECK(m.rows() == 1);
  CHECK(m.cols() == 1);
  CHECK(m(0, 0) == 4.5);
}

TEST_CASE("unfold_first follows the natural column formula on every entry") {
  const Tensor t = hundreds();
  const Dims d = t.dims();
  for (std::size_t n = 0; n < 3; ++n) {
    const Matrix m = unfold_first(t, n);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 2; ++k) {
          const std::size_t idx[3] = {i, j, k};
          std::size_t col = 0, stride = 1;
          for (std::size_t q = 0; q < 3; ++q) {
            if (q == n) continue;
            col += idx[q] * stride;
            stride *= d[q];
          }
          CHECK(m(idx[n], col) == t(i, j, k));
        }
  }
}

TEST_CASE("unfold_cyclic lists next mode fastest then wraps") {
  const Matrix m = unfold_cyclic(hundreds(), 1);
  REQUIRE(m.cols() == 4);
  CHECK(m(0, 0) == 111.0);
  CHECK(m(0, 1) == 112.0);
  CHECK(m(0, 2) == 211.0);
  CHECK(m(0, 3) == 212.0);
}

TEST_CASE("both unfoldings coincide for 2-way tensors") {
  const Tensor t({3, 5}, std::vector<double>(15, 0.0));
  Tensor r = t;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<double>(i * i % 7);
  for (std::size_t n = 0; n < 2; ++n) CHECK(unfold_cyclic(r, n) == unfold_first(r, n));
}

TEST_CASE("fold inverts unfold exactly for both conventions") {
  for (const Dims& d : {Dims{3, 4, 5}, Dims{2, 3, 4}, Dims{6, 7, 8}, Dims{1, 6, 2}}) {
    const Tensor t = oracle::random_tensor(d, d[0] * 31 + d[2]);
    for (std::size_t n = 0; n < 3; ++n) {
      CHECK(fold(unfold_first(t, n), n, d, Unfolding::First) == t);
      CHECK(fold(unfold_cyclic(t, n), n, d, Unfolding::Cyclic) == t);
    }
  }
  Matrix row(1, 5);
  row << 1, 2, 3, 4, 5;
  const Tensor f = fold(row, 0, {1, 5}, Unfolding::First);
  CHECK(f.values() == std::vector<double>{1, 2, 3, 4, 5});
  CHECK_THROWS_AS(fold(row, 0, {1, 4}, Unfolding::First), ShapeError);
  CHECK_THROWS_AS(unfold_first(f, 2), ShapeError);
}

TEST_CASE("mode_n_product matches a triple-loop contraction") {
  const Tensor t = oracle::random_tensor({3, 4, 5}, 11);
  for (std::size_t n = 0; n < 3; ++n) {
    const Matrix m = oracle::random_matrix(2, t.extent(n), 100 + n);
    CHECK(max_abs_diff(mode_n_product(t, m, n), oracle::mode_product(t, m, n)) < 1e-12);
    const Matrix eye = Matrix::Identity(t.extent(n), t.extent(n));
    CHECK(mode_n_product(t, eye, n) == t);
  }
  const Tensor ones({2, 3, 2}, 1.0);
  const Tensor summed = mode_n_product(ones, Matrix::Ones(1, 3), 1);
  CHECK(summed.dims() == Dims{2, 1, 2});
  for (double v : summed.data()) CHECK(v == 3.0);
  CHECK_THROWS_AS(mode_n_product(t, Matrix::Ones(2, 3), 1), ShapeError);
}

TEST_CASE("successive mode products compose as a matrix product") {
  const Tensor t = oracle::random_tensor({4, 5, 3}, 12);
  for (std::size_t n = 0; n < 3; ++n) {
    const Matrix a = oracle::random_matrix(6, t.extent(n), 3 * n + 1);
    const Matrix b = oracle::random_matrix(2, 6, 3 * n + 2);
    CHECK(max_abs_diff(mode_n_product(mode_n_product(t, a, n), b, n), mode_n_product(t, b * a, n)) < 1e-12);
  }
}

TEST_CASE("cyclic_shift rotates dims and permutes entries") {
  const Tensor t = oracle::random_tensor({2, 3, 4}, 13);
  CHECK(cyclic_shift(t, 0) == t);
  CHECK(cyclic_shift(t, 3) == t);
  const Tensor s = cyclic_shift(t, 1);
  REQUIRE(s.dims() == Dims{3, 4, 2});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 4; ++k) CHECK(s(j, k, i) == t(i, j, k));
  CHECK(cyclic_shift(cyclic_shift(cyclic_shift(t, 1), 1), 1) == t);
}

TEST_CASE("lateral DFT matches direct summation, round-trips and obeys Parseval") {
  Tensor c({1, 6, 1}, 2.5);
  const ComplexTensor sc = dft_lateral(c);
  CHECK(std::abs(sc(0, 0, 0) - std::complex<double>(15.0, 0.0)) < 1e-12);
  for (std::size_t k = 1; k < 6; ++k) CHECK(std::abs(sc(0, k, 0)) < 1e-12);

  for (std::size_t len : {1u, 5u, 6u, 7u}) {
    const Tensor t = oracle::random_tensor({2, len, 3}, 20 + len);
    const ComplexTensor f = dft_lateral(t);
    const ComplexTensor g = oracle::dft_mode1(t);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i] - g[i]));
    CHECK(worst < 1e-12);

    const InverseDft back = idft_lateral(f);
    CHECK(max_abs_diff(back.real, t) < 1e-12);
    CHECK(back.max_imag < 1e-12);

    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 3; ++b) {
        double time = 0.0, freq = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
          time += t(a, k, b) * t(a, k, b);
          freq += std::norm(f(a, k, b));
        }
        CHECK(std::abs(time - freq / static_cast<double>(len)) < 1e-10);
      }
  }
}

TEST_CASE("idft reports the imaginary residual of a non-symmetric spectrum") {
  ComplexTensor s({1, 4, 1});
  s(0, 1, 0) = {1.0, 0.0};
  CHECK(idft_lateral(s).max_imag > 0.1);
}

TEST_CASE("norms and relative change") {
  const Tensor z({2, 2}, 0.0);
  CHECK(frobenius_norm(z) == 0.0);
  CHECK(l1_norm(z) == 0.0);
  const Tensor v({2}, std::vector<double>{3.0, -4.0});
  CHECK(frobenius_norm(v) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(l1_norm(v) == 7.0);
  CHECK(rel_change(v, v) == 0.0);
  CHECK_THROWS_AS(rel_change(z, z), NumericalError);
}

TEST_CASE("tensor construction rejects inconsistent shapes") {
  CHECK_THROWS_AS(Tensor({2, 0, 3}), ShapeError);
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>(3, 0.0)), ShapeError);
  Tensor a({2, 2}), b({2, 3});
  CHECK_THROWS_AS(a += b, ShapeError);
}
