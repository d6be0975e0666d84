#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "logtr/errors.hpp"

namespace logtr {

using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Dims = std::vector<std::size_t>;

std::size_t product(const Dims& dims);
std::string to_string(const Dims& dims);

// Dense N-way array, row-major (last index varies fastest). Modes are
// 0-based throughout the library.
template <typename Scalar>
class DenseTensor {
 public:
  using value_type = Scalar;

  DenseTensor() = default;

  explicit DenseTensor(Dims dims, Scalar fill = Scalar{0})
      : dims_(std::move(dims)), data_(product(dims_), fill) {
    check_dims();
  }

  DenseTensor(Dims dims, std::vector<Scalar> data) : dims_(std::move(dims)), data_(std::move(data)) {
    check_dims();
    if (data_.size() != product(dims_)) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match dims " +
                       to_string(dims_));
    }
  }

  const Dims& dims() const noexcept { return dims_; }
  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t extent(std::size_t mode) const { return dims_.at(mode); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const Scalar> data() const noexcept { return data_; }
  std::span<Scalar> data() noexcept { return data_; }
  const std::vector<Scalar>& values() const noexcept { return data_; }

  Scalar& operator[](std::size_t flat) { return data_[flat]; }
  const Scalar& operator[](std::size_t flat) const { return data_[flat]; }

  Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  const Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }

  std::size_t offset(std::span<const std::size_t> index) const {
    if (index.size() != dims_.size()) throw ShapeError("index arity does not match tensor order");
    std::size_t flat = 0;
    for (std::size_t m = 0; m < dims_.size(); ++m) {
      if (index[m] >= dims_[m]) throw ShapeError("tensor index out of range");
      flat = flat * dims_[m] + index[m];
    }
    return flat;
  }
  Scalar& at(std::span<const std::size_t> index) { return data_[offset(index)]; }
  const Scalar& at(std::span<const std::size_t> index) const { return data_[offset(index)]; }

  DenseTensor& operator+=(const DenseTensor& other) {
    require_same_dims(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }
  DenseTensor& operator-=(const DenseTensor& other) {
    require_same_dims(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
  }
  DenseTensor& operator*=(Scalar s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(DenseTensor a, Scalar s) { return a *= s; }
  friend DenseTensor operator*(Scalar s, DenseTensor a) { return a *= s; }

  bool operator==(const DenseTensor&) const = default;

 private:
  void check_dims() const {
    for (auto d : dims_) {
      if (d == 0) throw ShapeError("tensor extents must be positive, got " + to_string(dims_));
    }
  }
  void require_same_dims(const DenseTensor& other) const {
    if (dims_ != other.dims_) {
      throw ShapeError("tensor dims differ: " + to_string(dims_) + " vs " + to_string(other.dims_));
    }
  }

  Dims dims_;
  std::vector<Scalar> data_;
};

using Tensor = DenseTensor<double>;
using ComplexTensor = DenseTensor<std::complex<double>>;

enum class Unfolding {
  First,   // remaining modes in natural order, lowest mode fastest
  Cyclic,  // remaining modes n+1, ..., N-1, 0, ..., n-1, mode n+1 fastest
};

// Mode-n matricization: I_n rows, prod_{k != n} I_k columns.
Matrix unfold(const Tensor& t, std::size_t mode, Unfolding convention);
inline Matrix unfold_first(const Tensor& t, std::size_t mode) { return unfold(t, mode, Unfolding::First); }
inline Matrix unfold_cyclic(const Tensor& t, std::size_t mode) { return unfold(t, mode, Unfolding::Cyclic); }

// Exact inverse of unfold with the same convention.
Tensor fold(const Matrix& m, std::size_t mode, const Dims& dims, Unfolding convention);

// t x_n m: replaces extent I_n by m.rows().
Tensor mode_n_product(const Tensor& t, const Matrix& m, std::size_t mode);

// Rotates dims left by `steps`, so that mode `steps` becomes mode 0.
// Steps are taken modulo the order.
Tensor cyclic_shift(const Tensor& t, std::size_t steps);

// Unnormalized DFT along mode 1 of a 3-way tensor (per tube t(a, :, b)).
ComplexTensor dft_lateral(const Tensor& t);

struct InverseDft {
  Tensor real;
  double max_imag = 0.0;  // largest |imaginary part| discarded
};

// Inverse of dft_lateral (1/I_2 scaling); returns the real part.
InverseDft idft_lateral(const ComplexTensor& ct);

// Lateral slice t(:, i, :) as an I_1 x I_3 matrix.
ComplexMatrix lateral_slice(const ComplexTensor& ct, std::size_t i);
void set_lateral_slice(ComplexTensor& ct, std::size_t i, const ComplexMatrix& slice);

double frobenius_norm(const Tensor& t);
double l1_norm(const Tensor& t);
double inner(const Tensor& a, const Tensor& b);
// ||a - b||_F / ||a||_F; throws NumericalError when ||a||_F == 0.
double rel_change(const Tensor& a, const Tensor& b);
double max_abs_diff(const Tensor& a, const Tensor& b);
bool all_finite(const Tensor& t);

Tensor hadamard(const Tensor& a, const Tensor& b);

// Row-major flat layout of an Eigen matrix as a 2-way tensor and back.
Tensor matrix_to_tensor(const Matrix& m);
Matrix tensor_to_matrix(const Tensor& t);

}  // namespace logtr
