#include "logtr/tensor.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace logtr {

std::size_t product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Dims& dims) {
  std::ostringstream os;
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "x" : "") << dims[i];
  return os.str();
}

namespace {

void check_mode(const Dims& dims, std::size_t mode) {
  if (mode >= dims.size()) {
    throw ShapeError("mode " + std::to_string(mode) + " out of range for tensor of order " +
                     std::to_string(dims.size()));
  }
}

// Column weight of every mode (0 for `mode` itself) under the given convention.
std::vector<std::size_t> column_weights(const Dims& dims, std::size_t mode, Unfolding convention) {
  const std::size_t n = dims.size();
  std::vector<std::size_t> order;
  order.reserve(n - 1);
  if (convention == Unfolding::First) {
    for (std::size_t k = 0; k < n; ++k)
      if (k != mode) order.push_back(k);
  } else {
    for (std::size_t s = 1; s < n; ++s) order.push_back((mode + s) % n);
  }
  std::vector<std::size_t> weights(n, 0);
  std::size_t w = 1;
  for (auto k : order) {
    weights[k] = w;
    w *= dims[k];
  }
  return weights;
}

// Visits every entry in row-major flat order with its (row, column) in the unfolding.
template <typename Fn>
void for_each_unfolded(const Dims& dims, std::size_t mode, Unfolding convention, Fn&& fn) {
  const auto weights = column_weights(dims, mode, convention);
  const std::size_t n = dims.size();
  std::vector<std::size_t> idx(n, 0);
  std::size_t col = 0;
  const std::size_t total = product(dims);
  for (std::size_t flat = 0; flat < total; ++flat) {
    fn(flat, idx[mode], col);
    for (std::size_t m = n; m-- > 0;) {
      ++idx[m];
      col += weights[m];
      if (idx[m] < dims[m]) break;
      col -= weights[m] * dims[m];
      idx[m] = 0;
    }
  }
}

}  // namespace

Matrix unfold(const Tensor& t, std::size_t mode, Unfolding convention) {
  check_mode(t.dims(), mode);
  const std::size_t rows = t.extent(mode);
  Matrix m(rows, t.size() / rows);
  const auto data = t.data();
  for_each_unfolded(t.dims(), mode, convention,
                    [&](std::size_t flat, std::size_t r, std::size_t c) { m(r, c) = data[flat]; });
  return m;
}

Tensor fold(const Matrix& m, std::size_t mode, const Dims& dims, Unfolding convention) {
  check_mode(dims, mode);
  const std::size_t total = product(dims);
  if (static_cast<std::size_t>(m.rows()) != dims[mode] ||
      static_cast<std::size_t>(m.cols()) * dims[mode] != total) {
    throw ShapeError("fold: matrix " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     " does not match dims " + to_string(dims) + " at mode " + std::to_string(mode));
  }
  Tensor t(dims);
  auto data = t.data();
  for_each_unfolded(dims, mode, convention,
                    [&](std::size_t flat, std::size_t r, std::size_t c) { data[flat] = m(r, c); });
  return t;
}

Tensor mode_n_product(const Tensor& t, const Matrix& m, std::size_t mode) {
  check_mode(t.dims(), mode);
  const std::size_t in = t.extent(mode);
  if (static_cast<std::size_t>(m.cols()) != in) {
    throw ShapeError("mode_n_product: matrix has " + std::to_string(m.cols()) + " columns, mode " +
                     std::to_string(mode) + " has extent " + std::to_string(in));
  }
  const auto& dims = t.dims();
  std::size_t outer = 1, inner = 1;
  for (std::size_t k = 0; k < mode; ++k) outer *= dims[k];
  for (std::size_t k = mode + 1; k < dims.size(); ++k) inner *= dims[k];
  Dims out_dims = dims;
  out_dims[mode] = static_cast<std::size_t>(m.rows());
  Tensor out(out_dims);
  const std::size_t rows = out_dims[mode];
  const auto src = t.data();
  auto dst = out.data();
  for (std::size_t p = 0; p < outer; ++p) {
    for (std::size_t r = 0; r < rows; ++r) {
      double* o = dst.data() + (p * rows + r) * inner;
      for (std::size_t i = 0; i < in; ++i) {
        const double w = m(r, i);
        if (w == 0.0) continue;
        const double* s = src.data() + (p * in + i) * inner;
        for (std::size_t q = 0; q < inner; ++q) o[q] += w * s[q];
      }
    }
  }
  return out;
}

Tensor cyclic_shift(const Tensor& t, std::size_t steps) {
  const std::size_t n = t.order();
  steps %= n;
  if (steps == 0) return t;
  Dims out_dims(n);
  for (std::size_t k = 0; k < n; ++k) out_dims[k] = t.extent((k + steps) % n);
  // Source mode j lands at output mode (j - steps) mod n; its stride there is out_stride.
  std::vector<std::size_t> out_stride(n, 1);
  for (std::size_t k = n - 1; k-- > 0;) out_stride[k] = out_stride[k + 1] * out_dims[k + 1];
  std::vector<std::size_t> src_weight(n);
  for (std::size_t j = 0; j < n; ++j) src_weight[j] = out_stride[(j + n - steps) % n];

  Tensor out(out_dims);
  auto dst = out.data();
  const auto src = t.data();
  std::vector<std::size_t> idx(n, 0);
  std::size_t target = 0;
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    dst[target] = src[flat];
    for (std::size_t m = n; m-- > 0;) {
      ++idx[m];
      target += src_weight[m];
      if (idx[m] < t.extent(m)) break;
      target -= src_weight[m] * t.extent(m);
      idx[m] = 0;
    }
  }
  return out;
}

ComplexTensor dft_lateral(const Tensor& t) {
  if (t.order() != 3) throw ShapeError("dft_lateral expects a 3-way tensor");
  const std::size_t a = t.extent(0), len = t.extent(1), b = t.extent(2);
  ComplexTensor out(t.dims());
  if (len == 1) {
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i];
    return out;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> tube(len), spectrum(len);
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t k = 0; k < b; ++k) {
      for (std::size_t j = 0; j < len; ++j) tube[j] = t(i, j, k);
      fft.fwd(spectrum, tube);
      for (std::size_t j = 0; j < len; ++j) out(i, j, k) = spectrum[j];
    }
  }
  return out;
}

InverseDft idft_lateral(const ComplexTensor& ct) {
  if (ct.order() != 3) throw ShapeError("idft_lateral expects a 3-way tensor");
  const std::size_t a = ct.extent(0), len = ct.extent(1), b = ct.extent(2);
  InverseDft result{Tensor(ct.dims()), 0.0};
  if (len == 1) {
    for (std::size_t i = 0; i < ct.size(); ++i) {
      result.real[i] = ct[i].real();
      result.max_imag = std::max(result.max_imag, std::abs(ct[i].imag()));
    }
    return result;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum(len), tube(len);
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t k = 0; k < b; ++k) {
      for (std::size_t j = 0; j < len; ++j) spectrum[j] = ct(i, j, k);
      fft.inv(tube, spectrum);
      for (std::size_t j = 0; j < len; ++j) {
        result.real(i, j, k) = tube[j].real();
        result.max_imag = std::max(result.max_imag, std::abs(tube[j].imag()));
      }
    }
  }
  return result;
}

ComplexMatrix lateral_slice(const ComplexTensor& ct, std::size_t i) {
  if (ct.order() != 3 || i >= ct.extent(1)) throw ShapeError("lateral_slice index out of range");
  ComplexMatrix s(ct.extent(0), ct.extent(2));
  for (std::size_t r = 0; r < ct.extent(0); ++r)
    for (std::size_t c = 0; c < ct.extent(2); ++c) s(r, c) = ct(r, i, c);
  return s;
}

void set_lateral_slice(ComplexTensor& ct, std::size_t i, const ComplexMatrix& slice) {
  if (ct.order() != 3 || i >= ct.extent(1) || static_cast<std::size_t>(slice.rows()) != ct.extent(0) ||
      static_cast<std::size_t>(slice.cols()) != ct.extent(2)) {
    throw ShapeError("set_lateral_slice: shape mismatch");
  }
  for (std::size_t r = 0; r < ct.extent(0); ++r)
    for (std::size_t c = 0; c < ct.extent(2); ++c) ct(r, i, c) = slice(r, c);
}

double frobenius_norm(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v * v;
  return std::sqrt(s);
}

double l1_norm(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += std::abs(v);
  return s;
}

double inner(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims()) throw ShapeError("inner: dims differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double rel_change(const Tensor& a, const Tensor& b) {
  const double na = frobenius_norm(a);
  if (na == 0.0) throw NumericalError("rel_change: reference tensor has zero norm (degenerate iterate)");
  return frobenius_norm(a - b) / na;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims()) throw ShapeError("max_abs_diff: dims differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool all_finite(const Tensor& t) {
  return std::all_of(t.data().begin(), t.data().end(), [](double v) { return std::isfinite(v); });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims()) throw ShapeError("hadamard: dims differ");
  Tensor out(a.dims());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Tensor matrix_to_tensor(const Matrix& m) {
  Tensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) t[r * m.cols() + c] = m(r, c);
  return t;
}

Matrix tensor_to_matrix(const Tensor& t) {
  if (t.order() != 2) throw ShapeError("tensor_to_matrix expects a 2-way tensor, got " + to_string(t.dims()));
  Matrix m(t.extent(0), t.extent(1));
  for (std::size_t r = 0; r < t.extent(0); ++r)
    for (std::size_t c = 0; c < t.extent(1); ++c) m(r, c) = t[r * t.extent(1) + c];
  return m;
}

}  // namespace logtr
