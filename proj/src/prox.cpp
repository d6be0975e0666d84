#include "logtr/prox.hpp"

#include <cmath>

namespace logtr {

Tensor soft_shrink_weighted(const Tensor& j, double tau, const Tensor& w) {
  if (j.dims() != w.dims()) throw ShapeError("soft_shrink_weighted: weight dims differ");
  Tensor out(j.dims());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (w[i] < 0.0) throw ValueError("soft_shrink_weighted: negative weight");
    const double mag = std::abs(j[i]) - tau * w[i];
    out[i] = mag > 0.0 ? std::copysign(mag, j[i]) : 0.0;
  }
  return out;
}

Tensor update_weights(const Tensor& j, double varsigma) {
  if (!(varsigma > 0.0)) throw ValueError("update_weights: varsigma must be positive");
  Tensor w(j.dims());
  for (std::size_t i = 0; i < j.size(); ++i) w[i] = 1.0 / (std::abs(j[i]) + varsigma);
  return w;
}

LateralSVD lateral_tsvd(const Tensor& g) {
  if (g.order() != 3) throw ShapeError("lateral_tsvd expects a 3-way tensor");
  LateralSVD out;
  out.spectrum = dft_lateral(g);
  const std::size_t len = g.extent(1);
  out.left.resize(len);
  out.singular.resize(len);
  out.right.resize(len);
  for (std::size_t i = 0; i <= len / 2; ++i) {
    ComplexMatrix slice = lateral_slice(out.spectrum, i);
    // DC and Nyquist slices of a real tensor are real up to rounding.
    if (i == 0 || 2 * i == len) slice = slice.real().cast<std::complex<double>>();
    Eigen::JacobiSVD<ComplexMatrix> svd(slice, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.left[i] = svd.matrixU();
    out.singular[i] = svd.singularValues();
    out.right[i] = svd.matrixV();
  }
  for (std::size_t i = len / 2 + 1; i < len; ++i) {
    const std::size_t mirror = len - i;
    out.left[i] = out.left[mirror].conjugate();
    out.singular[i] = out.singular[mirror];
    out.right[i] = out.right[mirror].conjugate();
  }
  return out;
}

double ltnn_value(const Tensor& g, double eps) {
  if (!(eps > 0.0)) throw ValueError("ltnn_value: eps must be positive");
  const LateralSVD svd = lateral_tsvd(g);
  double total = 0.0;
  for (const auto& sigma : svd.singular) {
    for (Eigen::Index j = 0; j < sigma.size(); ++j) total += std::log(sigma[j] + eps);
  }
  return total / static_cast<double>(g.extent(1));
}

double log_threshold_objective(double x, double s, double t, double eps) {
  return t * std::log(x + eps) + 0.5 * (x - s) * (x - s);
}

double log_threshold_scalar(double s, double t, double eps, ThresholdRule rule) {
  if (t < 0.0) throw ValueError("log_threshold_scalar: threshold must be nonnegative");
  if (!(eps > 0.0)) throw ValueError("log_threshold_scalar: eps must be positive");
  const double mag = std::abs(s);
  const double c1 = mag - eps;
  const double c2 = c1 * c1 - 4.0 * (t - eps * mag);
  if (c2 <= 0.0) return 0.0;
  const double root = 0.5 * (c1 + std::sqrt(c2));
  if (root <= 0.0) return 0.0;
  if (rule == ThresholdRule::GlobalMin &&
      log_threshold_objective(root, mag, t, eps) > log_threshold_objective(0.0, mag, t, eps)) {
    return 0.0;
  }
  return std::copysign(std::min(root, mag), s);
}

Tensor ltnn_prox(const Tensor& a, double t, double eps, ThresholdRule rule) {
  LateralSVD svd = lateral_tsvd(a);
  const std::size_t len = a.extent(1);
  ComplexTensor shrunk(a.dims());
  for (std::size_t i = 0; i < len; ++i) {
    Eigen::VectorXd sigma = svd.singular[i];
    for (Eigen::Index j = 0; j < sigma.size(); ++j) sigma[j] = log_threshold_scalar(sigma[j], t, eps, rule);
    const ComplexMatrix rebuilt =
        svd.left[i] * sigma.cast<std::complex<double>>().asDiagonal() * svd.right[i].adjoint();
    set_lateral_slice(shrunk, i, rebuilt);
  }
  InverseDft inv = idft_lateral(shrunk);
  if (inv.max_imag > 1e-8) {
    double peak = 0.0;
    for (double v : inv.real.data()) peak = std::max(peak, std::abs(v));
    throw NumericalError("ltnn_prox: imaginary residual " + std::to_string(inv.max_imag) + " (peak " + std::to_string(peak) + ")" +
                         " after inverse transform (conjugate symmetry broken)");
  }
  return std::move(inv.real);
}

}  // namespace logtr
