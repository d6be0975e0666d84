#pragma once

#include <vector>

#include "logtr/tensor.hpp"

namespace logtr {

// sign(j) * max(|j| - tau * w, 0), elementwise. Requires w >= 0.
Tensor soft_shrink_weighted(const Tensor& j, double tau, const Tensor& w);

// Reweighting rule W = 1 / (|J| + varsigma).
Tensor update_weights(const Tensor& j, double varsigma);

// Per-lateral-slice SVD of the mode-1 DFT of a 3-way tensor.
struct LateralSVD {
  ComplexTensor spectrum;                 // dft_lateral(g)
  std::vector<ComplexMatrix> left;        // U^[i], R_a x k
  std::vector<Eigen::VectorXd> singular;  // sigma^[i], nonincreasing, k = min(R_a, R_b)
  std::vector<ComplexMatrix> right;       // V^[i], R_b x k
};

// Slices past the midpoint are taken as conjugates of their mirrors, so the
// singular values of slice i and slice I-i agree exactly for real input.
LateralSVD lateral_tsvd(const Tensor& g);

// (1/I_2) sum_i sum_j log(sigma_j(G^[i]) + eps).
double ltnn_value(const Tensor& g, double eps);

enum class ThresholdRule {
  // argmin_{x >= 0} t log(x + eps) + (x - s)^2 / 2: the larger stationary root when it
  // beats the x = 0 candidate, otherwise 0.
  GlobalMin,
  // The closed-form root alone: 0 if c2 <= 0, else (c1 + sqrt(c2)) / 2 (clamped at 0).
  StationaryRoot,
};

// Logarithmic shrinkage of one singular value magnitude s with threshold t.
// c1 = |s| - eps, c2 = c1^2 - 4 (t - eps |s|).
double log_threshold_scalar(double s, double t, double eps, ThresholdRule rule = ThresholdRule::GlobalMin);

// Objective t log(x + eps) + (x - s)^2 / 2 minimized by log_threshold_scalar.
double log_threshold_objective(double x, double s, double t, double eps);

// Proximal map of t * LTNN: threshold every transformed-domain singular value
// and transform back along mode 1. Throws NumericalError if the imaginary
// residual of the inverse transform exceeds 1e-8.
Tensor ltnn_prox(const Tensor& a, double t, double eps, ThresholdRule rule = ThresholdRule::GlobalMin);

}  // namespace logtr
