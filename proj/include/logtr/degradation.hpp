#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "logtr/tensor.hpp"
#include "logtr/tensor_ring.hpp"

namespace logtr {

enum class KernelKind { Gaussian, Delta, Explicit };

// 1-D blur kernel applied with circular boundary. Explicit taps cover offsets
// -floor((K-1)/2) .. ceil((K-1)/2) and are used as given (correlation order).
struct BlurSpec {
  KernelKind kind = KernelKind::Gaussian;
  std::size_t size = 7;
  double sigma = 2.0;
  std::vector<double> taps;  // KernelKind::Explicit only

  static BlurSpec gaussian(std::size_t size, double sigma) { return {KernelKind::Gaussian, size, sigma, {}}; }
  static BlurSpec delta() { return {KernelKind::Delta, 1, 0.0, {}}; }
  static BlurSpec explicit_taps(std::vector<double> taps) {
    const std::size_t n = taps.size();
    return {KernelKind::Explicit, n, 0.0, std::move(taps)};
  }
};

// Normalized taps of the 1-D kernel (sum 1).
std::vector<double> kernel_taps(const BlurSpec& blur);

// (extent/factor) x extent matrix: decimation (rows 0, d, 2d, ...) times the
// circular convolution matrix of the kernel. Rows sum to 1.
Matrix build_spatial_operator(std::size_t extent, std::size_t factor, const BlurSpec& blur);

using BandGroups = std::vector<std::vector<std::size_t>>;

// Contiguous partition of `bands` into `groups` nearly equal groups.
BandGroups contiguous_groups(std::size_t bands, std::size_t groups);

// b x B averaging matrix; each group must be non-empty and the groups must
// partition 0..B-1.
Matrix build_spectral_operator(std::size_t bands, const BandGroups& groups);

// Row-normalizes an explicit b x B response matrix (nonnegative, finite).
Matrix build_spectral_operator(const Matrix& response);

struct DegradationModel {
  Matrix width_op;     // U1: w x W
  Matrix height_op;    // U2: h x H
  Matrix spectral_op;  // U3: b x B
  BlurSpec blur;
  std::size_t factor = 1;

  // Throws ShapeError if x dims do not match the operators.
  void check_hsi_dims(const Dims& x) const;
  Dims lr_hsi_dims(const Dims& x) const;
  Dims hr_msi_dims(const Dims& x) const;
};

DegradationModel make_degradation(const Dims& hr_dims, std::size_t factor, const BlurSpec& blur,
                                  const Matrix& spectral_op);

struct Observations {
  Tensor lr_hsi;  // Y: w x h x B
  Tensor hr_msi;  // Z: W x H x b
};

Observations degrade(const Tensor& x, const DegradationModel& model);

// TR form of the observations: Y = Phi(G0 x U1, G1 x U2, G2), Z = Phi(G0, G1, G2 x U3).
TRFactors lr_hsi_factors(const TRFactors& f, const DegradationModel& model);
TRFactors hr_msi_factors(const TRFactors& f, const DegradationModel& model);

inline constexpr double kNoiseDisabled = std::numeric_limits<double>::infinity();

// t + n with n ~ N(0, sigma^2), sigma^2 = ||t||_F^2 / (numel * 10^(snr/10)).
// snr_db == +inf returns t unchanged.
Tensor add_noise(const Tensor& t, double snr_db, std::uint64_t seed);

// 10 log10(||clean||^2 / ||noisy - clean||^2).
double empirical_snr_db(const Tensor& clean, const Tensor& noisy);

}  // namespace logtr
