#pragma once

#include <cstddef>
#include <vector>

#include "logtr/tensor.hpp"

namespace logtr {

// Inputs are W x H x B tensors (band = mode 2) already on the [0, 255] scale.
struct MetricsOptions {
  double peak = 255.0;
  std::size_t ssim_window = 11;
  double ssim_sigma = 1.5;
  std::size_t uiqi_window = 32;
};

struct MetricsReport {
  double psnr = 0.0;   // dB, band average; +inf when identical
  double ssim = 0.0;
  double ergas = 0.0;
  double sam = 0.0;    // degrees
  double uiqi = 0.0;
  std::vector<double> band_psnr;
  std::vector<double> band_uiqi;
  std::size_t sam_skipped = 0;  // pixels with an all-zero spectrum
};

std::vector<double> psnr_per_band(const Tensor& ref, const Tensor& est, double peak = 255.0);
double psnr(const Tensor& ref, const Tensor& est, double peak = 255.0);

// Gaussian-windowed SSIM over all fully contained windows, averaged over bands.
// Bands smaller than the window use one global window.
std::vector<double> ssim_per_band(const Tensor& ref, const Tensor& est, const MetricsOptions& opts = {});
double ssim(const Tensor& ref, const Tensor& est, const MetricsOptions& opts = {});

// Throws ValueError when a reference band has zero mean or d < 1.
double ergas(const Tensor& ref, const Tensor& est, double d);

struct SamResult {
  double degrees = 0.0;
  std::size_t skipped = 0;
};
// Mean spectral angle; pixels where either spectrum is all zero are skipped.
// Throws ValueError if every pixel is skipped.
SamResult sam_detail(const Tensor& ref, const Tensor& est);
double sam(const Tensor& ref, const Tensor& est);

// Q-index over sliding square windows (stride 1), zero-denominator windows skipped.
// Bands smaller than the window use one global window. A band with no usable
// window is NaN and left out of the average.
std::vector<double> uiqi_per_band(const Tensor& ref, const Tensor& est, std::size_t window = 32);
double uiqi(const Tensor& ref, const Tensor& est, std::size_t window = 32);

MetricsReport evaluate(const Tensor& ref, const Tensor& est, double d, const MetricsOptions& opts = {});

// Affine map sending [lo, hi] to [0, 255]; applied identically to reference and estimate.
Tensor rescale_to_255(const Tensor& t, double lo, double hi);

}  // namespace logtr
