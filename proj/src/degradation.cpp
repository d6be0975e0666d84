#include "logtr/degradation.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace logtr {

std::vector<double> kernel_taps(const BlurSpec& blur) {
  std::vector<double> taps;
  switch (blur.kind) {
    case KernelKind::Delta:
      taps = {1.0};
      break;
    case KernelKind::Gaussian: {
      if (blur.size == 0 || blur.size % 2 == 0) throw ValueError("Gaussian kernel size must be odd");
      if (!(blur.sigma > 0.0)) throw ValueError("Gaussian kernel sigma must be positive");
      const double half = static_cast<double>(blur.size / 2);
      taps.resize(blur.size);
      for (std::size_t i = 0; i < blur.size; ++i) {
        const double x = static_cast<double>(i) - half;
        taps[i] = std::exp(-x * x / (2.0 * blur.sigma * blur.sigma));
      }
      break;
    }
    case KernelKind::Explicit:
      taps = blur.taps;
      if (taps.empty()) throw ValueError("explicit kernel has no taps");
      for (double v : taps) {
        if (!std::isfinite(v) || v < 0.0) throw ValueError("explicit kernel taps must be finite and nonnegative");
      }
      break;
  }
  const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
  if (!(sum > 0.0)) throw ValueError("kernel taps sum to zero");
  for (double& v : taps) v /= sum;
  return taps;
}

Matrix build_spatial_operator(std::size_t extent, std::size_t factor, const BlurSpec& blur) {
  if (extent == 0 || factor == 0) throw ValueError("extent and factor must be positive");
  if (extent % factor != 0) {
    throw ValueError("decimation factor " + std::to_string(factor) + " does not divide extent " +
                     std::to_string(extent));
  }
  const auto taps = kernel_taps(blur);
  const long k = static_cast<long>(taps.size());
  const long lo = -(k - 1) / 2;
  const long n = static_cast<long>(extent);
  Matrix op = Matrix::Zero(static_cast<Eigen::Index>(extent / factor), n);
  for (Eigen::Index r = 0; r < op.rows(); ++r) {
    const long centre = static_cast<long>(r * factor);
    for (long t = 0; t < k; ++t) {
      const long col = ((centre + lo + t) % n + n) % n;
      op(r, col) += taps[t];
    }
  }
  return op;
}

BandGroups contiguous_groups(std::size_t bands, std::size_t groups) {
  if (groups == 0 || groups > bands) throw ValueError("band groups must satisfy 1 <= b <= B");
  BandGroups out(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t begin = g * bands / groups, end = (g + 1) * bands / groups;
    for (std::size_t i = begin; i < end; ++i) out[g].push_back(i);
  }
  return out;
}

Matrix build_spectral_operator(std::size_t bands, const BandGroups& groups) {
  if (groups.empty() || groups.size() > bands) throw ValueError("band groups must satisfy 1 <= b <= B");
  std::vector<int> seen(bands, 0);
  Matrix op = Matrix::Zero(static_cast<Eigen::Index>(groups.size()), static_cast<Eigen::Index>(bands));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw ValueError("band group " + std::to_string(g) + " is empty");
    for (auto band : groups[g]) {
      if (band >= bands) throw ValueError("band index " + std::to_string(band) + " out of range");
      if (seen[band]++) throw ValueError("band " + std::to_string(band) + " appears in two groups");
      op(g, band) = 1.0 / static_cast<double>(groups[g].size());
    }
  }
  for (std::size_t b = 0; b < bands; ++b) {
    if (!seen[b]) throw ValueError("band " + std::to_string(b) + " is not covered by any group");
  }
  return op;
}

Matrix build_spectral_operator(const Matrix& response) {
  if (response.rows() == 0 || response.rows() > response.cols()) {
    throw ValueError("spectral response must be b x B with 1 <= b <= B");
  }
  Matrix op = response;
  for (Eigen::Index r = 0; r < op.rows(); ++r) {
    for (Eigen::Index c = 0; c < op.cols(); ++c) {
      if (!std::isfinite(op(r, c)) || op(r, c) < 0.0) {
        throw ValueError("spectral response entries must be finite and nonnegative");
      }
    }
    const double sum = op.row(r).sum();
    if (!(sum > 0.0)) throw ValueError("spectral response row " + std::to_string(r) + " sums to zero");
    op.row(r) /= sum;
  }
  return op;
}

void DegradationModel::check_hsi_dims(const Dims& x) const {
  if (x.size() != 3 || static_cast<std::size_t>(width_op.cols()) != x[0] ||
      static_cast<std::size_t>(height_op.cols()) != x[1] || static_cast<std::size_t>(spectral_op.cols()) != x[2]) {
    throw ShapeError("degradation operators (" + std::to_string(width_op.cols()) + ", " +
                     std::to_string(height_op.cols()) + ", " + std::to_string(spectral_op.cols()) +
                     ") do not match HR-HSI dims " + to_string(x));
  }
}

Dims DegradationModel::lr_hsi_dims(const Dims& x) const {
  check_hsi_dims(x);
  return {static_cast<std::size_t>(width_op.rows()), static_cast<std::size_t>(height_op.rows()), x[2]};
}

Dims DegradationModel::hr_msi_dims(const Dims& x) const {
  check_hsi_dims(x);
  return {x[0], x[1], static_cast<std::size_t>(spectral_op.rows())};
}

DegradationModel make_degradation(const Dims& hr_dims, std::size_t factor, const BlurSpec& blur,
                                  const Matrix& spectral_op) {
  if (hr_dims.size() != 3) throw ShapeError("HR-HSI dims must be 3-way");
  DegradationModel m;
  m.width_op = build_spatial_operator(hr_dims[0], factor, blur);
  m.height_op = build_spatial_operator(hr_dims[1], factor, blur);
  m.spectral_op = spectral_op;
  m.blur = blur;
  m.factor = factor;
  m.check_hsi_dims(hr_dims);
  return m;
}

Observations degrade(const Tensor& x, const DegradationModel& model) {
  model.check_hsi_dims(x.dims());
  return {mode_n_product(mode_n_product(x, model.width_op, 0), model.height_op, 1),
          mode_n_product(x, model.spectral_op, 2)};
}

TRFactors lr_hsi_factors(const TRFactors& f, const DegradationModel& model) {
  return with_mode_product(with_mode_product(f, 0, model.width_op), 1, model.height_op);
}

TRFactors hr_msi_factors(const TRFactors& f, const DegradationModel& model) {
  return with_mode_product(f, 2, model.spectral_op);
}

Tensor add_noise(const Tensor& t, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return t;
  if (!std::isfinite(snr_db)) throw ValueError("snr_db must be finite or +inf");
  const double signal = frobenius_norm(t);
  if (signal == 0.0) throw ValueError("add_noise: zero-signal input has undefined SNR");
  const double variance = signal * signal / (static_cast<double>(t.size()) * std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  Tensor out = t;
  for (double& v : out.data()) v += normal(rng);
  return out;
}

double empirical_snr_db(const Tensor& clean, const Tensor& noisy) {
  const double s = frobenius_norm(clean), n = frobenius_norm(noisy - clean);
  return 20.0 * std::log10(s / n);
}

}  // namespace logtr
