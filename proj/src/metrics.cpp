#include "logtr/metrics.hpp"

#include <cmath>
#include <limits>

namespace logtr {

namespace {

void check_pair(const Tensor& ref, const Tensor& est, const char* who) {
  if (ref.order() != 3) throw ShapeError(std::string(who) + ": expected W x H x B tensors");
  if (ref.dims() != est.dims()) {
    throw ShapeError(std::string(who) + ": dims " + to_string(ref.dims()) + " vs " + to_string(est.dims()));
  }
  if (ref.size() == 0) throw ShapeError(std::string(who) + ": empty tensor");
}

Matrix band(const Tensor& t, std::size_t b, double shift = 0.0) {
  Matrix m(static_cast<Eigen::Index>(t.extent(0)), static_cast<Eigen::Index>(t.extent(1)));
  for (std::size_t i = 0; i < t.extent(0); ++i)
    for (std::size_t j = 0; j < t.extent(1); ++j) m(i, j) = t(i, j, b) - shift;
  return m;
}

double band_mean(const Tensor& t, std::size_t b) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.extent(0); ++i)
    for (std::size_t j = 0; j < t.extent(1); ++j) s += t(i, j, b);
  return s / static_cast<double>(t.extent(0) * t.extent(1));
}

// Valid-mode separable correlation with a 1-D kernel on both axes.
Matrix filter_valid(const Matrix& m, const std::vector<double>& k) {
  const auto w = static_cast<Eigen::Index>(k.size());
  Matrix rows(m.rows() - w + 1, m.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index t = 0; t < w; ++t) s += k[t] * m(i + t, j);
      rows(i, j) = s;
    }
  Matrix out(rows.rows(), m.cols() - w + 1);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index t = 0; t < w; ++t) s += k[t] * rows(i, j + t);
      out(i, j) = s;
    }
  return out;
}

// Local weighted moments of two bands. Data are centred on the reference band
// mean first so the variance differences do not cancel badly.
struct Moments {
  Matrix mx, my, vx, vy, cxy;
};

Moments local_moments(const Tensor& ref, const Tensor& est, std::size_t b, const std::vector<double>& k) {
  const double shift = band_mean(ref, b);
  const Matrix x = band(ref, b, shift), y = band(est, b, shift);
  Moments m;
  m.mx = filter_valid(x, k);
  m.my = filter_valid(y, k);
  m.vx = filter_valid(x.cwiseProduct(x), k) - m.mx.cwiseProduct(m.mx);
  m.vy = filter_valid(y.cwiseProduct(y), k) - m.my.cwiseProduct(m.my);
  m.cxy = filter_valid(x.cwiseProduct(y), k) - m.mx.cwiseProduct(m.my);
  m.mx.array() += shift;
  m.my.array() += shift;
  return m;
}

Moments global_moments(const Tensor& ref, const Tensor& est, std::size_t b) {
  const double shift = band_mean(ref, b);
  const Matrix x = band(ref, b, shift), y = band(est, b, shift);
  const double n = static_cast<double>(x.size());
  const double mx = x.sum() / n, my = y.sum() / n;
  Moments m;
  m.mx = Matrix::Constant(1, 1, mx + shift);
  m.my = Matrix::Constant(1, 1, my + shift);
  m.vx = Matrix::Constant(1, 1, (x.array() - mx).square().sum() / n);
  m.vy = Matrix::Constant(1, 1, (y.array() - my).square().sum() / n);
  m.cxy = Matrix::Constant(1, 1, ((x.array() - mx) * (y.array() - my)).sum() / n);
  return m;
}

bool fits(const Tensor& t, std::size_t window) { return t.extent(0) >= window && t.extent(1) >= window; }

double nan_mean(const std::vector<double>& v) {
  double s = 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (!std::isnan(x)) {
      s += x;
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> psnr_per_band(const Tensor& ref, const Tensor& est, double peak) {
  check_pair(ref, est, "psnr");
  const std::size_t bands = ref.extent(2);
  std::vector<double> sse(bands, 0.0);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref[i] - est[i];
    sse[i % bands] += d * d;
  }
  const double pixels = static_cast<double>(ref.extent(0) * ref.extent(1));
  std::vector<double> out(bands);
  for (std::size_t b = 0; b < bands; ++b) {
    out[b] = sse[b] == 0.0 ? std::numeric_limits<double>::infinity()
                           : 10.0 * std::log10(peak * peak / (sse[b] / pixels));
  }
  return out;
}

double psnr(const Tensor& ref, const Tensor& est, double peak) { return mean(psnr_per_band(ref, est, peak)); }

std::vector<double> ssim_per_band(const Tensor& ref, const Tensor& est, const MetricsOptions& opts) {
  check_pair(ref, est, "ssim");
  if (opts.ssim_window == 0 || !(opts.ssim_sigma > 0.0)) throw ValueError("ssim: bad window parameters");
  const double c1 = std::pow(0.01 * opts.peak, 2), c2 = std::pow(0.03 * opts.peak, 2);
  std::vector<double> k(opts.ssim_window);
  const double centre = 0.5 * static_cast<double>(opts.ssim_window - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double x = static_cast<double>(i) - centre;
    k[i] = std::exp(-x * x / (2.0 * opts.ssim_sigma * opts.ssim_sigma));
    total += k[i];
  }
  for (double& v : k) v /= total;

  std::vector<double> out(ref.extent(2));
  for (std::size_t b = 0; b < out.size(); ++b) {
    const Moments m = fits(ref, opts.ssim_window) ? local_moments(ref, est, b, k) : global_moments(ref, est, b);
    const auto num = (2.0 * m.mx.array() * m.my.array() + c1) * (2.0 * m.cxy.array() + c2);
    const auto den = (m.mx.array().square() + m.my.array().square() + c1) * (m.vx.array() + m.vy.array() + c2);
    out[b] = (num / den).mean();
  }
  return out;
}

double ssim(const Tensor& ref, const Tensor& est, const MetricsOptions& opts) {
  return mean(ssim_per_band(ref, est, opts));
}

double ergas(const Tensor& ref, const Tensor& est, double d) {
  check_pair(ref, est, "ergas");
  if (!(d >= 1.0)) throw ValueError("ergas: downsampling factor must be >= 1");
  const std::size_t bands = ref.extent(2);
  std::vector<double> sse(bands, 0.0), sum(bands, 0.0);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double e = ref[i] - est[i];
    sse[i % bands] += e * e;
    sum[i % bands] += ref[i];
  }
  const double pixels = static_cast<double>(ref.extent(0) * ref.extent(1));
  double acc = 0.0;
  for (std::size_t b = 0; b < bands; ++b) {
    const double mu = sum[b] / pixels;
    if (mu == 0.0) throw ValueError("ergas: reference band " + std::to_string(b) + " has zero mean");
    acc += (sse[b] / pixels) / (mu * mu);
  }
  return 100.0 / d * std::sqrt(acc / static_cast<double>(bands));
}

SamResult sam_detail(const Tensor& ref, const Tensor& est) {
  check_pair(ref, est, "sam");
  const std::size_t bands = ref.extent(2), pixels = ref.extent(0) * ref.extent(1);
  SamResult r;
  double total = 0.0;
  std::vector<double> u(bands), v(bands);
  for (std::size_t p = 0; p < pixels; ++p) {
    const double* x = ref.data().data() + p * bands;
    const double* y = est.data().data() + p * bands;
    double nx = 0.0, ny = 0.0;
    for (std::size_t b = 0; b < bands; ++b) {
      nx += x[b] * x[b];
      ny += y[b] * y[b];
    }
    if (nx == 0.0 || ny == 0.0) {
      ++r.skipped;
      continue;
    }
    nx = std::sqrt(nx);
    ny = std::sqrt(ny);
    // Half-angle form of arccos(<x,y>/(|x||y|)): exact at 0 and accurate near it.
    double diff = 0.0, sum = 0.0;
    for (std::size_t b = 0; b < bands; ++b) {
      const double a = x[b] / nx, c = y[b] / ny;
      diff += (a - c) * (a - c);
      sum += (a + c) * (a + c);
    }
    total += 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
  }
  if (r.skipped == pixels) throw ValueError("sam: every pixel has an all-zero spectrum");
  r.degrees = total / static_cast<double>(pixels - r.skipped) * (180.0 / M_PI);
  return r;
}

double sam(const Tensor& ref, const Tensor& est) { return sam_detail(ref, est).degrees; }

std::vector<double> uiqi_per_band(const Tensor& ref, const Tensor& est, std::size_t window) {
  check_pair(ref, est, "uiqi");
  if (window == 0) throw ValueError("uiqi: window must be positive");
  const std::vector<double> k(window, 1.0 / static_cast<double>(window));
  std::vector<double> out(ref.extent(2));
  for (std::size_t b = 0; b < out.size(); ++b) {
    const Moments m = fits(ref, window) ? local_moments(ref, est, b, k) : global_moments(ref, est, b);
    double s = 0.0;
    std::size_t used = 0;
    for (Eigen::Index i = 0; i < m.mx.size(); ++i) {
      const double mx = m.mx.data()[i], my = m.my.data()[i];
      const double den = (m.vx.data()[i] + m.vy.data()[i]) * (mx * mx + my * my);
      if (den == 0.0) continue;
      s += 4.0 * m.cxy.data()[i] * mx * my / den;
      ++used;
    }
    out[b] = used ? s / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double uiqi(const Tensor& ref, const Tensor& est, std::size_t window) {
  return nan_mean(uiqi_per_band(ref, est, window));
}

MetricsReport evaluate(const Tensor& ref, const Tensor& est, double d, const MetricsOptions& opts) {
  MetricsReport r;
  r.band_psnr = psnr_per_band(ref, est, opts.peak);
  r.psnr = mean(r.band_psnr);
  r.ssim = ssim(ref, est, opts);
  r.ergas = ergas(ref, est, d);
  const SamResult s = sam_detail(ref, est);
  r.sam = s.degrees;
  r.sam_skipped = s.skipped;
  r.band_uiqi = uiqi_per_band(ref, est, opts.uiqi_window);
  r.uiqi = nan_mean(r.band_uiqi);
  return r;
}

Tensor rescale_to_255(const Tensor& t, double lo, double hi) {
  if (!(hi > lo)) throw ValueError("rescale_to_255: empty range");
  Tensor out = t;
  for (double& v : out.data()) v = (v - lo) * (255.0 / (hi - lo));
  return out;
}

}  // namespace logtr
