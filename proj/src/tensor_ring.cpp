#include "logtr/tensor_ring.hpp"

#include <cmath>
#include <random>

namespace logtr {

void TRFactors::validate() const {
  for (std::size_t n = 0; n < 3; ++n) {
    if (cores[n].order() != 3) throw ShapeError("TR core " + std::to_string(n) + " is not 3-way");
  }
  for (std::size_t n = 0; n < 3; ++n) {
    const auto& next = cores[(n + 1) % 3];
    if (cores[n].extent(2) != next.extent(0)) {
      throw ShapeError("TR rank mismatch between core " + std::to_string(n) + " (" +
                       to_string(cores[n].dims()) + ") and core " + std::to_string((n + 1) % 3) + " (" +
                       to_string(next.dims()) + ")");
    }
  }
}

Ranks TRFactors::ranks() const {
  validate();
  return {cores[0].extent(0), cores[1].extent(0), cores[2].extent(0)};
}

Dims TRFactors::dims() const {
  validate();
  return {cores[0].extent(1), cores[1].extent(1), cores[2].extent(1)};
}

namespace {

Matrix slice(const Tensor& core, std::size_t i) {
  Matrix s(core.extent(0), core.extent(2));
  for (std::size_t r = 0; r < core.extent(0); ++r)
    for (std::size_t c = 0; c < core.extent(2); ++c) s(r, c) = core(r, i, c);
  return s;
}

}  // namespace

double evaluate_entry(const TRFactors& f, const std::array<std::size_t, 3>& index) {
  f.validate();
  for (std::size_t n = 0; n < 3; ++n) {
    if (index[n] >= f.cores[n].extent(1)) throw ShapeError("evaluate_entry: index out of range");
  }
  const Matrix chain = slice(f.cores[0], index[0]) * slice(f.cores[1], index[1]) * slice(f.cores[2], index[2]);
  return chain.trace();
}

Tensor merge_cores(const Tensor& a, const Tensor& b) {
  if (a.order() != 3 || b.order() != 3 || a.extent(2) != b.extent(0)) {
    throw ShapeError("merge_cores: incompatible cores " + to_string(a.dims()) + " and " + to_string(b.dims()));
  }
  const std::size_t ra = a.extent(0), ia = a.extent(1), rb = a.extent(2);
  const std::size_t ib = b.extent(1), rc = b.extent(2);
  Tensor out({ra, ia * ib, rc});
  for (std::size_t j = 0; j < ib; ++j) {
    for (std::size_t i = 0; i < ia; ++i) {
      const std::size_t s = i + ia * j;
      for (std::size_t p = 0; p < ra; ++p) {
        for (std::size_t q = 0; q < rc; ++q) {
          double acc = 0.0;
          for (std::size_t r = 0; r < rb; ++r) acc += a(p, i, r) * b(r, j, q);
          out(p, s, q) = acc;
        }
      }
    }
  }
  return out;
}

Tensor subchain(const TRFactors& f, std::size_t skip) {
  if (skip > 2) throw ShapeError("subchain: core index must be 0, 1 or 2");
  f.validate();
  return merge_cores(f.cores[(skip + 1) % 3], f.cores[(skip + 2) % 3]);
}

Tensor compose(const TRFactors& f) {
  const Dims dims = f.dims();
  const Matrix x0 = unfold_first(f.cores[0], 1) * unfold_cyclic(subchain(f, 0), 1).transpose();
  return fold(x0, 0, dims, Unfolding::Cyclic);
}

TRFactors rotate(const TRFactors& f, std::size_t start) {
  TRFactors out;
  for (std::size_t n = 0; n < 3; ++n) out.cores[n] = f.cores[(start + n) % 3];
  return out;
}

TRFactors with_mode_product(const TRFactors& f, std::size_t n, const Matrix& m) {
  TRFactors out = f;
  out.cores.at(n) = mode_n_product(f.cores[n], m, 1);
  return out;
}

double tr_als_sweep(TRFactors& f, const Tensor& t) {
  for (std::size_t n = 0; n < 3; ++n) {
    const Matrix sub = unfold_cyclic(subchain(f, n), 1);  // prod I x (R_n R_{n+1})
    const Matrix target = unfold_cyclic(t, n);            // I_n x prod I
    const Matrix gt = sub.completeOrthogonalDecomposition().solve(target.transpose());
    f.cores[n] = fold(gt.transpose(), 1, f.cores[n].dims(), Unfolding::First);
  }
  const double nt = frobenius_norm(t);
  return nt > 0.0 ? frobenius_norm(compose(f) - t) / nt : frobenius_norm(compose(f));
}

TRFactors tr_svd_init(const Tensor& t, Ranks ranks, const TrSvdOptions& options) {
  if (t.order() != 3) throw ShapeError("tr_svd_init expects a 3-way tensor");
  for (auto r : ranks) {
    if (r == 0) throw ValueError("tr_svd_init: ranks must be positive");
  }
  const std::size_t i0 = t.extent(0), i1 = t.extent(1), i2 = t.extent(2);
  std::size_t r0 = ranks[0], r1 = ranks[1], r2 = ranks[2];
  while (r0 * r1 > std::min(i0, i1 * i2)) {
    if (r1 >= r0 && r1 > 1) {
      --r1;
    } else {
      --r0;
    }
  }
  r2 = std::min({r2, r1 * i1, i2 * r0});

  TRFactors f;
  f.cores[0] = Tensor({r0, i0, r1});
  f.cores[1] = Tensor({r1, i1, r2});
  f.cores[2] = Tensor({r2, i2, r0});
  if (frobenius_norm(t) == 0.0) return f;

  // (a)-(c): I0 x (I1 I2) unfolding, rank r0*r1 basis split as (r0 fastest, r1).
  const Matrix x0 = unfold_first(t, 0);
  Eigen::BDCSVD<Matrix> svd0(x0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const std::size_t k0 = r0 * r1;
  const Matrix u0 = svd0.matrixU().leftCols(k0);
  const Matrix sv0 = svd0.singularValues().head(k0).asDiagonal() * svd0.matrixV().leftCols(k0).transpose();
  for (std::size_t b = 0; b < r1; ++b)
    for (std::size_t a = 0; a < r0; ++a)
      for (std::size_t i = 0; i < i0; ++i) f.cores[0](a, i, b) = u0(i, a + r0 * b);

  // (d): regroup S V^T as (r1, i1) x (i2, r0) and split with a rank-r2 SVD.
  Matrix c(r1 * i1, i2 * r0);
  for (std::size_t a = 0; a < r0; ++a)
    for (std::size_t b = 0; b < r1; ++b)
      for (std::size_t j = 0; j < i1; ++j)
        for (std::size_t k = 0; k < i2; ++k) c(b + r1 * j, k + i2 * a) = sv0(a + r0 * b, j + i1 * k);
  Eigen::BDCSVD<Matrix> svd1(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix u1 = svd1.matrixU().leftCols(r2);
  const Matrix sv1 = svd1.singularValues().head(r2).asDiagonal() * svd1.matrixV().leftCols(r2).transpose();
  for (std::size_t b = 0; b < r1; ++b)
    for (std::size_t j = 0; j < i1; ++j)
      for (std::size_t g = 0; g < r2; ++g) f.cores[1](b, j, g) = u1(b + r1 * j, g);
  for (std::size_t g = 0; g < r2; ++g)
    for (std::size_t k = 0; k < i2; ++k)
      for (std::size_t a = 0; a < r0; ++a) f.cores[2](g, k, a) = sv1(g, k + i2 * a);

  const double norm = frobenius_norm(t);
  auto refine = [&](TRFactors& g) {
    double err = frobenius_norm(compose(g) - t) / norm;
    for (std::size_t sweep = 0; sweep < options.refine_sweeps && err > options.refine_tol; ++sweep) {
      const double next = tr_als_sweep(g, t);
      if (!std::isfinite(next)) break;
      balance_cores(g);
      err = next;
    }
    return err;
  };

  double best_err = refine(f);
  for (std::size_t attempt = 0; attempt < options.restarts && best_err > options.refine_tol; ++attempt) {
    TRFactors candidate = random_init(t.dims(), {r0, r1, r2}, options.restart_seed + attempt);
    for (auto& v : candidate.cores[0].data()) v *= norm;
    const double err = refine(candidate);
    if (err < best_err) {
      best_err = err;
      f = std::move(candidate);
    }
  }
  balance_cores(f);
  return f;
}

void balance_cores(TRFactors& f) {
  std::array<double, 3> norms{};
  double log_mean = 0.0;
  for (std::size_t n = 0; n < 3; ++n) {
    norms[n] = frobenius_norm(f.cores[n]);
    if (norms[n] == 0.0 || !std::isfinite(norms[n])) return;
    log_mean += std::log(norms[n]) / 3.0;
  }
  const double target = std::exp(log_mean);
  for (std::size_t n = 0; n < 3; ++n) f.cores[n] *= target / norms[n];
}

TRFactors random_init(const Dims& dims, Ranks ranks, std::uint64_t seed) {
  if (dims.size() != 3) throw ShapeError("random_init expects three extents");
  for (auto r : ranks) {
    if (r == 0) throw ValueError("random_init: ranks must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  TRFactors f;
  for (std::size_t n = 0; n < 3; ++n) {
    const std::size_t ra = ranks[n], rb = ranks[(n + 1) % 3];
    const double scale = 1.0 / std::sqrt(static_cast<double>(ra * rb));
    f.cores[n] = Tensor({ra, dims[n], rb});
    for (double& v : f.cores[n].data()) v = scale * normal(rng);
  }
  return f;
}

}  // namespace logtr
