#include "logtr/solver.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace logtr {

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValueError(std::string("solver config: ") + what);
  };
  for (auto r : ranks) require(r > 0, "ranks must be positive");
  require(lambda > 0.0, "lambda must be positive");
  require(eta > 0.0, "eta must be positive");
  require(mu > 0.0, "mu must be positive");
  require(alpha >= 0.0, "alpha must be nonnegative");
  require(beta >= 0.0, "beta must be nonnegative");
  require(eps_log > 0.0, "eps_log must be positive");
  require(varsigma > 0.0, "varsigma must be positive");
  require(inner_tol > 0.0 && cg_tol > 0.0 && stop_tol > 0.0, "tolerances must be positive");
  require(inner_max >= 1 && cg_max >= 1, "iteration caps must be at least 1");
}

Matrix build_difference_matrix(std::size_t extent) {
  if (extent < 2) throw ValueError("difference matrix needs extent >= 2");
  const auto n = static_cast<Eigen::Index>(extent);
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    d(i, i) = -1.0;
    d(i, i + 1) = 1.0;
  }
  return d;
}

namespace {

Matrix identity(std::size_t n) { return Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)); }

std::size_t fixed_extent(const TRFactors& f, std::size_t n) { return f.cores[n].extent(1); }

void check_observations(const Tensor& y, const Tensor& z, const DegradationModel& model) {
  const Dims hr{static_cast<std::size_t>(model.width_op.cols()), static_cast<std::size_t>(model.height_op.cols()),
                static_cast<std::size_t>(model.spectral_op.cols())};
  if (y.dims() != model.lr_hsi_dims(hr)) {
    throw ShapeError("LR-HSI dims " + to_string(y.dims()) + " do not match operators (expected " +
                     to_string(model.lr_hsi_dims(hr)) + ")");
  }
  if (z.dims() != model.hr_msi_dims(hr)) {
    throw ShapeError("HR-MSI dims " + to_string(z.dims()) + " do not match operators (expected " +
                     to_string(model.hr_msi_dims(hr)) + ")");
  }
}

double frob2(const Matrix& m) { return m.squaredNorm(); }

}  // namespace

double objective(const TRFactors& cores, const Tensor& y, const Tensor& z, const DegradationModel& model,
                 const SolverConfig& cfg, const std::optional<TvWeights>& weights) {
  check_observations(y, z, model);
  const Tensor yfit = compose(lr_hsi_factors(cores, model));
  const Tensor zfit = compose(hr_msi_factors(cores, model));
  if (yfit.dims() != y.dims() || zfit.dims() != z.dims()) throw ShapeError("objective: cores do not match data");
  const double ry = frobenius_norm(y - yfit), rz = frobenius_norm(z - zfit);
  double value = 0.5 * ry * ry + 0.5 * cfg.lambda * rz * rz;
  for (std::size_t n = 0; n < 3; ++n) {
    const double a = cfg.alpha_for(n), b = cfg.beta_for(n);
    if (a > 0.0) {
      const Tensor gd = mode_n_product(cores.cores[n], build_difference_matrix(fixed_extent(cores, n)), 1);
      const Tensor w = weights ? (*weights)[n] : update_weights(gd, cfg.varsigma);
      value += a * l1_norm(hadamard(w, gd));
    }
    if (b > 0.0) value += b * ltnn_value(cores.cores[n], cfg.eps_log);
  }
  return value;
}

Matrix SylvesterSystem::apply(const Matrix& g) const {
  if (g.rows() != ata_y.rows() || g.cols() != ppt_y.rows()) {
    throw ShapeError("sylvester_apply: argument is " + std::to_string(g.rows()) + "x" + std::to_string(g.cols()) +
                     ", system expects " + std::to_string(ata_y.rows()) + "x" + std::to_string(ppt_y.rows()));
  }
  return ata_y * g * ppt_y + lambda * (ata_z * g * ppt_z) + (eta + mu) * g + mu * (dtd * g);
}

SylvesterSystem build_sylvester(std::size_t block, const TRFactors& cores, const Tensor& y, const Tensor& z,
                                const DegradationModel& model, const SolverConfig& cfg) {
  if (block > 2) throw ShapeError("block index must be 0, 1 or 2");
  check_observations(y, z, model);
  const TRFactors cy = lr_hsi_factors(cores, model);
  const TRFactors cz = hr_msi_factors(cores, model);
  const std::size_t extent = fixed_extent(cores, block);

  Matrix ay, az;
  switch (block) {
    case 0:
      ay = model.width_op;
      az = identity(extent);
      break;
    case 1:
      ay = model.height_op;
      az = identity(extent);
      break;
    default:
      ay = identity(extent);
      az = model.spectral_op;
      break;
  }

  const Matrix sy = unfold_cyclic(subchain(cy, block), 1);  // P_y^T
  const Matrix sz = unfold_cyclic(subchain(cz, block), 1);  // P_z^T
  SylvesterSystem sys;
  sys.block = block;
  sys.ata_y = ay.transpose() * ay;
  sys.ata_z = az.transpose() * az;
  sys.ppt_y = sy.transpose() * sy;
  sys.ppt_z = sz.transpose() * sz;
  sys.difference = build_difference_matrix(extent);
  sys.dtd = sys.difference.transpose() * sys.difference;
  sys.data_rhs = ay.transpose() * unfold_cyclic(y, block) * sy + cfg.lambda * (az.transpose() * unfold_cyclic(z, block) * sz);
  sys.lambda = cfg.lambda;
  sys.eta = cfg.eta;
  sys.mu = cfg.mu;
  return sys;
}

CgResult cg_solve(const LinearMap& apply, const Matrix& rhs, const Matrix& x0, double tol, std::size_t max_iter) {
  if (x0.rows() != rhs.rows() || x0.cols() != rhs.cols()) throw ShapeError("cg_solve: start and rhs shapes differ");
  CgResult out;
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    out.x = Matrix::Zero(rhs.rows(), rhs.cols());
    out.converged = true;
    return out;
  }
  out.x = x0;
  Matrix r = rhs - apply(out.x);
  Matrix p = r;
  double rr = frob2(r);
  for (; out.iterations < max_iter; ++out.iterations) {
    if (std::sqrt(rr) <= tol * bnorm) break;
    const Matrix ap = apply(p);
    const double pap = (p.array() * ap.array()).sum();
    if (!std::isfinite(pap)) throw CgFailure("cg_solve: non-finite curvature at iteration " + std::to_string(out.iterations));
    if (pap <= 0.0) throw CgFailure("cg_solve: operator is not positive definite");
    const double step = rr / pap;
    out.x += step * p;
    r -= step * ap;
    const double rr_next = frob2(r);
    if (!std::isfinite(rr_next)) throw CgFailure("cg_solve: non-finite residual at iteration " + std::to_string(out.iterations));
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  out.relative_residual = (rhs - apply(out.x)).norm() / bnorm;
  out.converged = out.relative_residual <= tol;
  return out;
}

CgResult cg_solve(const LinearMap& apply, const Matrix& rhs, double tol, std::size_t max_iter) {
  return cg_solve(apply, rhs, Matrix::Zero(rhs.rows(), rhs.cols()), tol, max_iter);
}

BlockState fresh_block(const Tensor& core) {
  BlockState b;
  b.tv_split = Tensor(core.dims());
  b.ltnn_split = Tensor(core.dims());
  b.tv_dual = Tensor(core.dims());
  b.ltnn_dual = Tensor(core.dims());
  b.weights = Tensor(core.dims(), 0.0);
  return b;
}

void update_block(std::size_t block, SolverState& state, const Tensor& y, const Tensor& z,
                  const DegradationModel& model, const SolverConfig& cfg) {
  const SylvesterSystem sys = build_sylvester(block, state.cores, y, z, model, cfg);
  const Tensor anchor = state.cores.cores[block];
  const Dims dims = anchor.dims();
  const double mu = cfg.mu;
  const double alpha = cfg.alpha_for(block), beta = cfg.beta_for(block);

  BlockState bs = fresh_block(anchor);
  Tensor g = anchor;
  const LinearMap apply = [&sys](const Matrix& m) { return sys.apply(m); };
  const Matrix anchor_rhs = cfg.eta * unfold_first(anchor, 1);

  for (std::size_t sweep = 0; sweep < cfg.inner_max; ++sweep) {
    const Tensor previous = g;

    // R-step: reweighted soft shrinkage of the split differences.
    Tensor j = mode_n_product(g, sys.difference, 1);
    j -= bs.tv_dual * (1.0 / mu);
    bs.weights = update_weights(j, cfg.varsigma);
    bs.tv_split = alpha > 0.0 ? soft_shrink_weighted(j, alpha / mu, bs.weights) : j;

    // G-step: generalized Sylvester system by CG.
    const Tensor tv_target = bs.tv_split + bs.tv_dual * (1.0 / mu);
    const Tensor ltnn_target = bs.ltnn_split + bs.ltnn_dual * (1.0 / mu);
    const Matrix rhs = sys.data_rhs + anchor_rhs + mu * (sys.difference.transpose() * unfold_first(tv_target, 1)) +
                       mu * unfold_first(ltnn_target, 1);
    CgResult cg;
    try {
      cg = cg_solve(apply, rhs, unfold_first(g, 1), cfg.cg_tol, cfg.cg_max);
    } catch (const CgFailure& e) {
      std::ostringstream os;
      os << "core " << block << ", ADMM sweep " << sweep << ": " << e.what();
      throw CgFailure(os.str());
    }
    bs.cg_iterations += cg.iterations;
    g = fold(cg.x, 1, dims, Unfolding::First);

    // V-step: logarithmic t-SVT.
    Tensor shifted = g - bs.ltnn_dual * (1.0 / mu);
    bs.ltnn_split = beta > 0.0 ? ltnn_prox(shifted, beta / mu, cfg.eps_log, cfg.threshold_rule) : std::move(shifted);

    // Multiplier ascent.
    const Tensor gd = mode_n_product(g, sys.difference, 1);
    const Tensor tv_gap = bs.tv_split - gd;
    const Tensor ltnn_gap = bs.ltnn_split - g;
    bs.tv_dual += tv_gap * mu;
    bs.ltnn_dual += ltnn_gap * mu;
    bs.tv_residual.push_back(frobenius_norm(tv_gap));
    bs.ltnn_residual.push_back(frobenius_norm(ltnn_gap));
    bs.sweeps = sweep + 1;

    const double gn = frobenius_norm(g);
    if (gn == 0.0 || frobenius_norm(g - previous) / gn < cfg.inner_tol) break;
  }

  if (cfg.monotone) {
    TRFactors trial = state.cores;
    const double reference = objective(trial, y, z, model, cfg);
    auto augmented = [&](const Tensor& candidate) {
      trial.cores[block] = candidate;
      const double d = frobenius_norm(candidate - anchor);
      return objective(trial, y, z, model, cfg) + 0.5 * cfg.eta * d * d;
    };
    if (!(augmented(g) <= reference)) {
      if (augmented(bs.ltnn_split) <= reference) {
        g = bs.ltnn_split;
        bs.outcome = BlockState::Outcome::LtnnSplit;
      } else {
        g = anchor;
        bs.outcome = BlockState::Outcome::Rejected;
      }
    }
  }
  state.cores.cores[block] = std::move(g);
  state.blocks[block] = std::move(bs);
}

namespace {

// Copies `core` into an ra x I x rb core, filling added rank slots with small noise.
Tensor fit_core(const Tensor& core, std::size_t ra, std::size_t rb, std::mt19937_64& rng) {
  if (core.extent(0) == ra && core.extent(2) == rb) return core;
  const double rms = frobenius_norm(core) / std::sqrt(static_cast<double>(core.size()));
  std::normal_distribution<double> normal(0.0, 1e-3 * (rms > 0.0 ? rms : 1.0));
  Tensor out({ra, core.extent(1), rb});
  for (std::size_t a = 0; a < ra; ++a)
    for (std::size_t i = 0; i < core.extent(1); ++i)
      for (std::size_t b = 0; b < rb; ++b)
        out(a, i, b) = (a < core.extent(0) && b < core.extent(2)) ? core(a, i, b) : normal(rng);
  return out;
}

}  // namespace

TRFactors initialize(const Tensor& y, const Tensor& z, const DegradationModel& model, const SolverConfig& cfg) {
  check_observations(y, z, model);
  const Dims hr{z.extent(0), z.extent(1), y.extent(2)};
  if (cfg.init == InitMethod::Random) {
    TRFactors f = random_init(hr, cfg.ranks, cfg.init_seed);
    // Match the data scale: compose(f) has entries of order one.
    const double scale = std::cbrt(frobenius_norm(z) / std::sqrt(static_cast<double>(z.size())));
    for (auto& c : f.cores) c *= scale;
    return f;
  }
  TrSvdOptions opts;
  opts.refine_sweeps = 30;
  opts.restarts = 0;
  const TRFactors from_z = tr_svd_init(z, cfg.ranks, opts);
  const TRFactors from_y = tr_svd_init(y, cfg.ranks, opts);
  std::mt19937_64 rng(cfg.init_seed);
  const auto& r = cfg.ranks;
  TRFactors f;
  f.cores[0] = fit_core(from_z.cores[0], r[0], r[1], rng);
  f.cores[1] = fit_core(from_z.cores[1], r[1], r[2], rng);
  f.cores[2] = fit_core(from_y.cores[2], r[2], r[0], rng);
  if (cfg.init_refit) {
    // Least-squares fit of Y_<2> = G2_(1) S^T with S from the degraded spatial cores.
    const Matrix s = unfold_cyclic(subchain(lr_hsi_factors(f, model), 2), 1);
    const Matrix gt = s.completeOrthogonalDecomposition().solve(unfold_cyclic(y, 2).transpose());
    f.cores[2] = fold(gt.transpose(), 1, f.cores[2].dims(), Unfolding::First);
  }
  return f;
}

FusionResult solve_from(TRFactors start, const Tensor& y, const Tensor& z, const DegradationModel& model,
                        const SolverConfig& cfg, const ProgressCallback& progress) {
  cfg.validate();
  check_observations(y, z, model);
  const Dims hr{z.extent(0), z.extent(1), y.extent(2)};
  if (start.dims() != hr) throw ShapeError("starting cores do not match the HR-HSI dims " + to_string(hr));
  for (std::size_t n = 0; n < 3; ++n) {
    if (hr[n] < 2) throw ShapeError("every HR-HSI extent must be at least 2");
  }

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  SolverState state;
  state.cores = std::move(start);
  for (std::size_t n = 0; n < 3; ++n) state.blocks[n] = fresh_block(state.cores.cores[n]);

  FusionResult result;
  result.initial_objective = objective(state.cores, y, z, model, cfg);
  if (!std::isfinite(result.initial_objective)) throw DivergenceError("objective is not finite at initialization", {});
  Tensor previous = compose(state.cores);

  for (std::size_t k = 1; k <= cfg.k_max; ++k) {
    for (std::size_t n = 0; n < 3; ++n) update_block(n, state, y, z, model, cfg);
    Tensor current = compose(state.cores);
    IterationRecord rec;
    rec.k = k;
    rec.objective = objective(state.cores, y, z, model, cfg);
    const double cn = frobenius_norm(current);
    rec.rel_change = cn > 0.0 ? frobenius_norm(current - previous) / cn : std::numeric_limits<double>::infinity();
    rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    result.history.push_back(rec);
    if (!std::isfinite(rec.objective) || !all_finite(current)) {
      throw DivergenceError("objective diverged at outer iteration " + std::to_string(k), result.history);
    }
    if (progress) progress(rec);
    previous = std::move(current);
    if (rec.rel_change <= cfg.stop_tol) {
      result.converged = true;
      break;
    }
  }
  result.fused = std::move(previous);
  result.cores = std::move(state.cores);
  return result;
}

FusionResult solve(const Tensor& y, const Tensor& z, const DegradationModel& model, const SolverConfig& cfg,
                   const ProgressCallback& progress) {
  cfg.validate();
  if (!all_finite(y) || !all_finite(z)) throw ValueError("observations contain NaN or Inf");
  return solve_from(initialize(y, z, model, cfg), y, z, model, cfg, progress);
}

}  // namespace logtr
