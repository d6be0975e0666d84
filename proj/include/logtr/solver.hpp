#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "logtr/degradation.hpp"
#include "logtr/prox.hpp"
#include "logtr/tensor_ring.hpp"

namespace logtr {

enum class InitMethod { TrSvd, Random };

struct SolverConfig {
  Ranks ranks{2, 4, 2};
  double lambda = 1.0;    // HR-MSI fidelity weight
  double alpha = 1e-4;    // weighted-TV weight
  double beta = 1e-3;     // LTNN weight
  double eta = 0.1;       // PAM proximal weight
  double mu = 0.1;        // ADMM penalty
  double eps_log = 1e-2;  // LTNN offset
  double varsigma = 1e-3;
  std::size_t k_max = 50;
  std::size_t inner_max = 10;
  double inner_tol = 1e-3;
  double cg_tol = 1e-6;
  std::size_t cg_max = 300;
  double stop_tol = 1e-4;
  InitMethod init = InitMethod::TrSvd;
  std::uint64_t init_seed = 0;
  // Per-core on/off switches for the regularizers (ablations zero coefficients only).
  std::array<bool, 3> tv_enabled{true, true, true};
  std::array<bool, 3> ltnn_enabled{true, true, true};
  ThresholdRule threshold_rule = ThresholdRule::GlobalMin;
  // Reject a block update that raises f + eta/2 ||G - G^k||^2 above f at G^k:
  // fall back to the LTNN split V_n, then to G^k.
  bool monotone = true;
  // Refit the spectral core against Y in the gauge of the Z-derived spatial cores.
  bool init_refit = true;

  double alpha_for(std::size_t core) const { return tv_enabled.at(core) ? alpha : 0.0; }
  double beta_for(std::size_t core) const { return ltnn_enabled.at(core) ? beta : 0.0; }

  // Throws ValueError on out-of-range values.
  void validate() const;
};

// Square forward-difference matrix: D(i,i) = -1, D(i,i+1) = 1, last row zero.
Matrix build_difference_matrix(std::size_t extent);

// ADMM state of one core block.
struct BlockState {
  Tensor tv_split;     // R_n, matches core x_1 D
  Tensor ltnn_split;   // V_n
  Tensor tv_dual;      // M_n
  Tensor ltnn_dual;    // N_n
  Tensor weights;      // W^(n)
  std::size_t sweeps = 0;
  std::size_t cg_iterations = 0;
  // Per sweep: ||R_n - G x_1 D||_F and ||V_n - G||_F after the multiplier update.
  std::vector<double> tv_residual;
  std::vector<double> ltnn_residual;
  enum class Outcome { Admm, LtnnSplit, Rejected } outcome = Outcome::Admm;
};

struct SolverState {
  TRFactors cores;
  std::array<BlockState, 3> blocks;
};

struct IterationRecord {
  std::size_t k = 0;
  double objective = 0.0;
  double rel_change = 0.0;
  double seconds = 0.0;
};

struct FusionResult {
  Tensor fused;
  TRFactors cores;
  double initial_objective = 0.0;
  std::vector<IterationRecord> history;
  bool converged = false;
};

// Objective evaluated at a non-finite value; carries the trace so far.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::vector<IterationRecord> trace)
      : std::runtime_error(what), history(std::move(trace)) {}
  std::vector<IterationRecord> history;
};

// CG did not produce finite iterates.
class CgFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Weighted-TV weights used when evaluating the objective. Without explicit
// weights the objective uses W = 1 / (|G x_1 D| + varsigma) at the given cores.
using TvWeights = std::array<Tensor, 3>;

double objective(const TRFactors& cores, const Tensor& y, const Tensor& z, const DegradationModel& model,
                 const SolverConfig& cfg, const std::optional<TvWeights>& weights = std::nullopt);

// Frozen Gram products of the core-n normal equations
//   A_y^T A_y G PyPy^T + lambda A_z^T A_z G PzPz^T + (eta + mu) G + mu D^T D G = rhs
// with (A_y, A_z) = (U1, I), (U2, I), (I, U3) for n = 0, 1, 2 and P the transposed
// mode-1 subchain unfoldings of the degraded fixed cores.
struct SylvesterSystem {
  std::size_t block = 0;
  Matrix ata_y, ata_z;   // I_n x I_n
  Matrix ppt_y, ppt_z;   // R_n R_{n+1} square
  Matrix dtd;            // D^T D
  Matrix difference;     // D
  Matrix data_rhs;       // A_y^T Y_<n> P_y^T + lambda A_z^T Z_<n> P_z^T
  double lambda = 1.0, eta = 0.0, mu = 0.0;

  // Left-hand side applied to G_(1) (I_n x R_n R_{n+1}).
  Matrix apply(const Matrix& g) const;
};

SylvesterSystem build_sylvester(std::size_t block, const TRFactors& cores, const Tensor& y, const Tensor& z,
                                const DegradationModel& model, const SolverConfig& cfg);

inline Matrix sylvester_apply(const SylvesterSystem& system, const Matrix& g) { return system.apply(g); }

struct CgResult {
  Matrix x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

using LinearMap = std::function<Matrix(const Matrix&)>;

// Conjugate gradients on the Frobenius inner product, warm-started at x0.
CgResult cg_solve(const LinearMap& apply, const Matrix& rhs, const Matrix& x0, double tol, std::size_t max_iter);
CgResult cg_solve(const LinearMap& apply, const Matrix& rhs, double tol, std::size_t max_iter);

// Zeroed auxiliaries/multipliers for core n.
BlockState fresh_block(const Tensor& core);

// One PAM step for core n: ADMM sweeps (shrink, CG solve, LTNN prox, ascent)
// starting from zeroed auxiliaries, with the other cores frozen.
void update_block(std::size_t block, SolverState& state, const Tensor& y, const Tensor& z,
                  const DegradationModel& model, const SolverConfig& cfg);

// Initial cores: TR-SVD of Z gives cores 0 and 1, TR-SVD of Y gives core 2
// (refit against Y when cfg.init_refit); or random cores for InitMethod::Random.
TRFactors initialize(const Tensor& y, const Tensor& z, const DegradationModel& model, const SolverConfig& cfg);

using ProgressCallback = std::function<void(const IterationRecord&)>;

// Initializes and runs the PAM loop. Throws ValueError on non-finite observations
// and DivergenceError when the objective stops being finite.
FusionResult solve(const Tensor& y, const Tensor& z, const DegradationModel& model, const SolverConfig& cfg,
                   const ProgressCallback& progress = {});

// Same loop from explicit starting cores.
FusionResult solve_from(TRFactors start, const Tensor& y, const Tensor& z, const DegradationModel& model,
                        const SolverConfig& cfg, const ProgressCallback& progress = {});

}  // namespace logtr
