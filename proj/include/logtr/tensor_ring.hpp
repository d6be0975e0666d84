#pragma once

#include <array>
#include <cstdint>

#include "logtr/tensor.hpp"

namespace logtr {

using Ranks = std::array<std::size_t, 3>;

// Three-core tensor ring. Core n has dims R_n x I_n x R_{n+1} with R_3 == R_0.
struct TRFactors {
  std::array<Tensor, 3> cores;

  // Throws ShapeError unless every core is 3-way and adjacent ranks agree cyclically.
  void validate() const;
  Ranks ranks() const;
  Dims dims() const;
};

// Tr(G0(i0) G1(i1) G2(i2)) with Gn(i) the i-th lateral slice.
double evaluate_entry(const TRFactors& f, const std::array<std::size_t, 3>& index);

// Adjacent-core merge: a (Ra x Ia x Rb), b (Rb x Ib x Rc) -> Ra x (Ia*Ib) x Rc with
// lateral slice i + Ia*j equal to a(i) * b(j).
Tensor merge_cores(const Tensor& a, const Tensor& b);

// Merge of the two cores other than `skip`, in ring order starting at skip+1:
// dims R_{skip+1} x prod_{k != skip} I_k x R_skip.
Tensor subchain(const TRFactors& f, std::size_t skip);

// Full tensor I0 x I1 x I2. Evaluated through X_<0> = G0_(1) * subchain(f, 0)_<1>^T.
Tensor compose(const TRFactors& f);

// Ring relabelled so that core `start` comes first.
TRFactors rotate(const TRFactors& f, std::size_t start);

// Core `n` replaced by core_n x_1 m.
TRFactors with_mode_product(const TRFactors& f, std::size_t n, const Matrix& m);

struct TrSvdOptions {
  // Alternating least-squares sweeps run after the sequential SVDs. The two
  // SVD steps alone do not recover an exact-rank ring when R_0 > 1, because
  // the first basis mixes the (r0, r1) pair arbitrarily; the sweeps restore the fit.
  std::size_t refine_sweeps = 1500;
  // Seeded random restarts tried when the SVD start stalls above refine_tol.
  std::size_t restarts = 12;
  std::uint64_t restart_seed = 0x5eed;
  double refine_tol = 1e-12;
};

// Sequential truncated-SVD tensor-ring decomposition of a 3-way tensor.
// Ranks that exceed the unfolding dimensions are clamped; inspect the
// returned factors' ranks() for the effective values.
TRFactors tr_svd_init(const Tensor& t, Ranks ranks, const TrSvdOptions& options = {});

// Rescales the cores to a common Frobenius norm (their geometric mean). The
// composed tensor is unchanged; all-zero or non-finite rings are left alone.
void balance_cores(TRFactors& f);

// One ALS sweep over the three cores against `t`; returns rel. fit error after the sweep.
double tr_als_sweep(TRFactors& f, const Tensor& t);

// Standard-normal cores scaled by 1/sqrt(R_n R_{n+1}), deterministic in seed.
TRFactors random_init(const Dims& dims, Ranks ranks, std::uint64_t seed);

}  // namespace logtr
