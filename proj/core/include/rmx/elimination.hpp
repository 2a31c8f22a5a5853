#pragma once

#include <functional>

#include "rmx/linalg.hpp"
#include "rmx/matrix.hpp"
#include "rmx/rng.hpp"

namespace rmx {

/// Running record of pivot magnitudes during elimination with no pivoting;
/// lets callers check the N + N_ N^2 safety bound after the fact.
struct PivotMonitor {
    double max_pivot = 0.0;
    double max_pivot_recip = 0.0;
    double max_block_norm = 0.0;       // block variant only
    double max_block_inv_norm = 0.0;   // block variant only
};

struct GenpFactors {
    DenseMatrix lu;  // packed unit-lower L and upper U, no permutations
    PivotMonitor monitor;
};

/// Gaussian elimination with no pivoting.  A pivot magnitude below 1e-300 is
/// a hard failure: the input needs preprocessing, not a smaller epsilon.
GenpFactors genp(const DenseMatrix& a);

Vec genp_solve(const GenpFactors& f, const Vec& b);
DenseMatrix genp_solve_mat(const GenpFactors& f, const DenseMatrix& b);

/// Recursive 2x2 block elimination with Schur complements of the given block
/// size; block pivots are inverted densely and their norms monitored.
struct BlockGenpResult {
    DenseMatrix inverse_apply;  // dense inverse assembled from the recursion
    PivotMonitor monitor;
};
BlockGenpResult block_genp(const DenseMatrix& a, std::size_t block);
Vec block_genp_solve(const BlockGenpResult& f, const Vec& b);

enum class Multiplier { none, sign_circulant, householder, gaussian, gaussian_two_sided };

/// Solve A y = b by GENP after a randomized multiplier: (A M) z = b, y = M z,
/// or the two-sided G A H variant.  One automatic re-randomization on pivot
/// failure, then refinement with extended-precision residuals.
Vec randomized_genp_solve(const DenseMatrix& a, const Vec& b, Multiplier mult, int refine_steps,
                          Seed seed);

/// Generic refinement loop: y_{k+1} = y_k + solve(b - A y_k) with the
/// residual in extended precision.  Throws on two consecutive growth steps.
Vec iterative_refinement(const std::function<Vec(const Vec&)>& apply_a,
                         const std::function<Vec(const Vec&)>& approx_solve, const Vec& b,
                         int steps);

/// Matrix right-hand-side version used by the solvers' pipelines.
DenseMatrix iterative_refinement_mat(const DenseMatrix& a,
                                     const std::function<Vec(const Vec&)>& approx_solve,
                                     const DenseMatrix& b, int steps);

}  // namespace rmx
