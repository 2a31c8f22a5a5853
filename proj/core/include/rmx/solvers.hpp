#pragma once

#include "rmx/displacement.hpp"
#include "rmx/linalg.hpp"
#include "rmx/matrix.hpp"
#include "rmx/rng.hpp"
#include "rmx/structured.hpp"
#include "rmx/xprec.hpp"

namespace rmx {

/// Full additive-preprocessing + SMW pipeline with iterative refinement:
/// C = A + U V^T (extended precision), GENP inverse of C, refined solves of
/// C X = (U | b), xprec Schur matrix G = I - V^T X_U, then the recovery
/// y = x_b + X_U G^{-1} V^T x_b.
ExtVec solve_smw_refined(const DenseMatrix& a, const Vec& b, std::size_t r, Seed seed,
                        int refine_steps = 2);

/// Dual pipeline: y = (C_-^{-1} - U_ V_^T) b with C_ from dual preprocessing.
ExtVec solve_dual(const DenseMatrix& a, const Vec& b, std::size_t q, Seed seed,
                  int refine_steps = 2);

enum class BlockTriVariant { orthogonal, simplified, dual };

/// W = (K0|K1)^T A (L0|L1) with a strongly dominant leading block W00.
struct BlockTriangulation {
    DenseMatrix K0, K1, L0, L1;
    DenseMatrix W;           // assembled in extended precision
    std::size_t q = 0;       // numerical rank / leading block size
    bool orthogonal = false;
};

BlockTriangulation block_triangulate(const DenseMatrix& a, std::size_t q, BlockTriVariant variant,
                                     Seed seed, int refine_steps = 2);

/// Solve A y = b through the 2x2 block factorization of W (Schur complement
/// in extended precision): W x = (K0|K1)^T b, y = (L0|L1) x.
ExtVec solve_blocktri(const BlockTriangulation& bt, const DenseMatrix& a, const Vec& b);

/// Algorithm for a real symmetric Toeplitz system with numerical nullity <= 1:
/// embed T into a Toeplitz (n+1)x(n+1) K with randomized scaled corner
/// entries, solve K x = e_1 by Levinson plus refinement, and recover T^{-1}
/// in Gohberg-Semencul form.
struct ToeplitzAugReport {
    ExtVec y;
    double corner = 0.0;
    int corner_retries = 0;
};
ToeplitzAugReport toeplitz_solve_aug(const StructuredMatrix& t, const Vec& b, Seed seed,
                                     int refine_steps = 2);

/// Newton's iteration X <- X (2I - C X) from the transpose-scaled start.
struct NewtonResult {
    DenseMatrix X;
    std::vector<double> residual_norms;  // ||I - C X_i|| per accepted iterate
    int iterations = 0;
};
NewtonResult newton_inverse(const DenseMatrix& c, double tol, int max_iter = 100);

/// Structured Newton: iterates kept as displacement generators, recompressed
/// to d_target after every step.
struct NewtonToeplitzResult {
    DisplacementGenerator X;
    std::vector<double> residual_norms;
    int iterations = 0;
};
NewtonToeplitzResult newton_toeplitz(const DisplacementGenerator& c, std::size_t d_target,
                                     double tol, int max_iter = 100);

}  // namespace rmx
