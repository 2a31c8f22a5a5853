#pragma once

#include <optional>

#include "rmx/matrix.hpp"

namespace rmx {

/// Full SVD A = S diag(sigma) T^T with square orthogonal S (m x m) and
/// T (n x n); sigma has min(m,n) entries, sorted non-increasing.
struct SvdFactors {
    DenseMatrix S;
    Vec sigma;
    DenseMatrix T;

    DenseMatrix reconstruct() const;
};

struct SvdOptions {
    int max_sweeps = 30;          // exceeding this is an error, not a silent return
    double pair_tol = 1e-15;      // relative off-diagonal tolerance per column pair
};

/// One-sided Jacobi SVD with a fixed row-cyclic sweep order: deterministic
/// for a given input.  Throws NumericalError on non-convergence.
SvdFactors svd(const DenseMatrix& a, const SvdOptions& opts = {});

/// Orthogonal factor of the unique QR factorization with positive R diagonal.
/// Throws RankDeficiencyError when a diagonal of R falls below
/// 1e-13 * ||A||.
DenseMatrix qr_q(const DenseMatrix& a);

/// Q factor plus R, same conventions.
struct QrFactors {
    DenseMatrix Q;
    DenseMatrix R;
};
QrFactors qr(const DenseMatrix& a);

enum class NormKind { one, two, inf, frobenius };
double norm(const DenseMatrix& a, NormKind kind);

/// sigma_1 via a few power iterations; cheap upper-quality estimate used by
/// scaling heuristics (the exact 2-norm goes through svd()).
double norm2_estimate(const DenseMatrix& a, int iters = 60);

/// Default relative tolerance max(m,n) * 2^-52 when the caller does not pin one.
double default_rank_tol(std::size_t m, std::size_t n);

/// Largest rho with sigma_rho > tau * sigma_1; zero matrix gives 0.
std::size_t numerical_rank(const DenseMatrix& a, double tau);
std::size_t numerical_rank(const SvdFactors& f, double tau);

DenseMatrix pseudo_inverse(const DenseMatrix& a, double tau = 0.0);

/// Best rank-<=rho approximation by zeroing trailing singular values.
DenseMatrix truncate_svd(const DenseMatrix& a, std::size_t rho);

double cond2(const DenseMatrix& a);

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RankDeficiencyError : NumericalError {
    using NumericalError::NumericalError;
};

// --- dense LU with partial pivoting ---------------------------------------
// Support utility for oracles, condition statistics and well-conditioned
// auxiliary systems.  The no-pivoting elimination the library is actually
// about lives in elimination.hpp.

struct PluFactors {
    DenseMatrix lu;            // packed L\U
    std::vector<std::size_t> perm;
    int sign = 1;
    bool singular = false;
};

PluFactors plu(const DenseMatrix& a);
Vec plu_solve(const PluFactors& f, const Vec& b);
DenseMatrix plu_solve_mat(const PluFactors& f, const DenseMatrix& b);
Vec lu_solve(const DenseMatrix& a, const Vec& b);
DenseMatrix inverse(const DenseMatrix& a);

/// Extends the orthonormal columns of q (m x k) to an m x m orthogonal matrix.
DenseMatrix complete_orthonormal(const DenseMatrix& q);

/// Gram-Schmidt orthonormal basis of the columns (drops dependent columns).
DenseMatrix orthonormalize(const DenseMatrix& a, double drop_tol = 1e-12);

/// Principal angles between the column spans, returned as the largest sine.
double subspace_distance(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace rmx
