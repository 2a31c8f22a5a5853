#pragma once

#include "rmx/linalg.hpp"
#include "rmx/matrix.hpp"

namespace rmx {

/// Factored Sylvester displacement Z_e M - M Z_f = G H^T for an n x n
/// Toeplitz-like matrix M.  The width of G and H is the generator length.
struct DisplacementGenerator {
    DenseMatrix G;  // n x d
    DenseMatrix H;  // n x d
    double e = 1.0;
    double f = -1.0;

    std::size_t size() const { return G.rows(); }
    std::size_t length() const { return G.cols(); }
};

/// Read a generator off a dense matrix; length is the numerical rank of the
/// displacement at tolerance rank_tol * ||M||.
DisplacementGenerator dgen_from_dense(const DenseMatrix& m, double e, double f,
                                      double rank_tol = 1e-10);

/// (e - f) M = sum_j Z_e(g_j) Z_f(J h_j); O(d n^2) densification.
DenseMatrix dgen_to_dense(const DisplacementGenerator& g);

/// y = M x in O(d n log n) through the circulant expansion.
Vec dgen_apply(const DisplacementGenerator& g, const Vec& x);
Vec dgen_apply_transposed(const DisplacementGenerator& g, const Vec& x);
DenseMatrix dgen_apply_mat(const DisplacementGenerator& g, const DenseMatrix& x);

/// alpha*M + beta*N; operators must match.  Length d_M + d_N before compression.
DisplacementGenerator dgen_add(const DisplacementGenerator& a, const DisplacementGenerator& b,
                               double alpha = 1.0, double beta = 1.0);

/// Generator of M^T under the operator pair (1/f, 1/e); same length.
DisplacementGenerator dgen_transpose(const DisplacementGenerator& g);

/// Generator of M N under (e, f); length d_M + d_N + 1 (one operator-conversion
/// column).  Operators of the inputs must match.
DisplacementGenerator dgen_product(const DisplacementGenerator& a, const DisplacementGenerator& b);

/// Generator of M^{-1} under the swapped pair (f, e); same length.  Densifies
/// to solve, so intended for desk-scale use and the Newton initialization.
DisplacementGenerator dgen_inverse(const DisplacementGenerator& g);

/// Truncate the displacement's SVD to the target length (or to relative
/// tolerance tol when target == SIZE_MAX); the discarded singular values are
/// the introduced displacement error.
DisplacementGenerator dgen_compress(const DisplacementGenerator& g,
                                    std::size_t target_length = SIZE_MAX, double tol = 1e-13);

/// Change the operator pair, adding at most one column per changed scalar.
DisplacementGenerator dgen_convert(const DisplacementGenerator& g, double new_e, double new_f);

/// Generator of the identity matrix under (e, f): the rank-1 pair
/// ((e-f) e_1, e_n).
DisplacementGenerator dgen_identity(std::size_t n, double e, double f);

}  // namespace rmx
