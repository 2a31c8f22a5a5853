#pragma once

#include <functional>

#include "rmx/linalg.hpp"
#include "rmx/matrix.hpp"
#include "rmx/rng.hpp"
#include "rmx/xprec.hpp"

namespace rmx {

/// C = A + U V^T with the factors kept; the basic additive preprocessing unit.
struct AdditivePrep {
    DenseMatrix A, U, V, C;
    std::size_t width() const { return U.cols(); }
};

/// When staged, C is accumulated in extended precision and rounded once.
AdditivePrep additive_preprocess(const DenseMatrix& a, const DenseMatrix& u, const DenseMatrix& v,
                                 bool staged = false);

/// Scales U, V so that ||U V^T|| is near ||A|| before preprocessing; the
/// condition of C degrades by roughly the mis-scaling factor otherwise.
AdditivePrep additive_preprocess_scaled(const DenseMatrix& a, DenseMatrix u, DenseMatrix v,
                                        bool staged = false);

using LinearSolve = std::function<Vec(const Vec&)>;

/// y = A^{-1} b through the SMW identity
/// A^{-1} = C^{-1} + C^{-1} U G^{-1} V^T C^{-1}, G = I - V^T C^{-1} U.
/// G is assembled in extended precision.  Throws when G is numerically
/// singular (width below the numerical nullity, or an unlucky draw).
Vec smw_solve(const AdditivePrep& prep, const LinearSolve& solve_c, const Vec& b);

/// Dual additive preprocessing: C_- = A - A U_ H^{-1} V_^T A with
/// H = I + V_^T A U_, so that C_-^{-1} = A^{-1} + U_ V_^T.
struct DualPrep {
    DenseMatrix H;
    DenseMatrix C_;
};
DualPrep dual_additive(const DenseMatrix& a, const DenseMatrix& u_, const DenseMatrix& v_,
                       bool staged = true);

/// Same pipeline with every stage in extended precision and C_ returned
/// unrounded: its entries sit entirely below ||A|| * eps when A is ill
/// conditioned, so a rounded C_ carries no information.
struct DualPrepExt {
    std::vector<std::vector<ExtScalar>> H;
    ExtDense C_;
};
DualPrepExt dual_additive_ext(const DenseMatrix& a, const DenseMatrix& u_, const DenseMatrix& v_);

/// Bordering K = (W V^T; -U A).
struct Augmentation {
    DenseMatrix A, U, V, W, K;
};
Augmentation augment(const DenseMatrix& a, const DenseMatrix& u, const DenseMatrix& v,
                     const DenseMatrix& w);

/// y = A^{-1} b recovered through S^{-1} (the trailing n x n block of K^{-1})
/// and R = I - V^T S^{-1} U W^{-1}.
Vec aug_inverse_recover(const Augmentation& aug, const LinearSolve& solve_k, const Vec& b);

/// The block factorization K = U_hat diag(C, I_r) V_hat diag(W, I_n); returned
/// as the assembled product for consistency checks.
DenseMatrix augment_factorization(const Augmentation& aug);

enum class PrecondVariant { smw, right_factor, left_factor };

/// Multiplicative preconditioner A_ built from an additive prep; apply-only.
struct MultPreconditioner {
    std::function<Vec(const Vec&)> apply;
    DenseMatrix densify(std::size_t n) const;
};
MultPreconditioner mult_preconditioner(const AdditivePrep& prep, PrecondVariant variant,
                                       const LinearSolve& solve_c);

}  // namespace rmx
