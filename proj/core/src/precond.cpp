#include "rmx/precond.hpp"

#include <cmath>

#include "rmx/elimination.hpp"
#include "rmx/xprec.hpp"

namespace rmx {

AdditivePrep additive_preprocess(const DenseMatrix& a, const DenseMatrix& u, const DenseMatrix& v,
                                 bool staged) {
    if (u.cols() != v.cols() || u.rows() != a.rows() || v.rows() != a.cols())
        throw std::invalid_argument("additive_preprocess: shape mismatch");
    DenseMatrix c = staged ? xadd_outer(a, u, v) : a + u * v.transposed();
    return {a, u, v, std::move(c)};
}

AdditivePrep additive_preprocess_scaled(const DenseMatrix& a, DenseMatrix u, DenseMatrix v,
                                        bool staged) {
    if (u.cols() > 0) {
        double na = norm2_estimate(a);
        double nuv = norm2_estimate(u) * norm2_estimate(v);
        if (na > 0.0 && nuv > 0.0) {
            double s = std::sqrt(na / nuv);
            u *= s;
            v *= s;
        }
    }
    return additive_preprocess(a, std::move(u), std::move(v), staged);
}

namespace {

// G = I_r - V^T X_U accumulated entrywise in double-double
DenseMatrix smw_gram(const DenseMatrix& v, const DenseMatrix& xu) {
    std::size_t r = v.cols();
    DenseMatrix g(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            ExtScalar acc(i == j ? 1.0 : 0.0);
            for (std::size_t k = 0; k < v.rows(); ++k) acc = xfma_acc(acc, -v(k, i), xu(k, j));
            g(i, j) = acc.value();
        }
    return g;
}

Vec solve_small(const DenseMatrix& g, const Vec& rhs, const char* who) {
    PluFactors f = plu(g);
    double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i) {
        double p = std::fabs(f.lu(i, i));
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
    }
    if (f.singular || pmin <= 1e-14 * pmax)
        throw NumericalError(std::string(who) + ": numerically singular");
    Vec y = plu_solve(f, rhs);
    // one refinement pass with an extended-precision residual
    Vec r = xresidual(g, y, rhs);
    Vec d = plu_solve(f, r);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += d[i];
    return y;
}

DenseMatrix solve_small_mat(const DenseMatrix& g, const DenseMatrix& rhs, const char* who) {
    DenseMatrix x(rhs.rows(), rhs.cols());
    for (std::size_t j = 0; j < rhs.cols(); ++j) x.set_column(j, solve_small(g, rhs.column(j), who));
    return x;
}

}  // namespace

Vec smw_solve(const AdditivePrep& prep, const LinearSolve& solve_c, const Vec& b) {
    std::size_t r = prep.width();
    Vec xb = solve_c(b);
    if (r == 0) return xb;
    DenseMatrix xu(prep.U.rows(), r);
    for (std::size_t j = 0; j < r; ++j) xu.set_column(j, solve_c(prep.U.column(j)));
    DenseMatrix g = smw_gram(prep.V, xu);
    if (!g.all_finite()) throw NumericalError("smw_solve: G not finite");
    // healthy G sits at the I_r scale; a collapse below it means the width
    // undershot the numerical nullity (or the draw was unlucky)
    {
        SvdFactors fg = svd(g);
        if (fg.sigma.back() <= 1e-14 * std::max(1.0, fg.sigma.front()))
            throw NumericalError("smw_solve: G numerically singular");
    }
    Vec vtx = matvec_transposed(prep.V, xb);
    Vec gz = solve_small(g, vtx, "smw_solve: G");
    Vec y = xb;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += dot(xu.row(i), gz);
    return y;
}

DualPrep dual_additive(const DenseMatrix& a, const DenseMatrix& u_, const DenseMatrix& v_,
                       bool staged) {
    std::size_t q = u_.cols();
    if (v_.cols() != q || u_.rows() != a.cols() || v_.rows() != a.rows())
        throw std::invalid_argument("dual_additive: shape mismatch");
    if (q == 0) return {DenseMatrix(0, 0), a};
    // H = I_q + V_^T A U_
    DenseMatrix au = staged ? xmatmul(a, u_) : a * u_;
    DenseMatrix h(q, q);
    DenseMatrix vt = v_.transposed();
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            ExtScalar acc(i == j ? 1.0 : 0.0);
            for (std::size_t k = 0; k < a.rows(); ++k) acc = xfma_acc(acc, vt(i, k), au(k, j));
            h(i, j) = acc.value();
        }
    // C_ = A - (A U_) H^{-1} (V_^T A)
    DenseMatrix hinv_vta = solve_small_mat(h, staged ? xmatmul(vt, a) : vt * a, "dual_additive: H");
    DenseMatrix c_ = staged ? xmatmul_sub(au, hinv_vta, a) : au * hinv_vta - a;
    c_ *= -1.0;
    return {std::move(h), std::move(c_)};
}

DualPrepExt dual_additive_ext(const DenseMatrix& a, const DenseMatrix& u_, const DenseMatrix& v_) {
    std::size_t n = a.rows(), q = u_.cols();
    if (v_.cols() != q || u_.rows() != a.cols() || v_.rows() != a.rows())
        throw std::invalid_argument("dual_additive_ext: shape mismatch");
    ExtDense au = xmatmul_keep(a, u_);                    // n x q
    ExtDense vta = xmatmul_keep(v_.transposed(), a);      // q x n
    DualPrepExt out;
    out.H.assign(q, std::vector<ExtScalar>(q));
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            ExtScalar acc(i == j ? 1.0 : 0.0);
            for (std::size_t k = 0; k < n; ++k)
                acc = xadd(acc, xmul(ExtScalar(v_(k, i)), au.at(k, j)));
            out.H[i][j] = acc;
        }
    // W = H^{-1} (V^T A), column by column in double-double
    ExtDense w{DenseMatrix(q, n), DenseMatrix(q, n)};
    for (std::size_t j = 0; j < n; ++j) {
        ExtVec rhs(q);
        for (std::size_t i = 0; i < q; ++i) rhs.set(i, vta.at(i, j));
        ExtVec col = xsolve_small(out.H, rhs);
        for (std::size_t i = 0; i < q; ++i) {
            w.hi(i, j) = col.at(i).hi;
            w.lo(i, j) = col.at(i).lo;
        }
    }
    // C_ = A - (A U) W, all double-double
    out.C_ = ExtDense{DenseMatrix(n, n), DenseMatrix(n, n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            ExtScalar acc(a(i, j));
            for (std::size_t k = 0; k < q; ++k)
                acc = xsub(acc, xmul(au.at(i, k), w.at(k, j)));
            out.C_.hi(i, j) = acc.hi;
            out.C_.lo(i, j) = acc.lo;
        }
    return out;
}

Augmentation augment(const DenseMatrix& a, const DenseMatrix& u, const DenseMatrix& v,
                     const DenseMatrix& w) {
    std::size_t m = a.rows(), n = a.cols();
    std::size_t s = w.rows(), q = w.cols();
    if (u.rows() != m || u.cols() != q || v.rows() != n || v.cols() != s)
        throw std::invalid_argument("augment: shape mismatch");
    DenseMatrix k(m + s, n + q);
    k.set_block(0, 0, w);
    k.set_block(0, q, v.transposed());
    DenseMatrix mu = u;
    mu *= -1.0;
    k.set_block(s, 0, mu);
    k.set_block(s, q, a);
    return {a, u, v, w, std::move(k)};
}

Vec aug_inverse_recover(const Augmentation& aug, const LinearSolve& solve_k, const Vec& b) {
    std::size_t n = aug.A.cols();
    std::size_t q = aug.W.cols();
    if (aug.A.rows() != n) throw std::invalid_argument("aug_inverse_recover: square A required");
    // S^{-1} y = trailing n entries of K^{-1} (0; y)
    auto sinv = [&](const Vec& y) {
        Vec rhs(q + n, 0.0);
        for (std::size_t i = 0; i < n; ++i) rhs[q + i] = y[i];
        Vec z = solve_k(rhs);
        return Vec(z.begin() + std::ptrdiff_t(q), z.end());
    };
    Vec sb = sinv(b);
    if (q == 0) return sb;
    DenseMatrix sinv_u(n, q);
    for (std::size_t j = 0; j < q; ++j) sinv_u.set_column(j, sinv(aug.U.column(j)));
    // R = I - V^T S^{-1} U W^{-1}
    DenseMatrix winv_cols = solve_small_mat(aug.W, DenseMatrix::identity(q), "aug: W");
    DenseMatrix su_winv = sinv_u * winv_cols;
    DenseMatrix r(q, q);
    DenseMatrix vt = aug.V.transposed();
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            ExtScalar acc(i == j ? 1.0 : 0.0);
            for (std::size_t k = 0; k < n; ++k) acc = xfma_acc(acc, -vt(i, k), su_winv(k, j));
            r(i, j) = acc.value();
        }
    // y = S^{-1} b + S^{-1} U W^{-1} R^{-1} V^T S^{-1} b
    Vec vts = matvec_transposed(aug.V, sb);
    Vec rz = solve_small(r, vts, "aug: R");
    Vec y = sb;
    for (std::size_t i = 0; i < n; ++i) y[i] += dot(su_winv.row(i), rz);
    return y;
}

DenseMatrix augment_factorization(const Augmentation& aug) {
    std::size_t m = aug.A.rows(), n = aug.A.cols();
    std::size_t q = aug.W.cols();
    DenseMatrix winv = solve_small_mat(aug.W, DenseMatrix::identity(q), "aug: W");
    DenseMatrix c = aug.A + aug.U * winv * aug.V.transposed();
    // U_hat = (O I_q; I_m -U W^{-1}), V_hat = (O I_n; I_q V^T)
    DenseMatrix uhat(m + q, m + q), vhat(n + q, n + q);
    uhat.set_block(0, m, DenseMatrix::identity(q));
    uhat.set_block(q, 0, DenseMatrix::identity(m));
    DenseMatrix uw = aug.U * winv;
    uw *= -1.0;
    uhat.set_block(q, m, uw);
    vhat.set_block(0, q, DenseMatrix::identity(n));
    vhat.set_block(n, 0, DenseMatrix::identity(q));
    vhat.set_block(n, q, aug.V.transposed());
    DenseMatrix mid(m + q, n + q);
    mid.set_block(0, 0, c);
    mid.set_block(m, n, DenseMatrix::identity(q));
    DenseMatrix tail(n + q, n + q);
    tail.set_block(0, 0, aug.W);
    tail.set_block(q, q, DenseMatrix::identity(n));
    return uhat * mid * vhat * tail;
}

DenseMatrix MultPreconditioner::densify(std::size_t n) const {
    DenseMatrix m(n, n);
    for (std::size_t j = 0; j < n; ++j) m.set_column(j, apply(basis_vector(n, j)));
    return m;
}

MultPreconditioner mult_preconditioner(const AdditivePrep& prep, PrecondVariant variant,
                                       const LinearSolve& solve_c) {
    std::size_t r = prep.width();
    std::size_t n = prep.A.cols();
    if (r == 0) {
        return {[solve_c](const Vec& x) { return solve_c(x); }};
    }
    DenseMatrix xu(n, r);
    for (std::size_t j = 0; j < r; ++j) xu.set_column(j, solve_c(prep.U.column(j)));
    DenseMatrix g = smw_gram(prep.V, xu);
    PluFactors gf = plu(g);
    if (gf.singular) throw NumericalError("mult_preconditioner: G numerically singular");
    DenseMatrix u = prep.U, v = prep.V;
    switch (variant) {
        case PrecondVariant::smw:
            // A_ = C^{-1} + C^{-1} U G^{-1} V^T C^{-1}  (the SMW inverse itself)
            return {[solve_c, v, xu, gf](const Vec& b) {
                Vec xb = solve_c(b);
                Vec gz = plu_solve(gf, matvec_transposed(v, xb));
                Vec y = xb;
                for (std::size_t i = 0; i < y.size(); ++i) y[i] += dot(xu.row(i), gz);
                return y;
            }};
        case PrecondVariant::right_factor:
            // A_ = I - U G^{-1} V^T C^{-1}
            return {[solve_c, u, v, gf](const Vec& b) {
                Vec xb = solve_c(b);
                Vec gz = plu_solve(gf, matvec_transposed(v, xb));
                Vec y = b;
                for (std::size_t i = 0; i < y.size(); ++i) y[i] -= dot(u.row(i), gz);
                return y;
            }};
        case PrecondVariant::left_factor:
            // A_ = I - C^{-1} U G^{-1} V^T
            return {[u, v, xu, gf](const Vec& b) {
                Vec gz = plu_solve(gf, matvec_transposed(v, b));
                Vec y = b;
                for (std::size_t i = 0; i < y.size(); ++i) y[i] -= dot(xu.row(i), gz);
                return y;
            }};
    }
    throw std::invalid_argument("mult_preconditioner: bad variant");
}

}  // namespace rmx
