#include "rmx/solvers.hpp"

#include <cmath>

#include "rmx/elimination.hpp"
#include "rmx/precond.hpp"
#include "rmx/singspaces.hpp"

namespace rmx {

namespace {

// refinement with the iterate accumulated in extended precision: the
// correction comes from the double factorization, the residual from the
// extended iterate
template <typename SolveFn>
ExtVec refined_solve_ext(const DenseMatrix& m, const SolveFn& solve, const Vec& b, int steps) {
    ExtVec y(solve(b));
    for (int s = 0; s < steps; ++s) {
        Vec r = xresidual_ext(m, y, b);
        y.accumulate(solve(r));
    }
    return y;
}

struct RefinedGenp {
    GenpFactors f;
    explicit RefinedGenp(const DenseMatrix& c) : f(genp(c)) {}
    ExtVec solve_ext(const DenseMatrix& c, const Vec& b, int steps) const {
        return refined_solve_ext(c, [&](const Vec& r) { return genp_solve(f, r); }, b, steps);
    }
};

ExtVec refined_plu_solve_ext(const DenseMatrix& m, const Vec& b, int steps) {
    PluFactors f = plu(m);
    if (f.singular) throw NumericalError("refined_plu_solve_ext: singular");
    return refined_solve_ext(m, [&](const Vec& r) { return plu_solve(f, r); }, b, steps);
}

// G = I_r - V^T XU with the extended columns, kept in double-double
std::vector<std::vector<ExtScalar>> schur_gram_ext(const DenseMatrix& v, const ExtMat& xu) {
    std::size_t r = v.cols();
    std::vector<std::vector<ExtScalar>> g(r, std::vector<ExtScalar>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            ExtScalar acc(i == j ? 1.0 : 0.0);
            for (std::size_t k = 0; k < v.rows(); ++k)
                acc = xsub(acc, xmul(ExtScalar(v(k, i)), xu.cols[j].at(k)));
            g[i][j] = acc;
        }
    return g;
}

}  // namespace

ExtVec solve_smw_refined(const DenseMatrix& a, const Vec& b, std::size_t r, Seed seed,
                         int refine_steps) {
    std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("solve_smw_refined: square A required");
    for (int attempt = 0; attempt < 2; ++attempt) {
        DenseMatrix u = gaussian_matrix(n, r, 0.0, 1.0, seed.child(100 + attempt));
        DenseMatrix v = gaussian_matrix(n, r, 0.0, 1.0, seed.child(200 + attempt));
        // normalize to ||U|| = ||V|| = 1 so that ||U V^T|| ~ ||A|| = O(1)
        if (r > 0) {
            double nu = norm2_estimate(u), nv = norm2_estimate(v);
            if (nu > 0.0) u *= 1.0 / nu;
            if (nv > 0.0) v *= 1.0 / nv;
        }
        // C kept in extended precision: the G-scale cancellation below eats
        // every digit a rounded C would have thrown away
        ExtDense c = xadd_outer_ext(a, u, v);
        SvdFactors fc = svd(c.hi);
        double kappa = fc.sigma.back() > 0.0 ? fc.sigma.front() / fc.sigma.back()
                                             : std::numeric_limits<double>::infinity();
        if (kappa > 1e8) {
            if (attempt == 1) throw NumericalError("solve_smw_refined: C ill conditioned");
            continue;
        }
        RefinedGenp rg(c.hi);
        auto solve_ext_c = [&](const Vec& rhs) {
            ExtVec y(genp_solve(rg.f, rhs));
            for (int s = 0; s < refine_steps; ++s) {
                Vec rr = xresidual_ext2(c, y, rhs);
                y.accumulate(genp_solve(rg.f, rr));
            }
            return y;
        };
        ExtVec xb = solve_ext_c(b);
        if (r == 0) return xb;
        ExtMat xu;
        for (std::size_t j = 0; j < r; ++j) xu.cols.push_back(solve_ext_c(u.column(j)));
        auto g = schur_gram_ext(v, xu);
        // y = x_b + X_U G^{-1} V^T x_b, carried out in double-double
        ExtVec vtx(r);
        for (std::size_t i = 0; i < r; ++i) {
            ExtScalar acc;
            for (std::size_t k = 0; k < n; ++k)
                acc = xadd(acc, xmul(ExtScalar(v(k, i)), xb.at(k)));
            vtx.set(i, acc);
        }
        ExtVec z = xsolve_small(g, vtx);
        ExtVec y = xb;
        for (std::size_t i = 0; i < n; ++i) {
            ExtScalar acc = y.at(i);
            for (std::size_t k = 0; k < r; ++k) acc = xadd(acc, xmul(xu.cols[k].at(i), z.at(k)));
            y.set(i, acc);
        }
        return y;
    }
    throw NumericalError("solve_smw_refined: unreachable");
}

namespace {

double inv_norm_estimate_plu(const DenseMatrix& a) {
    PluFactors pf = plu(a);
    if (pf.singular) throw NumericalError("inv_norm_estimate: singular matrix");
    PluFactors pft = plu(a.transposed());
    std::size_t n = a.rows();
    Vec x(n, 1.0 / std::sqrt(double(n)));
    double est = 0.0;
    for (int it = 0; it < 30; ++it) {
        Vec y = plu_solve(pf, x);
        Vec z = plu_solve(pft, y);
        double nz = norm2(z);
        if (nz == 0.0) break;
        double prev = est;
        est = std::sqrt(nz);
        for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / nz;
        if (it > 4 && std::fabs(est - prev) < 1e-3 * est) break;
    }
    return est;
}

}  // namespace

ExtVec solve_dual(const DenseMatrix& a, const Vec& b, std::size_t q, Seed seed, int refine_steps) {
    std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("solve_dual: square A required");
    if (q == 0) return refined_plu_solve_ext(a, b, refine_steps);
    double inv_norm = inv_norm_estimate_plu(a);
    double col_scale = std::sqrt(std::max(inv_norm, 1e-300)) / std::sqrt(double(n));
    for (int attempt = 0; attempt < 2; ++attempt) {
        DenseMatrix u = gaussian_matrix(n, q, 0.0, col_scale, seed.child(300 + attempt));
        DenseMatrix v = gaussian_matrix(n, q, 0.0, col_scale, seed.child(400 + attempt));
        try {
            DualPrepExt dp = dual_additive_ext(a, u, v);
            // y = (C_-^{-1} - U_ V_^T) b, refining against the extended C_
            PluFactors pfc = plu(dp.C_.hi);
            if (pfc.singular) throw NumericalError("solve_dual: C_ singular");
            ExtVec cb(plu_solve(pfc, b));
            for (int s = 0; s < refine_steps + 1; ++s) {
                Vec rr = xresidual_ext2(dp.C_, cb, b);
                cb.accumulate(plu_solve(pfc, rr));
            }
            ExtVec vtb(q);
            for (std::size_t i = 0; i < q; ++i) {
                ExtScalar acc;
                for (std::size_t k = 0; k < n; ++k)
                    acc = xadd(acc, xmul(ExtScalar(v(k, i)), ExtScalar(b[k])));
                vtb.set(i, acc);
            }
            for (std::size_t i = 0; i < n; ++i) {
                ExtScalar acc = cb.at(i);
                for (std::size_t k = 0; k < q; ++k)
                    acc = xsub(acc, xmul(ExtScalar(u(i, k)), vtb.at(k)));
                cb.set(i, acc);
            }
            return cb;
        } catch (const NumericalError&) {
            if (attempt == 1) throw;
        } catch (const std::runtime_error&) {
            if (attempt == 1) throw;
        }
    }
    throw NumericalError("solve_dual: unreachable");
}

BlockTriangulation block_triangulate(const DenseMatrix& a, std::size_t q, BlockTriVariant variant,
                                     Seed seed, int refine_steps) {
    std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("block_triangulate: square A required");
    if (q == 0 || q > n) throw std::invalid_argument("block_triangulate: bad numerical rank");
    std::size_t r = n - q;
    BlockTriangulation bt;
    bt.q = q;

    if (variant == BlockTriVariant::dual) {
        // leading spaces through dual additive preprocessing (normalized, not
        // orthogonalized): K0 = C_ U_ / ||C_ U_||, L0 = C_^T V_ / ||C_^T V_||;
        // trailing complement through orthogonalized nmbs
        double inv_norm = inv_norm_estimate_plu(a);
        double col_scale = std::sqrt(std::max(inv_norm, 1e-300)) / std::sqrt(double(n));
        DenseMatrix u = gaussian_matrix(n, q, 0.0, col_scale, seed.child(11));
        DenseMatrix v = gaussian_matrix(n, q, 0.0, col_scale, seed.child(12));
        DualPrepExt dp = dual_additive_ext(a, u, v);
        DenseMatrix k0 = xmatmul_round_right(dp.C_, u);
        DenseMatrix l0(n, q);
        // C_^T v in extended precision
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < q; ++j) {
                ExtScalar acc;
                for (std::size_t k = 0; k < n; ++k)
                    acc = xadd(acc, xmul(dp.C_.at(k, i), ExtScalar(v(k, j))));
                l0(i, j) = acc.value();
            }
        double nk0 = norm2_estimate(k0), nl0 = norm2_estimate(l0);
        if (nk0 == 0.0 || nl0 == 0.0) throw NumericalError("block_triangulate: degenerate dual basis");
        k0 *= 1.0 / nk0;
        l0 *= 1.0 / nl0;
        bt.K0 = k0;
        bt.L0 = l0;
        DenseMatrix m = nmb(k0.transposed(), 1e-10, seed.child(13));
        DenseMatrix nn = nmb(l0.transposed(), 1e-10, seed.child(14));
        if (m.cols() != r || nn.cols() != r)
            throw NumericalError("block_triangulate: nmb width mismatch in dual variant");
        bt.K1 = orthonormalize(m);
        bt.L1 = orthonormalize(nn);
    } else {
        DenseMatrix u = gaussian_matrix(n, r, 0.0, 1.0, seed.child(21));
        DenseMatrix v = gaussian_matrix(n, r, 0.0, 1.0, seed.child(22));
        double nu = norm2_estimate(u), nv = norm2_estimate(v);
        if (r > 0 && nu > 0.0) u *= 1.0 / nu;
        if (r > 0 && nv > 0.0) v *= 1.0 / nv;
        DenseMatrix c = xadd_outer(a, u, v);
        SvdFactors fc = svd(c);
        double kappa = fc.sigma.back() > 0.0 ? fc.sigma.front() / fc.sigma.back()
                                             : std::numeric_limits<double>::infinity();
        if (kappa > 1e8) throw NumericalError("block_triangulate: C ill conditioned");
        RefinedGenp rg(c);
        RefinedGenp rgt(c.transposed());
        DenseMatrix ct = c.transposed();
        DenseMatrix k1(n, r), l1(n, r);
        for (std::size_t j = 0; j < r; ++j) {
            k1.set_column(j, rgt.solve_ext(ct, v.column(j), refine_steps).rounded());  // C^{-T} V
            l1.set_column(j, rg.solve_ext(c, u.column(j), refine_steps).rounded());    // C^{-1} U
        }
        if (variant == BlockTriVariant::orthogonal) {
            bt.K1 = (r > 0) ? qr_q(k1) : k1;
            bt.L1 = (r > 0) ? qr_q(l1) : l1;
            bt.K0 = complete_orthonormal(bt.K1).block(0, r, n, q);
            bt.L0 = complete_orthonormal(bt.L1).block(0, r, n, q);
            bt.orthogonal = true;
        } else {  // simplified: Gaussian leading blocks, raw trailing blocks
            bt.K0 = gaussian_matrix(n, q, 0.0, 1.0, seed.child(23));
            bt.L0 = gaussian_matrix(n, q, 0.0, 1.0, seed.child(24));
            bt.K1 = k1;
            bt.L1 = l1;
        }
    }
    DenseMatrix k = hstack(bt.K0, bt.K1);
    DenseMatrix l = hstack(bt.L0, bt.L1);
    // single extended pass: an intermediate rounding of K^T A would bury the
    // sigma_{q+1}-scale blocks under absolute eps noise
    bt.W = xmatmul_round(k.transposed(), xmatmul_keep(a, l));
    return bt;
}

ExtVec solve_blocktri(const BlockTriangulation& bt, const DenseMatrix& a, const Vec& b) {
    std::size_t n = a.rows();
    std::size_t q = bt.q, r = n - q;
    DenseMatrix k = hstack(bt.K0, bt.K1);
    DenseMatrix l = hstack(bt.L0, bt.L1);
    // b_hat = K^T b, each entry in double-double
    Vec bhat(n);
    for (std::size_t j = 0; j < n; ++j) bhat[j] = xdot(k.column(j), b);
    DenseMatrix w00 = bt.W.block(0, 0, q, q);
    ExtVec x(n);
    if (r == 0) {
        ExtVec x0 = refined_plu_solve_ext(w00, bhat, 2);
        return xmatvec_ext(l, x0);
    }
    DenseMatrix w01 = bt.W.block(0, q, q, r);
    DenseMatrix w10 = bt.W.block(q, 0, r, q);
    DenseMatrix w11 = bt.W.block(q, q, r, r);
    PluFactors f00 = plu(w00);
    if (f00.singular) throw NumericalError("solve_blocktri: W00 singular");
    DenseMatrix w00inv_w01 = plu_solve_mat(f00, w01);
    // G = W11 - W10 (W00^{-1} W01) accumulated in extended precision
    DenseMatrix g = xmatmul_sub(w10, w00inv_w01, w11);
    g *= -1.0;
    Vec b0(bhat.begin(), bhat.begin() + std::ptrdiff_t(q));
    Vec b1(bhat.begin() + std::ptrdiff_t(q), bhat.end());
    // y1 = b1 - W10 W00^{-1} b0 in double-double, then G x1 = y1,
    // then W00 x0 = b0 - W01 x1
    ExtVec w00inv_b0 = refined_plu_solve_ext(w00, b0, 2);
    Vec y1(r);
    {
        ExtVec t = xmatvec_ext(w10, w00inv_b0);
        for (std::size_t i = 0; i < r; ++i) y1[i] = xsub(ExtScalar(b1[i]), t.at(i)).value();
    }
    ExtVec x1 = refined_plu_solve_ext(g, y1, 2);
    Vec rhs0(q);
    {
        ExtVec t = xmatvec_ext(w01, x1);
        for (std::size_t i = 0; i < q; ++i) rhs0[i] = xsub(ExtScalar(b0[i]), t.at(i)).value();
    }
    ExtVec x0 = refined_plu_solve_ext(w00, rhs0, 2);
    for (std::size_t i = 0; i < q; ++i) x.set(i, x0.at(i));
    for (std::size_t i = 0; i < r; ++i) x.set(q + i, x1.at(i));
    return xmatvec_ext(l, x);
}

ToeplitzAugReport toeplitz_solve_aug(const StructuredMatrix& t, const Vec& b, Seed seed,
                                     int refine_steps) {
    if (t.kind() != StructuredMatrix::Kind::toeplitz || t.rows() != t.cols())
        throw std::invalid_argument("toeplitz_solve_aug: square Toeplitz required");
    std::size_t n = t.rows();
    const Vec& d = t.data();
    for (std::size_t h = 0; h + 1 < n; ++h)
        if (d[n - 1 + h + 1] != d[n - 2 - h])
            throw std::invalid_argument("toeplitz_solve_aug: symmetric Toeplitz required");

    double scale = 0.0;
    for (double x : d) scale = std::max(scale, std::fabs(x));
    CounterRng rng(seed.child(7));
    ToeplitzAugReport rep;
    for (int attempt = 0; attempt < 3; ++attempt) {
        ++rep.corner_retries;
        double corner = (0.5 + rng.uniform01()) * scale * rng.sign();
        // K = (t_{i-j})_{i,j=0..n} with the new corner entries symmetric
        Vec kd(2 * n + 1);
        for (std::size_t i = 0; i < d.size(); ++i) kd[i + 1] = d[i];
        kd[0] = corner;
        kd[2 * n] = corner;
        Vec e1 = basis_vector(n + 1, 0);
        ExtVec xhat;
        try {
            xhat = ExtVec(levinson_solve(kd, e1));
            for (int s = 0; s < refine_steps; ++s) {
                Vec r = toeplitz_residual_ext(kd, n + 1, n + 1, xhat, e1);
                xhat.accumulate(levinson_solve(kd, r));
            }
        } catch (const NumericalError&) {
            continue;
        }
        Vec xr = xhat.rounded();
        if (std::fabs(xr[0]) <= 1e-13 * norm2(xr)) continue;  // e_1^T K^{-1} e_1 ~ 0
        // symmetric shortcut: K^{-1} e_{n+1} = J K^{-1} e_1
        Vec what = reversed(xr);
        GsInverse inv;
        inv.pivot_ = xr[0];
        inv.a_.assign(xr.begin(), xr.begin() + std::ptrdiff_t(n));
        Vec wp(what.begin() + 1, what.end());
        inv.b_ = reversed(wp);
        inv.c_.assign(what.begin(), what.begin() + std::ptrdiff_t(n));
        Vec vp(xr.begin() + 1, xr.end());
        inv.d_ = reversed(vp);
        ExtVec y(inv.apply(b));
        for (int s = 0; s < refine_steps; ++s) {
            Vec r = toeplitz_residual_ext(d, n, n, y, b);
            y.accumulate(inv.apply(r));
        }
        rep.y = std::move(y);
        rep.corner = corner;
        return rep;
    }
    throw NumericalError("toeplitz_solve_aug: corner randomization failed repeatedly");
}

NewtonResult newton_inverse(const DenseMatrix& c, double tol, int max_iter) {
    std::size_t n = c.rows();
    if (n != c.cols()) throw std::invalid_argument("newton_inverse: square required");
    NewtonResult out;
    double denom = (1.0 + double(n)) * norm_one(c) * norm_inf(c);
    DenseMatrix x = c.transposed();
    x *= 2.0 * double(n) / denom;
    DenseMatrix eye = DenseMatrix::identity(n);
    for (int it = 0; it < max_iter; ++it) {
        DenseMatrix res = eye - c * x;
        double rn = norm(res, NormKind::two);
        out.residual_norms.push_back(rn);
        out.iterations = it;
        if (rn <= tol) {
            out.X = std::move(x);
            return out;
        }
        // X <- X (2I - C X) = X + X (I - C X)
        x = x + x * res;
    }
    throw NumericalError("newton_inverse: iteration cap exceeded");
}

NewtonToeplitzResult newton_toeplitz(const DisplacementGenerator& c, std::size_t d_target,
                                     double tol, int max_iter) {
    std::size_t n = c.size();
    NewtonToeplitzResult out;
    // X0 = 2n C^T / ((1+n) ||C||_1 ||C||_inf): norms off the densified matrix
    DenseMatrix cd = dgen_to_dense(c);
    double denom = (1.0 + double(n)) * norm_one(cd) * norm_inf(cd);
    DisplacementGenerator x = dgen_transpose(c);
    {
        x.G *= 2.0 * double(n) / denom;
        x = dgen_convert(x, c.e, c.f);
        x = dgen_compress(x, d_target);
    }
    double prev = std::numeric_limits<double>::infinity();
    int stagnant = 0;
    for (int it = 0; it < max_iter; ++it) {
        // residual norm off the densified iterate (desk scale)
        DenseMatrix xd = dgen_to_dense(x);
        DenseMatrix res = DenseMatrix::identity(n) - cd * xd;
        double rn = norm(res, NormKind::two);
        out.residual_norms.push_back(rn);
        out.iterations = it;
        if (rn <= tol) {
            out.X = std::move(x);
            return out;
        }
        if (rn >= prev) {
            if (++stagnant >= 5)
                throw NumericalError("newton_toeplitz: stagnation (residual not decreasing)");
        } else {
            stagnant = 0;
        }
        prev = rn;
        // X <- 2X - X C X, all in generator form, recompressed to d_target
        DisplacementGenerator xc = dgen_product(x, c);
        DisplacementGenerator xcx = dgen_product(xc, x);
        DisplacementGenerator next = dgen_add(x, xcx, 2.0, -1.0);
        x = dgen_compress(next, d_target);
    }
    throw NumericalError("newton_toeplitz: iteration cap exceeded");
}

}  // namespace rmx
