#include "rmx/displacement.hpp"

#include <cmath>

#include "rmx/fft.hpp"

namespace rmx {

namespace {

Vec shift_fwd(const Vec& x, double g) {
    // Z_g x
    std::size_t n = x.size();
    Vec y(n);
    y[0] = g * x[n - 1];
    for (std::size_t i = 1; i < n; ++i) y[i] = x[i - 1];
    return y;
}

Vec shift_inv(const Vec& x, double g) {
    // Z_g^{-1} x
    std::size_t n = x.size();
    Vec y(n);
    for (std::size_t i = 0; i + 1 < n; ++i) y[i] = x[i + 1];
    y[n - 1] = x[0] / g;
    return y;
}

// y = Z_f(v)^T x  via  Z_f(v)^T = Z_{1/f}(u), u = (v_0, f v_{n-1}, ..., f v_1)
Vec fcirc_matvec_t(const Vec& v, double f, const Vec& x) {
    std::size_t n = v.size();
    Vec u(n);
    u[0] = v[0];
    for (std::size_t i = 1; i < n; ++i) u[i] = f * v[n - i];
    return f_circulant_matvec(u, 1.0 / f, x);
}

void check_ops(const DisplacementGenerator& a, const DisplacementGenerator& b) {
    if (a.e != b.e || a.f != b.f)
        throw std::invalid_argument("displacement: operator pair mismatch");
    if (a.size() != b.size()) throw std::invalid_argument("displacement: size mismatch");
}

}  // namespace

DisplacementGenerator dgen_from_dense(const DenseMatrix& m, double e, double f, double rank_tol) {
    if (e == f) throw std::invalid_argument("dgen_from_dense: e == f");
    std::size_t n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("dgen_from_dense: square matrix required");
    // D = Z_e M - M Z_f: row-shift of M minus column-shift of M
    DenseMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double ze_m = (i == 0) ? e * m(n - 1, j) : m(i - 1, j);
            double m_zf = (j == n - 1) ? f * m(i, 0) : m(i, j + 1);
            d(i, j) = ze_m - m_zf;
        }
    double scale = norm_frobenius(m);
    if (scale == 0.0) return {DenseMatrix(n, 0), DenseMatrix(n, 0), e, f};
    SvdFactors fac = svd(d);
    std::size_t k = 0;
    while (k < fac.sigma.size() && fac.sigma[k] > rank_tol * scale) ++k;
    DenseMatrix g(n, k), h(n, k);
    for (std::size_t j = 0; j < k; ++j) {
        double s = std::sqrt(fac.sigma[j]);
        for (std::size_t i = 0; i < n; ++i) {
            g(i, j) = fac.S(i, j) * s;
            h(i, j) = fac.T(i, j) * s;
        }
    }
    return {std::move(g), std::move(h), e, f};
}

DenseMatrix dgen_to_dense(const DisplacementGenerator& g) {
    std::size_t n = g.size();
    DenseMatrix m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vec col = dgen_apply(g, basis_vector(n, j));
        m.set_column(j, col);
    }
    return m;
}

Vec dgen_apply(const DisplacementGenerator& g, const Vec& x) {
    std::size_t n = g.size();
    Vec acc(n, 0.0);
    for (std::size_t j = 0; j < g.length(); ++j) {
        Vec jh = reversed(g.H.column(j));
        Vec t = f_circulant_matvec(jh, g.f, x);
        Vec s = f_circulant_matvec(g.G.column(j), g.e, t);
        for (std::size_t i = 0; i < n; ++i) acc[i] += s[i];
    }
    double scale = 1.0 / (g.e - g.f);
    for (double& v : acc) v *= scale;
    return acc;
}

Vec dgen_apply_transposed(const DisplacementGenerator& g, const Vec& x) {
    std::size_t n = g.size();
    Vec acc(n, 0.0);
    for (std::size_t j = 0; j < g.length(); ++j) {
        Vec t = fcirc_matvec_t(g.G.column(j), g.e, x);
        Vec jh = reversed(g.H.column(j));
        Vec s = fcirc_matvec_t(jh, g.f, t);
        for (std::size_t i = 0; i < n; ++i) acc[i] += s[i];
    }
    double scale = 1.0 / (g.e - g.f);
    for (double& v : acc) v *= scale;
    return acc;
}

DenseMatrix dgen_apply_mat(const DisplacementGenerator& g, const DenseMatrix& x) {
    DenseMatrix y(g.size(), x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) y.set_column(j, dgen_apply(g, x.column(j)));
    return y;
}

DisplacementGenerator dgen_add(const DisplacementGenerator& a, const DisplacementGenerator& b,
                               double alpha, double beta) {
    check_ops(a, b);
    DenseMatrix ga = a.G, gb = b.G;
    ga *= alpha;
    gb *= beta;
    return {hstack(ga, gb), hstack(a.H, b.H), a.e, a.f};
}

DisplacementGenerator dgen_transpose(const DisplacementGenerator& g) {
    if (g.e == 0.0 || g.f == 0.0)
        throw std::invalid_argument("dgen_transpose: needs nonzero operator scalars");
    std::size_t n = g.size(), d = g.length();
    double ne = 1.0 / g.f, nf = 1.0 / g.e;
    DenseMatrix gn(n, d), hn(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        gn.set_column(j, shift_fwd(g.H.column(j), ne));   // Z_{1/f} h_j
        hn.set_column(j, shift_inv(g.G.column(j), g.e));  // Z_e^{-1} g_j
    }
    return {std::move(gn), std::move(hn), ne, nf};
}

DisplacementGenerator dgen_convert(const DisplacementGenerator& g, double new_e, double new_f) {
    if (new_e == g.e && new_f == g.f) return g;
    DisplacementGenerator r = g;
    std::size_t n = g.size();
    if (new_e != g.e) {
        // Z_{e'} M - M Z_f = G H^T + (e'-e) e_1 (M^T e_n)^T
        Vec extra_g = basis_vector(n, 0);
        for (double& v : extra_g) v *= (new_e - g.e);
        Vec extra_h = dgen_apply_transposed(g, basis_vector(n, n - 1));
        r.G = hstack(r.G, DenseMatrix::from_column(extra_g));
        r.H = hstack(r.H, DenseMatrix::from_column(extra_h));
        r.e = new_e;
    }
    if (new_f != g.f) {
        // Z_e M - M Z_{f'} = G H^T + (f-f') (M e_1) e_n^T
        Vec extra_g = dgen_apply(g, basis_vector(n, 0));
        for (double& v : extra_g) v *= (g.f - new_f);
        Vec extra_h = basis_vector(n, n - 1);
        r.G = hstack(r.G, DenseMatrix::from_column(extra_g));
        r.H = hstack(r.H, DenseMatrix::from_column(extra_h));
        r.f = new_f;
    }
    return r;
}

DisplacementGenerator dgen_product(const DisplacementGenerator& a, const DisplacementGenerator& b) {
    check_ops(a, b);
    // A = Z_e, B = Z_f, C = Z_f: express N = b under (f, f), then
    // G(MN) = (G_M | M G_N'), H(MN) = (N^T H_M | H_N')
    DisplacementGenerator bff = dgen_convert(b, a.f, a.f);
    std::size_t n = a.size();
    DenseMatrix mg(n, bff.length());
    for (std::size_t j = 0; j < bff.length(); ++j) mg.set_column(j, dgen_apply(a, bff.G.column(j)));
    DenseMatrix nth(n, a.length());
    for (std::size_t j = 0; j < a.length(); ++j)
        nth.set_column(j, dgen_apply_transposed(b, a.H.column(j)));
    return {hstack(a.G, mg), hstack(nth, bff.H), a.e, a.f};
}

DisplacementGenerator dgen_inverse(const DisplacementGenerator& g) {
    DenseMatrix m = dgen_to_dense(g);
    PluFactors f = plu(m);
    if (f.singular) throw NumericalError("dgen_inverse: represented matrix is singular");
    // G_{f,e}(M^{-1}) = -M^{-1} G, H_{f,e}(M^{-1}) = M^{-T} H
    DenseMatrix gi = plu_solve_mat(f, g.G);
    gi *= -1.0;
    PluFactors ft = plu(m.transposed());
    if (ft.singular) throw NumericalError("dgen_inverse: represented matrix is singular");
    DenseMatrix hi = plu_solve_mat(ft, g.H);
    return {std::move(gi), std::move(hi), g.f, g.e};
}

DisplacementGenerator dgen_compress(const DisplacementGenerator& g, std::size_t target_length,
                                    double tol) {
    std::size_t n = g.size();
    if (g.length() == 0) return g;
    DenseMatrix qg = orthonormalize(g.G, 1e-15);
    DenseMatrix qh = orthonormalize(g.H, 1e-15);
    if (qg.cols() == 0 || qh.cols() == 0) return {DenseMatrix(n, 0), DenseMatrix(n, 0), g.e, g.f};
    DenseMatrix rg = qg.transposed() * g.G;   // kg x d
    DenseMatrix rh = qh.transposed() * g.H;   // kh x d
    DenseMatrix b = rg * rh.transposed();     // kg x kh
    SvdFactors fac = svd(b);
    double cutoff = fac.sigma.empty() ? 0.0 : tol * fac.sigma.front();
    std::size_t k = 0;
    while (k < fac.sigma.size() && k < target_length && fac.sigma[k] > cutoff) ++k;
    DenseMatrix gu(qg.cols(), k), hv(qh.cols(), k);
    for (std::size_t j = 0; j < k; ++j) {
        double s = std::sqrt(fac.sigma[j]);
        for (std::size_t i = 0; i < qg.cols(); ++i) gu(i, j) = fac.S(i, j) * s;
        for (std::size_t i = 0; i < qh.cols(); ++i) hv(i, j) = fac.T(i, j) * s;
    }
    return {qg * gu, qh * hv, g.e, g.f};
}

DisplacementGenerator dgen_identity(std::size_t n, double e, double f) {
    Vec ge = basis_vector(n, 0);
    for (double& v : ge) v *= (e - f);
    return {DenseMatrix::from_column(ge), DenseMatrix::from_column(basis_vector(n, n - 1)), e, f};
}

}  // namespace rmx
