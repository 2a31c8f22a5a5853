#include "rmx/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rmx {

DenseMatrix SvdFactors::reconstruct() const {
    std::size_t m = S.rows(), n = T.rows();
    DenseMatrix sig = DenseMatrix::diag(m, n, sigma);
    return S * sig * T.transposed();
}

namespace {

// one-sided Jacobi on the columns of w (m x n, m >= n); accumulates the
// right rotations into v (n x n)
int jacobi_sweeps(DenseMatrix& w, DenseMatrix& v, const SvdOptions& opts) {
    std::size_t m = w.rows(), n = w.cols();
    Vec sq(n, 0.0);
    // the computed column dot carries ~m*eps relative noise, so demanding a
    // tighter pair tolerance than that can never settle
    double tol = std::max(opts.pair_tol, 4.0 * double(m) * std::ldexp(1.0, -52));
    // columns at rounding-noise level never orthogonalize (each rotation
    // re-injects noise of the same relative size); freeze them out
    double scale0 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
        scale0 = std::max(scale0, s);
    }
    double col_floor2 = scale0 * double(m) * double(m) * std::ldexp(1.0, -104);  // (m eps |W|)^2
    int sweep = 0;
    for (; sweep < opts.max_sweeps; ++sweep) {
        // refresh the cached column norms: the rotation updates drift
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
            sq[j] = s;
        }
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = sq[p], beta = sq[q], gamma = 0.0;
                if (alpha <= col_floor2 || beta <= col_floor2) continue;
                for (std::size_t i = 0; i < m; ++i) gamma += w(i, p) * w(i, q);
                if (std::fabs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
                rotated = true;
                double zeta = (beta - alpha) / (2.0 * gamma);
                double t = std::copysign(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double cs = 1.0 / std::sqrt(1.0 + t * t);
                double sn = cs * t;
                for (std::size_t i = 0; i < m; ++i) {
                    double wp = w(i, p), wq = w(i, q);
                    w(i, p) = cs * wp - sn * wq;
                    w(i, q) = sn * wp + cs * wq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double vp = v(i, p), vq = v(i, q);
                    v(i, p) = cs * vp - sn * vq;
                    v(i, q) = sn * vp + cs * vq;
                }
                sq[p] = alpha - t * gamma;
                sq[q] = beta + t * gamma;
            }
        }
        if (!rotated) break;
    }
    return sweep;
}

}  // namespace

SvdFactors svd(const DenseMatrix& a, const SvdOptions& opts) {
    if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("svd: empty matrix");
    if (a.rows() < a.cols()) {
        SvdFactors f = svd(a.transposed(), opts);
        return {std::move(f.T), std::move(f.sigma), std::move(f.S)};
    }
    std::size_t m = a.rows(), n = a.cols();
    DenseMatrix w = a;
    DenseMatrix v = DenseMatrix::identity(n);
    int sweeps = jacobi_sweeps(w, v, opts);
    if (sweeps >= opts.max_sweeps)
        throw NumericalError("svd: Jacobi failed to converge within the sweep cap");

    Vec sig(n);
    for (std::size_t j = 0; j < n; ++j) sig[j] = norm2(w.column(j));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sig[i] > sig[j]; });

    DenseMatrix u(m, n), t(n, n);
    Vec sigma(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t j = order[k];
        sigma[k] = sig[j];
        if (sig[j] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) u(i, k) = w(i, j) / sig[j];
        }
        for (std::size_t i = 0; i < n; ++i) t(i, k) = v(i, j);
    }
    // columns at or below the noise floor never orthogonalized; replace their
    // left vectors by an orthonormal completion (changes the reconstruction
    // by at most ~2 m eps ||A||)
    double vec_floor = sigma.empty() ? 0.0 : sigma.front() * double(m) * std::ldexp(1.0, -52);
    std::size_t nz = 0;
    while (nz < n && sigma[nz] > vec_floor) ++nz;
    DenseMatrix s_full = complete_orthonormal(u.block(0, 0, m, nz));
    if (nz < n) {
        for (std::size_t k = nz; k < n; ++k)
            for (std::size_t i = 0; i < m; ++i) u(i, k) = s_full(i, k);
    }
    // extend u to a full m x m orthogonal S
    DenseMatrix s(m, m);
    s.set_block(0, 0, u);
    for (std::size_t k = n; k < m; ++k)
        for (std::size_t i = 0; i < m; ++i) s(i, k) = s_full(i, k);
    return {std::move(s), std::move(sigma), std::move(t)};
}

QrFactors qr(const DenseMatrix& a) {
    std::size_t m = a.rows(), n = a.cols();
    if (m < n) throw std::invalid_argument("qr: needs rows >= cols");
    double scale = norm_frobenius(a);
    DenseMatrix q(m, n), r(n, n);
    // modified Gram-Schmidt with one reorthogonalization pass
    for (std::size_t j = 0; j < n; ++j) {
        Vec v = a.column(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                double h = dot(q.column(k), v);
                if (pass == 0)
                    r(k, j) = h;
                else
                    r(k, j) += h;
                Vec qk = q.column(k);
                for (std::size_t i = 0; i < m; ++i) v[i] -= h * qk[i];
            }
        }
        double d = norm2(v);
        if (d <= 1e-13 * scale)
            throw RankDeficiencyError("qr: rank-deficient input (tiny R diagonal)");
        r(j, j) = d;
        for (std::size_t i = 0; i < m; ++i) q(i, j) = v[i] / d;
    }
    return {std::move(q), std::move(r)};
}

DenseMatrix qr_q(const DenseMatrix& a) { return qr(a).Q; }

double norm(const DenseMatrix& a, NormKind kind) {
    switch (kind) {
        case NormKind::one: return norm_one(a);
        case NormKind::inf: return norm_inf(a);
        case NormKind::frobenius: return norm_frobenius(a);
        case NormKind::two: {
            SvdFactors f = svd(a);
            return f.sigma.empty() ? 0.0 : f.sigma.front();
        }
    }
    return 0.0;
}

double norm2_estimate(const DenseMatrix& a, int iters) {
    std::size_t n = a.cols();
    if (n == 0 || a.rows() == 0) return 0.0;
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 / std::sqrt(double(n)) * (i % 2 == 0 ? 1.0 : -0.7);
    double est = 0.0;
    for (int it = 0; it < iters; ++it) {
        Vec y = a * x;
        Vec z = matvec_transposed(a, y);
        double nz = norm2(z);
        if (nz == 0.0) return 0.0;
        double prev = est;
        est = std::sqrt(norm2(y) * norm2(y) / (norm2(x) * norm2(x)));
        for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / nz;
        if (it > 4 && std::fabs(est - prev) <= 1e-6 * est) break;
    }
    return est;
}

double default_rank_tol(std::size_t m, std::size_t n) {
    return double(std::max(m, n)) * std::ldexp(1.0, -52);
}

std::size_t numerical_rank(const SvdFactors& f, double tau) {
    if (f.sigma.empty() || f.sigma.front() == 0.0) return 0;
    double cut = tau * f.sigma.front();
    std::size_t rho = 0;
    while (rho < f.sigma.size() && f.sigma[rho] > cut) ++rho;
    return rho;
}

std::size_t numerical_rank(const DenseMatrix& a, double tau) {
    return numerical_rank(svd(a), tau);
}

DenseMatrix pseudo_inverse(const DenseMatrix& a, double tau) {
    SvdFactors f = svd(a);
    if (tau <= 0.0) tau = default_rank_tol(a.rows(), a.cols());
    std::size_t rho = numerical_rank(f, tau);
    Vec inv(f.sigma.size(), 0.0);
    for (std::size_t j = 0; j < rho; ++j) inv[j] = 1.0 / f.sigma[j];
    DenseMatrix d = DenseMatrix::diag(a.cols(), a.rows(), inv);
    return f.T * d * f.S.transposed();
}

DenseMatrix truncate_svd(const DenseMatrix& a, std::size_t rho) {
    SvdFactors f = svd(a);
    Vec sig = f.sigma;
    for (std::size_t j = rho; j < sig.size(); ++j) sig[j] = 0.0;
    DenseMatrix d = DenseMatrix::diag(a.rows(), a.cols(), sig);
    return f.S * d * f.T.transposed();
}

double cond2(const DenseMatrix& a) {
    SvdFactors f = svd(a);
    std::size_t l = f.sigma.size();
    double lo = f.sigma[l - 1];
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return f.sigma[0] / lo;
}

PluFactors plu(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("plu: square matrix required");
    std::size_t n = a.rows();
    PluFactors f{a, std::vector<std::size_t>(n), 1, false};
    std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
    DenseMatrix& lu = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = std::fabs(lu(i, k));
            if (v > best) best = v, piv = i;
        }
        if (best == 0.0) {
            f.singular = true;
            continue;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
            f.sign = -f.sign;
        }
        double d = lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            double l = lu(i, k) / d;
            lu(i, k) = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= l * lu(k, j);
        }
    }
    return f;
}

Vec plu_solve(const PluFactors& f, const Vec& b) {
    if (f.singular) throw NumericalError("plu_solve: singular matrix");
    std::size_t n = f.lu.rows();
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = b[f.perm[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) y[i] -= f.lu(i, j) * y[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) y[ii] -= f.lu(ii, j) * y[j];
        y[ii] /= f.lu(ii, ii);
    }
    return y;
}

DenseMatrix plu_solve_mat(const PluFactors& f, const DenseMatrix& b) {
    DenseMatrix x(b.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) x.set_column(j, plu_solve(f, b.column(j)));
    return x;
}

Vec lu_solve(const DenseMatrix& a, const Vec& b) { return plu_solve(plu(a), b); }

DenseMatrix inverse(const DenseMatrix& a) {
    return plu_solve_mat(plu(a), DenseMatrix::identity(a.rows()));
}

DenseMatrix complete_orthonormal(const DenseMatrix& q) {
    std::size_t m = q.rows(), k = q.cols();
    DenseMatrix full(m, m);
    full.set_block(0, 0, q);
    std::size_t have = k;
    for (std::size_t cand = 0; cand < m && have < m; ++cand) {
        Vec v = basis_vector(m, cand);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < have; ++j) {
                double h = dot(full.column(j), v);
                Vec col = full.column(j);
                for (std::size_t i = 0; i < m; ++i) v[i] -= h * col[i];
            }
        }
        double d = norm2(v);
        if (d < 0.5 / std::sqrt(double(m))) continue;  // nearly dependent, try next axis
        for (std::size_t i = 0; i < m; ++i) full(i, have) = v[i] / d;
        ++have;
    }
    if (have < m) throw NumericalError("complete_orthonormal: could not complete the basis");
    return full;
}

DenseMatrix orthonormalize(const DenseMatrix& a, double drop_tol) {
    std::size_t m = a.rows(), n = a.cols();
    double scale = norm_frobenius(a);
    if (scale == 0.0) return DenseMatrix(m, 0);
    DenseMatrix q(m, 0);
    for (std::size_t j = 0; j < n; ++j) {
        Vec v = a.column(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < q.cols(); ++k) {
                double h = dot(q.column(k), v);
                Vec col = q.column(k);
                for (std::size_t i = 0; i < m; ++i) v[i] -= h * col[i];
            }
        }
        double d = norm2(v);
        if (d <= drop_tol * scale) continue;
        q = hstack(q, DenseMatrix::from_column(scaled(v, 1.0 / d)));
    }
    return q;
}

double subspace_distance(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix qa = orthonormalize(a);
    DenseMatrix qb = orthonormalize(b);
    if (qa.cols() != qb.cols()) return 1.0;
    if (qa.cols() == 0) return 0.0;
    // largest principal-angle sine: || (I - Qa Qa^T) Qb ||_2
    DenseMatrix proj = qb - qa * (qa.transposed() * qb);
    SvdFactors f = svd(proj);
    return f.sigma.empty() ? 0.0 : f.sigma.front();
}

}  // namespace rmx
