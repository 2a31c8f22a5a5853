#include "rmx/singspaces.hpp"

#include <cmath>

#include "rmx/precond.hpp"
#include "rmx/xprec.hpp"

namespace rmx {

namespace {

DenseMatrix pad_to_square(const DenseMatrix& a) {
    // zero rows below preserve the null space exactly
    if (a.rows() >= a.cols()) return a;
    DenseMatrix p(a.cols(), a.cols());
    p.set_block(0, 0, a);
    return p;
}

// refined solve columns: X = M^{-1} B with extended-precision refinement
DenseMatrix refined_solve_mat(const DenseMatrix& m, const DenseMatrix& b, int steps = 2) {
    PluFactors f = plu(m);
    if (f.singular) throw NumericalError("refined_solve_mat: singular matrix");
    DenseMatrix x(m.cols(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        Vec bj = b.column(j);
        Vec y = plu_solve(f, bj);
        for (int s = 0; s < steps; ++s) {
            Vec r = xresidual(m, y, bj);
            Vec d = plu_solve(f, r);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += d[i];
        }
        x.set_column(j, y);
    }
    return x;
}

// orthonormal basis of the numerical null space of a small matrix
DenseMatrix small_null_basis(const DenseMatrix& a, double tol) {
    SvdFactors f = svd(a);
    double s1 = f.sigma.empty() ? 0.0 : f.sigma.front();
    std::size_t n = a.cols();
    std::size_t rank = 0;
    while (rank < f.sigma.size() && f.sigma[rank] > tol * std::max(s1, 1e-300)) ++rank;
    if (s1 == 0.0) rank = 0;
    DenseMatrix x(n, n - rank);
    for (std::size_t j = rank; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) x(i, j - rank) = f.T(i, j);
    return x;
}

}  // namespace

DenseMatrix nmb(const DenseMatrix& a_in, double tol, Seed seed) {
    DenseMatrix a = pad_to_square(a_in);
    std::size_t m = a.rows(), n = a.cols();
    double na = norm2_estimate(a);
    if (na == 0.0) return DenseMatrix::identity(n);

    std::size_t r = 1;
    for (int round = 0; r <= n; ++round) {
        DenseMatrix u = gaussian_matrix(m, r, 0.0, 1.0, seed.child(2 * round));
        DenseMatrix v = gaussian_matrix(n, r, 0.0, 1.0, seed.child(2 * round + 1));
        AdditivePrep prep = additive_preprocess_scaled(a, std::move(u), std::move(v));
        SvdFactors fc = svd(prep.C);
        bool full = fc.sigma.back() > 1e-12 * fc.sigma.front();
        if (!full) {
            r = std::min(n, 2 * r);  // width below the nullity: C cannot be regular
            continue;
        }
        DenseMatrix b = (m == n) ? refined_solve_mat(prep.C, prep.U) : pseudo_inverse(prep.C) * prep.U;
        DenseMatrix ab = a * b;
        double scale = na * norm2_estimate(b);
        if (scale == 0.0 || norm2_estimate(ab) <= tol * scale) return orthonormalize(b);
        DenseMatrix x = small_null_basis(ab, tol);
        if (x.cols() > 0) {
            DenseMatrix bx = b * x;
            if (norm2_estimate(a * bx) <= tol * na * std::max(norm2_estimate(bx), 1e-300))
                return orthonormalize(bx);
        }
        if (x.cols() == 0 && r >= n) break;
        if (x.cols() == 0) {
            r = std::min(n, 2 * r);
            continue;
        }
        // width matched or exceeded the nullity but the residual check failed: widen once more
        if (r == n) break;
        r = std::min(n, 2 * r);
    }
    return DenseMatrix(n, 0);  // nonsingular input: empty basis
}

TrailingBasisResult trailing_basis_additive(const DenseMatrix& a, std::size_t r_plus, double tau,
                                            Seed seed) {
    TrailingBasisResult out;
    std::size_t m = a.rows(), n = a.cols();
    if (m < n) throw std::invalid_argument("trailing_basis_additive: needs rows >= cols");
    DenseMatrix u = gaussian_matrix(m, r_plus, 0.0, 1.0, seed.child(1));
    DenseMatrix v = gaussian_matrix(n, r_plus, 0.0, 1.0, seed.child(2));
    AdditivePrep prep = additive_preprocess_scaled(a, std::move(u), std::move(v));
    SvdFactors fc = svd(prep.C);
    double kappa = fc.sigma.back() > 0.0 ? fc.sigma.front() / fc.sigma.back()
                                         : std::numeric_limits<double>::infinity();
    if (kappa > 1e8) {
        out.diagnostics = "C ill conditioned (kappa " + std::to_string(kappa) + ")";
        return out;
    }
    DenseMatrix y = (m == n) ? refined_solve_mat(prep.C, prep.U) : pseudo_inverse(prep.C) * prep.U;
    DenseMatrix ay = a * y;
    double na = fc.sigma.front();  // ||C|| ~ ||A|| after scaling
    double ny = norm2_estimate(y);
    if (norm2_estimate(ay) <= tau * na * ny) {
        out.success = true;
        out.r = r_plus;
        out.B = std::move(y);
        return out;
    }
    // aggregation: keep the trailing directions of A Y
    SvdFactors fay = svd(ay);
    std::size_t r = 0;
    for (std::size_t j = 0; j < fay.sigma.size(); ++j)
        if (fay.sigma[j] <= tau * na * ny) ++r;
    if (r == 0) {
        out.diagnostics = "no trailing directions under tau";
        return out;
    }
    DenseMatrix x(r_plus, r);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < r_plus; ++i) x(i, j) = fay.T(i, r_plus - r + j);
    DenseMatrix b = y * x;
    if (norm2_estimate(a * b) > tau * na * std::max(norm2_estimate(b), 1e-300)) {
        out.diagnostics = "stage-4 residual above tau";
        return out;
    }
    out.success = true;
    out.r = r;
    out.B = std::move(b);
    return out;
}

TrailingBasisResult trailing_basis_augment(const DenseMatrix& a, std::size_t r_plus, double tau,
                                           Seed seed) {
    TrailingBasisResult out;
    std::size_t m = a.rows(), n = a.cols();
    if (m < n) throw std::invalid_argument("trailing_basis_augment: needs rows >= cols");
    double na = norm2_estimate(a);
    DenseMatrix u = gaussian_matrix(m, r_plus, 0.0, na / std::sqrt(double(m)), seed.child(1));
    DenseMatrix v = gaussian_matrix(n, r_plus, 0.0, na / std::sqrt(double(n)), seed.child(2));
    DenseMatrix w = gaussian_matrix(r_plus, r_plus, 0.0, na / std::sqrt(double(r_plus)), seed.child(3));
    Augmentation aug = augment(a, u, v, w);
    SvdFactors fk = svd(aug.K);
    double kappa = fk.sigma.back() > 0.0 ? fk.sigma.front() / fk.sigma.back()
                                         : std::numeric_limits<double>::infinity();
    if (kappa > 1e8) {
        out.diagnostics = "K ill conditioned (kappa " + std::to_string(kappa) + ")";
        return out;
    }
    // Y = (O | I_n) K^{-1} (O; U)   (square case; K is (m+r) x (n+r))
    DenseMatrix rhs(m + r_plus, r_plus);
    rhs.set_block(r_plus, 0, u);
    DenseMatrix z = (aug.K.rows() == aug.K.cols()) ? refined_solve_mat(aug.K, rhs)
                                                   : pseudo_inverse(aug.K) * rhs;
    DenseMatrix y = z.block(r_plus, 0, n, r_plus);
    DenseMatrix ay = a * y;
    double ny = norm2_estimate(y);
    if (norm2_estimate(ay) <= tau * na * ny) {
        out.success = true;
        out.r = r_plus;
        out.B = std::move(y);
        return out;
    }
    SvdFactors fay = svd(ay);
    std::size_t r = 0;
    for (std::size_t j = 0; j < fay.sigma.size(); ++j)
        if (fay.sigma[j] <= tau * na * ny) ++r;
    if (r == 0) {
        out.diagnostics = "no trailing directions under tau";
        return out;
    }
    DenseMatrix x(r_plus, r);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < r_plus; ++i) x(i, j) = fay.T(i, r_plus - r + j);
    DenseMatrix b = y * x;
    if (norm2_estimate(a * b) > tau * na * std::max(norm2_estimate(b), 1e-300)) {
        out.diagnostics = "stage-4 residual above tau";
        return out;
    }
    out.success = true;
    out.r = r;
    out.B = std::move(b);
    return out;
}

namespace {

double inv_norm_estimate(const DenseMatrix& a) {
    PluFactors f = plu(a);
    if (f.singular) return std::numeric_limits<double>::infinity();
    PluFactors ft = plu(a.transposed());
    std::size_t n = a.rows();
    Vec x(n, 1.0 / std::sqrt(double(n)));
    double est = 0.0;
    for (int it = 0; it < 30; ++it) {
        Vec y = plu_solve(f, x);
        Vec z = plu_solve(ft, y);
        double nz = norm2(z);
        if (nz == 0.0) return 0.0;
        double prev = est;
        est = std::sqrt(nz);
        for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / nz;
        if (it > 4 && std::fabs(est - prev) < 1e-3 * est) break;
    }
    return est;
}

}  // namespace

DenseMatrix leading_basis_dual(const DenseMatrix& a, std::size_t q, Seed seed) {
    std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("leading_basis_dual: square A required");
    double inv_norm = inv_norm_estimate(a);
    if (!std::isfinite(inv_norm) || inv_norm == 0.0)
        throw NumericalError("leading_basis_dual: could not scale by ||A^-1||");
    double sigma = std::sqrt(inv_norm);  // ||U_ V_^T|| ~ sigma^2 * O(n) ~ ||A^{-1}||
    double col_scale = sigma / std::sqrt(double(n));
    for (int attempt = 0; attempt < 2; ++attempt) {
        DenseMatrix u = gaussian_matrix(n, q, 0.0, col_scale, seed.child(10 + attempt));
        DenseMatrix v = gaussian_matrix(n, q, 0.0, col_scale, seed.child(20 + attempt));
        try {
            DualPrepExt dp = dual_additive_ext(a, u, v);
            // B = C_^T V_ off the extended C_
            DenseMatrix b(n, q);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < q; ++j) {
                    ExtScalar acc;
                    for (std::size_t k = 0; k < n; ++k)
                        acc = xadd(acc, xmul(dp.C_.at(k, i), ExtScalar(v(k, j))));
                    b(i, j) = acc.value();
                }
            return b;
        } catch (const std::exception&) {
            if (attempt == 1) throw;
        }
    }
    throw NumericalError("leading_basis_dual: unreachable");
}

DenseMatrix leading_basis_dual_aug(const DenseMatrix& a, std::size_t q, Seed seed) {
    std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("leading_basis_dual_aug: square A required");
    for (int attempt = 0; attempt < 2; ++attempt) {
        DenseMatrix u = gaussian_matrix(n, q, 0.0, 1.0, seed.child(30 + attempt));
        DenseMatrix v = gaussian_matrix(n, q, 0.0, 1.0, seed.child(40 + attempt));
        DenseMatrix w = DenseMatrix::identity(q);
        DenseMatrix b = a.transposed() * u;
        // S = W + U^T A^T V, assembled in extended precision
        DenseMatrix atv = xmatmul(a.transposed(), v);
        DenseMatrix s(q, q);
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = 0; j < q; ++j) {
                ExtScalar acc(w(i, j));
                for (std::size_t k = 0; k < n; ++k) acc = xfma_acc(acc, u(k, i), atv(k, j));
                s(i, j) = acc.value();
            }
        PluFactors sf = plu(s);
        double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
            double p = std::fabs(sf.lu(i, i));
            pmin = std::min(pmin, p);
            pmax = std::max(pmax, p);
        }
        if (sf.singular || pmin <= 1e-14 * pmax) {
            if (attempt == 1) throw NumericalError("leading_basis_dual_aug: S singular");
            continue;
        }
        // T_+ = B - B S^{-1} V^T B
        DenseMatrix vtb = v.transposed() * b;
        DenseMatrix sinv_vtb = plu_solve_mat(sf, vtb);
        return b - b * sinv_vtb;
    }
    throw NumericalError("leading_basis_dual_aug: unreachable");
}

DenseMatrix leading_basis_sampling(const DenseMatrix& a, std::size_t q, SampleFamily family,
                                   Seed seed) {
    if (q < 1) throw std::invalid_argument("leading_basis_sampling: q >= 1");
    DenseMatrix u = (family == SampleFamily::gaussian)
                        ? gaussian_matrix(a.rows(), q, 0.0, 1.0, seed)
                        : gaussian_toeplitz(a.rows(), q, 0.0, 1.0, seed).densify();
    return a.transposed() * u;
}

CondProbe cond_probe(const DenseMatrix& b, double kappa_max, int budget, double rq_tol) {
    CondProbe out;
    std::size_t n = b.cols();
    if (n == 0 || b.rows() == 0) return out;
    // stage 1: power iteration on B^T B for sigma_1^2
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * double(i % 7);
    double nx = norm2(x);
    for (double& v : x) v /= nx;
    double lam = 0.0;
    for (int it = 0; it < budget; ++it) {
        Vec y = matvec_transposed(b, b * x);
        double ny = norm2(y);
        if (ny == 0.0) return out;  // zero matrix: not well conditioned
        double prev = lam;
        lam = dot(x, y);
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
        if (it > 2 && std::fabs(lam - prev) <= rq_tol * std::fabs(lam)) break;
    }
    double sigma_plus2 = 1.21 * lam;  // a close upper bound on sigma_1^2
    out.sigma_plus = std::sqrt(sigma_plus2);
    // stage 2: sigma_min through the Gram matrix without pivoting.  The
    // shift-and-power variant cannot decide kappa_max = 1e8 in doubles
    // (sigma_min^2 / sigma_+^2 < eps), so factor B^T B by plain Cholesky --
    // a non-positive pivot is itself the rank-deficiency signal -- and run a
    // few inverse-iteration steps for the smallest singular value.
    DenseMatrix gram(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = xdot(b.column(i), b.column(j));
            gram(i, j) = s;
            gram(j, i) = s;
        }
    DenseMatrix chol(n, n);
    double floor2 = sigma_plus2 / (kappa_max * kappa_max);
    for (std::size_t j = 0; j < n; ++j) {
        double d = gram(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= chol(j, k) * chol(j, k);
        if (!(d > 1e-4 * floor2)) {
            out.sigma_min = d > 0.0 ? std::sqrt(d) : 0.0;
            out.well_conditioned = false;
            return out;
        }
        chol(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = gram(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= chol(i, k) * chol(j, k);
            chol(i, j) = s / chol(j, j);
        }
    }
    auto chol_solve = [&](Vec y) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < i; ++k) y[i] -= chol(i, k) * y[k];
            y[i] /= chol(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            for (std::size_t k = ii + 1; k < n; ++k) y[ii] -= chol(k, ii) * y[k];
            y[ii] /= chol(ii, ii);
        }
        return y;
    };
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 - 0.2 * double(i % 5);
    nx = norm2(x);
    for (double& v : x) v /= nx;
    double inv_lam = 0.0;
    int inv_budget = std::max(budget / 4, 10);
    for (int it = 0; it < inv_budget; ++it) {
        Vec y = chol_solve(x);
        double ny = norm2(y);
        if (ny == 0.0) break;
        double prev = inv_lam;
        inv_lam = ny;
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
        if (it > 2 && std::fabs(inv_lam - prev) <= rq_tol * std::fabs(inv_lam)) break;
    }
    out.sigma_min = inv_lam > 0.0 ? 1.0 / std::sqrt(inv_lam) : 0.0;
    out.well_conditioned = out.sigma_min > 0.0 && out.sigma_plus / out.sigma_min <= kappa_max;
    return out;
}

RankSearchResult numerical_rank_sampling(const DenseMatrix& a, std::size_t rho_minus,
                                         std::size_t rho_plus, Seed seed, double kappa_max) {
    std::size_t m = a.rows(), n = a.cols();
    if (!(rho_minus <= rho_plus) || rho_plus > std::min(m, n))
        throw std::invalid_argument("numerical_rank_sampling: bad range");
    DenseMatrix g = gaussian_matrix(m, std::max<std::size_t>(rho_plus, 1), 0.0, 1.0, seed);
    auto probe_ok = [&](std::size_t rho) {
        if (rho == 0) return true;
        DenseMatrix grho = g.block(0, 0, m, rho);
        DenseMatrix bp = a.transposed() * grho;
        return cond_probe(bp, kappa_max).well_conditioned;
    };
    std::size_t lo = rho_minus, hi = rho_plus;
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (probe_ok(mid))
            lo = mid;
        else
            hi = mid - 1;
    }
    RankSearchResult out;
    out.rho = lo;
    if (lo > 0)
        out.B = a.transposed() * g.block(0, 0, m, lo);
    else
        out.B = DenseMatrix(n, 0);
    return out;
}

std::size_t numerical_rank_additive(const DenseMatrix& a, std::size_t rho_minus,
                                    std::size_t rho_plus, Seed seed, double kappa_max) {
    std::size_t m = a.rows(), n = a.cols();
    std::size_t r_max = n - rho_minus;
    DenseMatrix uplus = gaussian_matrix(m, std::max<std::size_t>(r_max, 1), 0.0, 1.0, seed.child(1));
    DenseMatrix vplus = gaussian_matrix(n, std::max<std::size_t>(r_max, 1), 0.0, 1.0, seed.child(2));
    auto probe_ok = [&](std::size_t rho) {
        std::size_t s = n - rho;
        AdditivePrep prep = additive_preprocess_scaled(a, uplus.block(0, 0, m, s),
                                                       vplus.block(0, 0, n, s));
        return cond_probe(prep.C, kappa_max).well_conditioned;
    };
    std::size_t lo = rho_minus, hi = rho_plus;
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (probe_ok(mid))
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

std::size_t numerical_rank_augment(const DenseMatrix& a, std::size_t rho_minus,
                                   std::size_t rho_plus, Seed seed, double kappa_max) {
    std::size_t m = a.rows(), n = a.cols();
    std::size_t r_max = n - rho_minus;
    double na = norm2_estimate(a);
    double cs = na / std::sqrt(double(std::max(m, n)));
    DenseMatrix uplus = gaussian_matrix(m, std::max<std::size_t>(r_max, 1), 0.0, cs, seed.child(1));
    DenseMatrix vplus = gaussian_matrix(n, std::max<std::size_t>(r_max, 1), 0.0, cs, seed.child(2));
    DenseMatrix wplus =
        gaussian_matrix(std::max<std::size_t>(r_max, 1), std::max<std::size_t>(r_max, 1), 0.0, cs,
                        seed.child(3));
    auto probe_ok = [&](std::size_t rho) {
        std::size_t s = n - rho;
        if (s == 0) return cond_probe(a, kappa_max).well_conditioned;
        Augmentation aug = augment(a, uplus.block(0, 0, m, s), vplus.block(0, 0, n, s),
                                   wplus.block(0, 0, s, s));
        return cond_probe(aug.K, kappa_max).well_conditioned;
    };
    std::size_t lo = rho_minus, hi = rho_plus;
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (probe_ok(mid))
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

}  // namespace rmx
