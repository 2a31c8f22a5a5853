#include "rmx/elimination.hpp"

#include <cmath>

#include "rmx/xprec.hpp"

namespace rmx {

GenpFactors genp(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("genp: square matrix required");
    std::size_t n = a.rows();
    GenpFactors f{a, {}};
    DenseMatrix& lu = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        double piv = lu(k, k);
        double mag = std::fabs(piv);
        if (mag < 1e-300)
            throw NumericalError("genp: pivot vanished at step " + std::to_string(k) +
                                 " (input needs preprocessing)");
        f.monitor.max_pivot = std::max(f.monitor.max_pivot, mag);
        f.monitor.max_pivot_recip = std::max(f.monitor.max_pivot_recip, 1.0 / mag);
        for (std::size_t i = k + 1; i < n; ++i) {
            double l = lu(i, k) / piv;
            lu(i, k) = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= l * lu(k, j);
        }
    }
    return f;
}

Vec genp_solve(const GenpFactors& f, const Vec& b) {
    std::size_t n = f.lu.rows();
    Vec y(b);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) y[i] -= f.lu(i, j) * y[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) y[ii] -= f.lu(ii, j) * y[j];
        y[ii] /= f.lu(ii, ii);
    }
    return y;
}

DenseMatrix genp_solve_mat(const GenpFactors& f, const DenseMatrix& b) {
    DenseMatrix x(b.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) x.set_column(j, genp_solve(f, b.column(j)));
    return x;
}

namespace {

// recursive 2x2 block inversion via Schur complements, norms monitored
DenseMatrix block_invert(const DenseMatrix& a, std::size_t block, PivotMonitor& mon) {
    std::size_t n = a.rows();
    if (n <= block) {
        double nrm = norm2_estimate(a);
        GenpFactors f = genp(a);
        DenseMatrix inv = genp_solve_mat(f, DenseMatrix::identity(n));
        mon.max_block_norm = std::max(mon.max_block_norm, nrm);
        mon.max_block_inv_norm = std::max(mon.max_block_inv_norm, norm2_estimate(inv));
        mon.max_pivot = std::max(mon.max_pivot, f.monitor.max_pivot);
        mon.max_pivot_recip = std::max(mon.max_pivot_recip, f.monitor.max_pivot_recip);
        return inv;
    }
    std::size_t k = block;
    DenseMatrix a00 = a.block(0, 0, k, k);
    DenseMatrix a01 = a.block(0, k, k, n - k);
    DenseMatrix a10 = a.block(k, 0, n - k, k);
    DenseMatrix a11 = a.block(k, k, n - k, n - k);
    DenseMatrix inv00 = block_invert(a00, block, mon);
    mon.max_block_norm = std::max(mon.max_block_norm, norm2_estimate(a00));
    mon.max_block_inv_norm = std::max(mon.max_block_inv_norm, norm2_estimate(inv00));
    DenseMatrix schur = a11 - a10 * inv00 * a01;
    DenseMatrix invs = block_invert(schur, block, mon);
    // standard 2x2 block inverse
    DenseMatrix b01 = inv00 * a01;
    DenseMatrix b10 = a10 * inv00;
    DenseMatrix top_left = inv00 + b01 * invs * b10;
    DenseMatrix top_right = b01 * invs;
    top_right *= -1.0;
    DenseMatrix bot_left = invs * b10;
    bot_left *= -1.0;
    DenseMatrix out(n, n);
    out.set_block(0, 0, top_left);
    out.set_block(0, k, top_right);
    out.set_block(k, 0, bot_left);
    out.set_block(k, k, invs);
    return out;
}

}  // namespace

BlockGenpResult block_genp(const DenseMatrix& a, std::size_t block) {
    if (a.rows() != a.cols()) throw std::invalid_argument("block_genp: square matrix required");
    if (block == 0) throw std::invalid_argument("block_genp: block size must be positive");
    BlockGenpResult r;
    r.inverse_apply = block_invert(a, block, r.monitor);
    return r;
}

Vec block_genp_solve(const BlockGenpResult& f, const Vec& b) { return f.inverse_apply * b; }

Vec iterative_refinement(const std::function<Vec(const Vec&)>& apply_a,
                         const std::function<Vec(const Vec&)>& approx_solve, const Vec& b,
                         int steps) {
    Vec y = approx_solve(b);
    if (steps <= 0) return y;
    double prev_res = std::numeric_limits<double>::infinity();
    int growth = 0;
    for (int s = 0; s < steps; ++s) {
        Vec ay = apply_a(y);
        Vec r(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - ay[i];
        double rn = norm2(r);
        if (rn > prev_res) {
            if (++growth >= 2) throw NumericalError("iterative_refinement: residual diverging");
        } else {
            growth = 0;
        }
        prev_res = rn;
        if (rn == 0.0) break;
        Vec d = approx_solve(r);
        for (std::size_t i = 0; i < b.size(); ++i) y[i] += d[i];
    }
    return y;
}

DenseMatrix iterative_refinement_mat(const DenseMatrix& a,
                                     const std::function<Vec(const Vec&)>& approx_solve,
                                     const DenseMatrix& b, int steps) {
    DenseMatrix x(a.cols(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        Vec bj = b.column(j);
        Vec y = approx_solve(bj);
        for (int s = 0; s < steps; ++s) {
            Vec r = xresidual(a, y, bj);
            Vec d = approx_solve(r);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += d[i];
        }
        x.set_column(j, y);
    }
    return x;
}

namespace {

// +-1 circulants of even order are exactly singular whenever the entries sum
// to zero at the special frequencies (k = 0, n/2, ...), which happens with
// sizable probability; validate the eigenvalues and redraw.
DenseMatrix good_sign_circulant(std::size_t n, Seed seed) {
    for (std::uint64_t att = 0; att < 32; ++att) {
        StructuredMatrix m = sign_circulant(n, seed.child(att));
        CVec eig = circulant_eigenvalues(m.data());
        double hi = 0.0, lo = std::numeric_limits<double>::infinity();
        for (auto& e : eig) {
            double v = std::abs(e);
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
        if (lo > 1e-4 * hi) return m.densify();
    }
    throw NumericalError("sign_circulant multiplier: no well-conditioned draw");
}

Vec genp_refined_solve(const DenseMatrix& m, const Vec& b, int refine_steps) {
    GenpFactors f = genp(m);
    auto solve = [&](const Vec& r) { return genp_solve(f, r); };
    Vec y = solve(b);
    for (int s = 0; s < refine_steps; ++s) {
        Vec r = xresidual(m, y, b);
        Vec d = solve(r);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += d[i];
    }
    return y;
}

}  // namespace

Vec randomized_genp_solve(const DenseMatrix& a, const Vec& b, Multiplier mult, int refine_steps,
                          Seed seed) {
    std::size_t n = a.rows();
    for (int attempt = 0; attempt < 2; ++attempt) {
        Seed s = seed.child(1000 + std::uint64_t(attempt));
        try {
            switch (mult) {
                case Multiplier::none:
                    return genp_refined_solve(a, b, refine_steps);
                case Multiplier::sign_circulant: {
                    DenseMatrix m = good_sign_circulant(n, s);
                    DenseMatrix am = a * m;
                    Vec z = genp_refined_solve(am, b, refine_steps);
                    return m * z;
                }
                case Multiplier::householder: {
                    // the reflection variant I - 2uu^T/(u^Tu): the projector-like
                    // I - uv^T/(u^Tv) of householder_pm1 is singular by construction
                    CounterRng rng(s);
                    Vec u(n);
                    for (double& x : u) x = rng.sign();
                    DenseMatrix m = DenseMatrix::identity(n);
                    double c = dot(u, u);
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < n; ++j) m(i, j) -= 2.0 * u[i] * u[j] / c;
                    DenseMatrix am = a * m;
                    Vec z = genp_refined_solve(am, b, refine_steps);
                    return m * z;
                }
                case Multiplier::gaussian: {
                    DenseMatrix m = gaussian_matrix(n, n, 0.0, 1.0, s);
                    DenseMatrix am = a * m;
                    Vec z = genp_refined_solve(am, b, refine_steps);
                    return m * z;
                }
                case Multiplier::gaussian_two_sided: {
                    DenseMatrix g = gaussian_matrix(n, n, 0.0, 1.0, s.child(1));
                    DenseMatrix h = gaussian_matrix(n, n, 0.0, 1.0, s.child(2));
                    DenseMatrix gah = g * a * h;
                    Vec gb = g * b;
                    Vec z = genp_refined_solve(gah, gb, refine_steps);
                    return h * z;
                }
            }
        } catch (const NumericalError&) {
            if (attempt == 1) throw;
        }
    }
    throw NumericalError("randomized_genp_solve: unreachable");
}

}  // namespace rmx
