#include "rmx/structured.hpp"

#include <cmath>

namespace rmx {

StructuredMatrix StructuredMatrix::toeplitz(std::size_t m, std::size_t n, Vec diags) {
    if (diags.size() != m + n - 1) throw std::invalid_argument("toeplitz: bad vector length");
    StructuredMatrix s;
    s.kind_ = Kind::toeplitz;
    s.m_ = m;
    s.n_ = n;
    s.data_ = std::move(diags);
    return s;
}

StructuredMatrix StructuredMatrix::f_circulant(std::size_t n, double f, Vec first_col) {
    if (first_col.size() != n) throw std::invalid_argument("f_circulant: bad vector length");
    if (f == 0.0) throw std::invalid_argument("f_circulant: f must be nonzero");
    StructuredMatrix s;
    s.kind_ = Kind::f_circulant;
    s.m_ = s.n_ = n;
    s.f_ = f;
    s.data_ = std::move(first_col);
    return s;
}

StructuredMatrix StructuredMatrix::hankel(std::size_t m, std::size_t n, Vec antidiags) {
    if (antidiags.size() != m + n - 1) throw std::invalid_argument("hankel: bad vector length");
    StructuredMatrix s;
    s.kind_ = Kind::hankel;
    s.m_ = m;
    s.n_ = n;
    s.data_ = std::move(antidiags);
    return s;
}

double StructuredMatrix::entry(std::size_t i, std::size_t j) const {
    switch (kind_) {
        case Kind::toeplitz:
            return data_[n_ - 1 + i - j];
        case Kind::hankel:
            return data_[i + j];
        case Kind::f_circulant: {
            // Z_f(v)(i,j) = v_{i-j} for i >= j, f * v_{n+i-j} otherwise
            if (i >= j) return data_[i - j];
            return f_ * data_[n_ + i - j];
        }
    }
    return 0.0;
}

DenseMatrix StructuredMatrix::densify() const {
    DenseMatrix a(m_, n_);
    for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < n_; ++j) a(i, j) = entry(i, j);
    return a;
}

Vec StructuredMatrix::apply(const Vec& x) const {
    switch (kind_) {
        case Kind::toeplitz:
            return toeplitz_matvec(data_, m_, n_, x);
        case Kind::f_circulant:
            return f_circulant_matvec(data_, f_, x);
        case Kind::hankel: {
            // H(i,j) = a_{i+j} = T(i, n-1-j) for the Toeplitz with the same vector
            return toeplitz_matvec(data_, m_, n_, reversed(x));
        }
    }
    return {};
}

Vec StructuredMatrix::apply_transposed(const Vec& x) const {
    switch (kind_) {
        case Kind::toeplitz:
            return toeplitz_matvec_transposed(data_, m_, n_, x);
        case Kind::f_circulant: {
            // Z_f(v)^T = Z_{1/f}(u) with u = (v_0, f v_{n-1}, ..., f v_1)
            Vec u(n_);
            u[0] = data_[0];
            for (std::size_t i = 1; i < n_; ++i) u[i] = f_ * data_[n_ - i];
            return f_circulant_matvec(u, 1.0 / f_, x);
        }
        case Kind::hankel:
            return reversed(toeplitz_matvec_transposed(data_, m_, n_, x));
    }
    return {};
}

StructuredMatrix StructuredMatrix::from_dense(const DenseMatrix& a, Kind kind, double f) {
    std::size_t m = a.rows(), n = a.cols();
    switch (kind) {
        case Kind::toeplitz: {
            Vec d(m + n - 1);
            for (std::size_t j = 0; j < n; ++j) d[n - 1 - j] = a(0, j);
            for (std::size_t i = 0; i < m; ++i) d[n - 1 + i] = a(i, 0);
            auto s = toeplitz(m, n, std::move(d));
            for (std::size_t i = 1; i < m; ++i)
                for (std::size_t j = 1; j < n; ++j)
                    if (a(i, j) != a(i - 1, j - 1))
                        throw std::invalid_argument("from_dense: not Toeplitz");
            return s;
        }
        case Kind::f_circulant: {
            auto s = f_circulant(n, f, a.column(0));
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (a(i, j) != s.entry(i, j))
                        throw std::invalid_argument("from_dense: not f-circulant");
            return s;
        }
        case Kind::hankel: {
            Vec d(m + n - 1);
            for (std::size_t i = 0; i < m; ++i) d[i] = a(i, 0);
            for (std::size_t j = 1; j < n; ++j) d[m - 1 + j] = a(m - 1, j);
            auto s = hankel(m, n, std::move(d));
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 1; j < n; ++j)
                    if (a(i, j) != a(i + 1, j - 1))
                        throw std::invalid_argument("from_dense: not Hankel");
            return s;
        }
    }
    throw std::invalid_argument("from_dense: bad kind");
}

Vec levinson_solve(const Vec& diags, const Vec& b) {
    std::size_t n = b.size();
    if (diags.size() != 2 * n - 1) throw std::invalid_argument("levinson_solve: square system required");
    // t(h) = diags[n-1+h] for h in [1-n, n-1]
    auto t = [&](std::ptrdiff_t h) { return diags[std::size_t(std::ptrdiff_t(n) - 1 + h)]; };
    if (t(0) == 0.0) throw NumericalError("levinson_solve: zero leading entry");

    Vec f{1.0 / t(0)}, g{1.0 / t(0)}, x{b[0] / t(0)};
    double scale = norm1(diags) / double(2 * n - 1);
    for (std::size_t k = 1; k < n; ++k) {
        // errors of the zero-extended vectors against the new border
        double ef = 0.0, eg = 0.0, ex = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            ef += t(std::ptrdiff_t(k - i)) * f[i];
            eg += t(-std::ptrdiff_t(i + 1)) * g[i];
            ex += t(std::ptrdiff_t(k - i)) * x[i];
        }
        double den = 1.0 - ef * eg;
        if (!(std::fabs(den) > 1e-14) || !std::isfinite(den))
            throw NumericalError("levinson_solve: singular leading block (breakdown)");
        Vec fn(k + 1, 0.0), gn(k + 1, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            fn[i] = f[i];
            gn[i + 1] = g[i];
        }
        for (std::size_t i = 0; i <= k; ++i) {
            double fv = (fn[i] - ef * (i == 0 ? 0.0 : g[i - 1])) / den;
            double gv = (gn[i] - eg * (i < k ? f[i] : 0.0)) / den;
            fn[i] = fv;
            gn[i] = gv;
        }
        f = std::move(fn);
        g = std::move(gn);
        x.push_back(0.0);
        double corr = b[k] - ex;
        for (std::size_t i = 0; i <= k; ++i) x[i] += corr * g[i];
        (void)scale;
    }
    return x;
}

Vec GsInverse::apply(const Vec& x) const {
    Vec y1 = lower_toeplitz_matvec(a_, lower_toeplitz_matvec_transposed(b_, x));
    Vec y2 = lower_toeplitz_matvec(c_, lower_toeplitz_matvec_transposed(d_, x));
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = (y1[i] - y2[i]) / pivot_;
    return y;
}

namespace {

Vec toeplitz_solve_any(const Vec& diags, const Vec& b, bool use_levinson) {
    if (use_levinson) {
        try {
            return levinson_solve(diags, b);
        } catch (const NumericalError&) {
            // fall through to the dense path
        }
    }
    std::size_t n = b.size();
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = diags[n - 1 + i - j];
    return lu_solve(a, b);
}

// direct part (a): p1 T^{-1} = Z(p) Z(Jq)^T - Z(Zq) Z(ZJp)^T
GsInverse gs_from_pq(const Vec& p, const Vec& q) {
    std::size_t n = p.size();
    GsInverse inv;
    inv.pivot_ = p[0];
    inv.a_ = p;
    inv.b_ = reversed(q);  // Jq
    inv.c_.assign(n, 0.0);  // Zq: shift down
    for (std::size_t i = 1; i < n; ++i) inv.c_[i] = q[i - 1];
    Vec jp = reversed(p);
    inv.d_.assign(n, 0.0);  // ZJp
    for (std::size_t i = 1; i < n; ++i) inv.d_[i] = jp[i - 1];
    return inv;
}

// part (b): v0 T_n^{-1} = Z(v) Z(Jw')^T - Z(w) Z(Jv')^T from the (n+1) embedding
GsInverse gs_from_embedding(const Vec& vhat, const Vec& what) {
    std::size_t n = vhat.size() - 1;
    GsInverse inv;
    inv.pivot_ = vhat[0];
    inv.a_.assign(vhat.begin(), vhat.begin() + n);            // v = (v_0..v_{n-1})
    Vec wp(what.begin() + 1, what.end());                     // w' = (w_1..w_n)
    inv.b_ = reversed(wp);                                    // Jw'
    inv.c_.assign(what.begin(), what.begin() + n);            // w
    Vec vp(vhat.begin() + 1, vhat.end());                     // v'
    inv.d_ = reversed(vp);                                    // Jv'
    return inv;
}

}  // namespace

GsInverse toeplitz_inverse_gs(const StructuredMatrix& t, const GsOptions& opts) {
    if (t.kind() != StructuredMatrix::Kind::toeplitz || t.rows() != t.cols())
        throw std::invalid_argument("toeplitz_inverse_gs: square Toeplitz required");
    std::size_t n = t.rows();
    const Vec& diags = t.data();

    Vec p = toeplitz_solve_any(diags, basis_vector(n, 0), opts.use_levinson);
    Vec q = toeplitz_solve_any(diags, basis_vector(n, n - 1), opts.use_levinson);
    double pscale = std::max(norm2(p), norm2(q));
    if (std::fabs(p[0]) > opts.pivot_tol * pscale) return gs_from_pq(p, q);

    // (n+1) x (n+1) Toeplitz embedding with randomized corner entries; part (b)
    // inverts the leading n x n block, which equals T.  Two corner draws.
    std::uint64_t s = opts.corner_seed;
    auto next_corner = [&]() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        double u = double(z >> 11) * 0x1.0p-53;
        return (0.5 + u) * ((z & 1) ? 1.0 : -1.0);
    };
    double scale = norm1(diags) / double(diags.size()) * std::sqrt(double(n));
    for (int attempt = 0; attempt < 2; ++attempt) {
        Vec ext(2 * n + 1, 0.0);
        for (std::size_t i = 0; i < diags.size(); ++i) ext[i + 1] = diags[i];
        ext.front() = next_corner() * scale;  // new t_{-n}
        ext.back() = next_corner() * scale;   // new t_{+n}
        try {
            Vec vhat = toeplitz_solve_any(ext, basis_vector(n + 1, 0), opts.use_levinson);
            Vec what = toeplitz_solve_any(ext, basis_vector(n + 1, n), opts.use_levinson);
            double esc = std::max(norm2(vhat), norm2(what));
            if (std::fabs(vhat[0]) > opts.pivot_tol * esc) return gs_from_embedding(vhat, what);
        } catch (const NumericalError&) {
            // singular embedding draw, take a fresh corner pair
        }
    }
    throw NumericalError("toeplitz_inverse_gs: all pivot scalars vanished numerically");
}

HankelBridge hankel_bridge(const StructuredMatrix& h, BridgeSide side) {
    if (h.kind() != StructuredMatrix::Kind::hankel)
        throw std::invalid_argument("hankel_bridge: Hankel input required");
    std::size_t m = h.rows(), n = h.cols();
    // H = T J (right): T(i,j) = H(i, n-1-j) = a_{i+n-1-j} -> Toeplitz diagonal vector a
    // H = J T (left):  T(i,j) = H(m-1-i, j) = a_{m-1-i+j} -> reversed antidiagonal vector
    if (side == BridgeSide::right) {
        return {StructuredMatrix::toeplitz(m, n, h.data()), side};
    }
    return {StructuredMatrix::toeplitz(m, n, reversed(h.data())), side};
}

StructuredMatrix bridge_back(const HankelBridge& b) {
    const auto& t = b.toeplitz;
    if (b.side == BridgeSide::right)
        return StructuredMatrix::hankel(t.rows(), t.cols(), t.data());
    return StructuredMatrix::hankel(t.rows(), t.cols(), reversed(t.data()));
}

Vec hankel_solve(const StructuredMatrix& h, const Vec& x, const GsOptions& opts) {
    if (h.rows() != h.cols()) throw std::invalid_argument("hankel_solve: square required");
    HankelBridge b = hankel_bridge(h, BridgeSide::right);
    GsInverse ti = toeplitz_inverse_gs(b.toeplitz, opts);
    // H = T J  ->  H^{-1} = J T^{-1}, so y = J T^{-1} x
    return reversed(ti.apply(x));
}

}  // namespace rmx
