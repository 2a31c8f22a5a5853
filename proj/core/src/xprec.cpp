#include "rmx/xprec.hpp"

#include <stdexcept>

namespace rmx {

ExtScalar xdot_full(std::span<const double> a, std::span<const double> b) {
    ExtScalar acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc = xfma_acc(acc, a[i], b[i]);
    return acc;
}

double xdot(std::span<const double> a, std::span<const double> b) {
    return xdot_full(a, b).value();
}

DenseMatrix xmatmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("xmatmul: shape mismatch");
    DenseMatrix bt = b.transposed();
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = xdot(a.row(i), bt.row(j));
    return c;
}

DenseMatrix xmatmul_sub(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& d) {
    DenseMatrix bt = b.transposed();
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            ExtScalar acc = xdot_full(a.row(i), bt.row(j));
            c(i, j) = xsub(acc, ExtScalar(d(i, j))).value();
        }
    return c;
}

Vec xresidual(const DenseMatrix& a, const Vec& x, const Vec& b) {
    if (a.cols() != x.size() || a.rows() != b.size())
        throw std::invalid_argument("xresidual: shape mismatch");
    Vec r(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        ExtScalar acc(b[i]);
        auto row = a.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) acc = xfma_acc(acc, -row[j], x[j]);
        r[i] = acc.value();
    }
    return r;
}

DenseMatrix xresidual_mat(const DenseMatrix& a, const DenseMatrix& x, const DenseMatrix& b) {
    DenseMatrix xt = x.transposed();
    DenseMatrix r(b.rows(), b.cols());
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            ExtScalar acc(b(i, j));
            auto row = a.row(i);
            auto col = xt.row(j);
            for (std::size_t k = 0; k < a.cols(); ++k) acc = xfma_acc(acc, -row[k], col[k]);
            r(i, j) = acc.value();
        }
    return r;
}

void ExtVec::accumulate(const Vec& d) {
    for (std::size_t i = 0; i < d.size(); ++i) add(i, ExtScalar(d[i]));
}

Vec ExtVec::rounded() const {
    Vec v(hi.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = hi[i] + lo[i];
    return v;
}

double ExtVec::norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < hi.size(); ++i) {
        double v = hi[i] + lo[i];
        s += v * v;
    }
    return std::sqrt(s);
}

Vec xresidual_ext(const DenseMatrix& a, const ExtVec& y, const Vec& b) {
    Vec r(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        ExtScalar acc(b[i]);
        auto row = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j)
            acc = xsub(acc, xmul(ExtScalar(row[j]), y.at(j)));
        r[i] = acc.value();
    }
    return r;
}

ExtVec xmatvec_ext(const DenseMatrix& a, const ExtVec& x) {
    ExtVec y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        ExtScalar acc;
        auto row = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j)
            acc = xadd(acc, xmul(ExtScalar(row[j]), x.at(j)));
        y.set(i, acc);
    }
    return y;
}

double relative_residual_ext(const DenseMatrix& a, const ExtVec& y, const Vec& b) {
    Vec r = xresidual_ext(a, y, b);
    double nb = norm2(b);
    return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

ExtVec xsolve_small(const std::vector<std::vector<ExtScalar>>& g_in, const ExtVec& rhs) {
    std::size_t n = g_in.size();
    auto g = g_in;
    ExtVec b(n);
    for (std::size_t i = 0; i < n; ++i) b.set(i, rhs.at(i));
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(g[k][k].value());
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = std::fabs(g[i][k].value());
            if (v > best) best = v, piv = i;
        }
        if (best == 0.0) throw std::runtime_error("xsolve_small: singular system");
        if (piv != k) {
            std::swap(g[k], g[piv]);
            ExtScalar t = b.at(k);
            b.set(k, b.at(piv));
            b.set(piv, t);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            ExtScalar l = xdiv(g[i][k], g[k][k]);
            for (std::size_t j = k; j < n; ++j) g[i][j] = xsub(g[i][j], xmul(l, g[k][j]));
            b.set(i, xsub(b.at(i), xmul(l, b.at(k))));
        }
    }
    ExtVec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        ExtScalar acc = b.at(ii);
        for (std::size_t j = ii + 1; j < n; ++j) acc = xsub(acc, xmul(g[ii][j], x.at(j)));
        x.set(ii, xdiv(acc, g[ii][ii]));
    }
    return x;
}

ExtDense xadd_outer_ext(const DenseMatrix& a, const DenseMatrix& u, const DenseMatrix& v) {
    if (u.cols() != v.cols() || a.rows() != u.rows() || a.cols() != v.rows())
        throw std::invalid_argument("xadd_outer_ext: shape mismatch");
    ExtDense c{DenseMatrix(a.rows(), a.cols()), DenseMatrix(a.rows(), a.cols())};
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            ExtScalar acc(a(i, j));
            for (std::size_t k = 0; k < u.cols(); ++k) acc = xfma_acc(acc, u(i, k), v(j, k));
            c.hi(i, j) = acc.hi;
            c.lo(i, j) = acc.lo;
        }
    return c;
}

Vec xresidual_ext2(const ExtDense& m, const ExtVec& y, const Vec& b) {
    Vec r(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        ExtScalar acc(b[i]);
        for (std::size_t j = 0; j < m.cols(); ++j) acc = xsub(acc, xmul(m.at(i, j), y.at(j)));
        r[i] = acc.value();
    }
    return r;
}

ExtDense xmatmul_keep(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("xmatmul_keep: shape mismatch");
    DenseMatrix bt = b.transposed();
    ExtDense c{DenseMatrix(a.rows(), b.cols()), DenseMatrix(a.rows(), b.cols())};
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            ExtScalar acc = xdot_full(a.row(i), bt.row(j));
            c.hi(i, j) = acc.hi;
            c.lo(i, j) = acc.lo;
        }
    return c;
}

DenseMatrix xmatmul_round(const DenseMatrix& a, const ExtDense& m) {
    if (a.cols() != m.rows()) throw std::invalid_argument("xmatmul_round: shape mismatch");
    DenseMatrix c(a.rows(), m.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            ExtScalar acc;
            auto row = a.row(i);
            for (std::size_t k = 0; k < a.cols(); ++k)
                acc = xadd(acc, xmul(ExtScalar(row[k]), m.at(k, j)));
            c(i, j) = acc.value();
        }
    return c;
}

ExtDense xmatmul_keep2(const DenseMatrix& a, const ExtDense& m) {
    if (a.cols() != m.rows()) throw std::invalid_argument("xmatmul_keep2: shape mismatch");
    ExtDense c{DenseMatrix(a.rows(), m.cols()), DenseMatrix(a.rows(), m.cols())};
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            ExtScalar acc;
            auto row = a.row(i);
            for (std::size_t k = 0; k < a.cols(); ++k)
                acc = xadd(acc, xmul(ExtScalar(row[k]), m.at(k, j)));
            c.hi(i, j) = acc.hi;
            c.lo(i, j) = acc.lo;
        }
    return c;
}

DenseMatrix xmatmul_round_right(const ExtDense& m, const DenseMatrix& b) {
    if (m.cols() != b.rows()) throw std::invalid_argument("xmatmul_round_right: shape mismatch");
    DenseMatrix c(m.rows(), b.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            ExtScalar acc;
            for (std::size_t k = 0; k < m.cols(); ++k)
                acc = xadd(acc, xmul(m.at(i, k), ExtScalar(b(k, j))));
            c(i, j) = acc.value();
        }
    return c;
}

DenseMatrix xadd_outer(const DenseMatrix& a, const DenseMatrix& u, const DenseMatrix& v) {
    if (u.cols() != v.cols() || a.rows() != u.rows() || a.cols() != v.rows())
        throw std::invalid_argument("xadd_outer: shape mismatch");
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            ExtScalar acc(a(i, j));
            for (std::size_t k = 0; k < u.cols(); ++k) acc = xfma_acc(acc, u(i, k), v(j, k));
            c(i, j) = acc.value();
        }
    return c;
}

}  // namespace rmx
