#include "rmx/matrix.hpp"

#include <cmath>

namespace rmx {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    return a;
}

DenseMatrix DenseMatrix::diag(const Vec& d) { return diag(d.size(), d.size(), d); }

DenseMatrix DenseMatrix::diag(std::size_t m, std::size_t n, const Vec& d) {
    DenseMatrix a(m, n);
    std::size_t l = std::min(std::min(m, n), d.size());
    for (std::size_t i = 0; i < l; ++i) a(i, i) = d[i];
    return a;
}

DenseMatrix DenseMatrix::from_column(const Vec& v) {
    DenseMatrix a(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) a(i, 0) = v[i];
    return a;
}

Vec DenseMatrix::column(std::size_t j) const {
    Vec v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void DenseMatrix::set_column(std::size_t j, const Vec& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix DenseMatrix::block(std::size_t i0, std::size_t j0, std::size_t m, std::size_t n) const {
    DenseMatrix b(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
    return b;
}

void DenseMatrix::set_block(std::size_t i0, std::size_t j0, const DenseMatrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
}

bool DenseMatrix::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& b) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += b.data_[k];
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& b) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= b.data_[k];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* crow = c.data() + i * c.cols();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.data() + k * b.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Vec operator*(const DenseMatrix& a, const Vec& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
    Vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

Vec matvec_transposed(const DenseMatrix& a, const Vec& x) {
    if (a.rows() != x.size()) throw std::invalid_argument("matvec_transposed: shape mismatch");
    Vec y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double xi = x[i];
        if (xi == 0.0) continue;
        auto row = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * row[j];
    }
    return y;
}

DenseMatrix hstack(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.rows() != b.rows()) throw std::invalid_argument("hstack: row mismatch");
    DenseMatrix c(a.rows(), a.cols() + b.cols());
    c.set_block(0, 0, a);
    c.set_block(0, a.cols(), b);
    return c;
}

DenseMatrix vstack(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.cols() != b.cols()) throw std::invalid_argument("vstack: col mismatch");
    DenseMatrix c(a.rows() + b.rows(), a.cols());
    c.set_block(0, 0, a);
    c.set_block(a.rows(), 0, b);
    return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double norm1(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

Vec& axpy(double alpha, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
    return y;
}

Vec scaled(const Vec& v, double s) {
    Vec w(v);
    for (double& x : w) x *= s;
    return w;
}

Vec vsub(const Vec& a, const Vec& b) {
    Vec c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
    return c;
}

Vec basis_vector(std::size_t n, std::size_t i) {
    Vec v(n, 0.0);
    v[i] = 1.0;
    return v;
}

double norm_one(const DenseMatrix& a) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) s += std::fabs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

double norm_inf(const DenseMatrix& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) best = std::max(best, norm1(a.row(i)));
    return best;
}

double norm_frobenius(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (double x : a.row(i)) s += x * x;
    return std::sqrt(s);
}

double norm_max(const DenseMatrix& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (double x : a.row(i)) best = std::max(best, std::fabs(x));
    return best;
}

Vec reversed(Vec v) {
    std::size_t n = v.size();
    for (std::size_t i = 0; i < n / 2; ++i) std::swap(v[i], v[n - 1 - i]);
    return v;
}

}  // namespace rmx
