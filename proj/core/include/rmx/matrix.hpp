#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmx {

using Vec = std::vector<double>;

/// Dense real matrix, row-major.  The universal value type of the library:
/// everything that is not explicitly structured passes through here.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    DenseMatrix(std::size_t rows, std::size_t cols, Vec data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_)
            throw std::invalid_argument("DenseMatrix: data length != rows*cols");
    }

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diag(const Vec& d);
    /// Rectangular m x n matrix with d on the main diagonal.
    static DenseMatrix diag(std::size_t m, std::size_t n, const Vec& d);
    static DenseMatrix from_column(const Vec& v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Vec column(std::size_t j) const;
    void set_column(std::size_t j, const Vec& v);

    DenseMatrix transposed() const;
    DenseMatrix block(std::size_t i0, std::size_t j0, std::size_t m, std::size_t n) const;
    void set_block(std::size_t i0, std::size_t j0, const DenseMatrix& b);

    bool all_finite() const;

    DenseMatrix& operator+=(const DenseMatrix& b);
    DenseMatrix& operator-=(const DenseMatrix& b);
    DenseMatrix& operator*=(double s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
Vec operator*(const DenseMatrix& a, const Vec& x);

/// y = A^T x without forming the transpose.
Vec matvec_transposed(const DenseMatrix& a, const Vec& x);

DenseMatrix hstack(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix vstack(const DenseMatrix& a, const DenseMatrix& b);

// vector helpers
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm1(std::span<const double> v);
Vec& axpy(double alpha, const Vec& x, Vec& y);
Vec scaled(const Vec& v, double s);
Vec vsub(const Vec& a, const Vec& b);
Vec basis_vector(std::size_t n, std::size_t i);

// elementwise norms that need no factorization
double norm_one(const DenseMatrix& a);       // max column abs sum
double norm_inf(const DenseMatrix& a);       // max row abs sum
double norm_frobenius(const DenseMatrix& a);
double norm_max(const DenseMatrix& a);

/// Reflection matrix J = (e_n | ... | e_1) applied to a vector: reverses it.
Vec reversed(Vec v);

}  // namespace rmx
