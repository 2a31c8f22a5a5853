#pragma once

#include <cmath>
#include <span>

#include "rmx/matrix.hpp"

namespace rmx {

/// Double-double scalar: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2,
/// giving roughly a 106-bit significand.  Used for the staged high-precision
/// passes (residuals, Schur complements, Gram matrices) where plain doubles
/// lose all leading digits to cancellation.
struct ExtScalar {
    double hi = 0.0;
    double lo = 0.0;

    constexpr ExtScalar() = default;
    constexpr ExtScalar(double x) : hi(x), lo(0.0) {}
    constexpr ExtScalar(double h, double l) : hi(h), lo(l) {}

    double value() const { return hi + lo; }
};

namespace xp {

// error-free transformations
inline ExtScalar two_sum(double a, double b) {
    double s = a + b;
    double ap = s - b;
    double bp = s - ap;
    return {s, (a - ap) + (b - bp)};
}

inline ExtScalar fast_two_sum(double a, double b) {
    // requires |a| >= |b|
    double s = a + b;
    return {s, b - (s - a)};
}

inline ExtScalar two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

}  // namespace xp

inline ExtScalar xadd(ExtScalar a, ExtScalar b) {
    ExtScalar s = xp::two_sum(a.hi, b.hi);
    ExtScalar t = xp::two_sum(a.lo, b.lo);
    double c = s.lo + t.hi;
    ExtScalar v = xp::fast_two_sum(s.hi, c);
    double w = t.lo + v.lo;
    return xp::fast_two_sum(v.hi, w);
}

inline ExtScalar xneg(ExtScalar a) { return {-a.hi, -a.lo}; }
inline ExtScalar xsub(ExtScalar a, ExtScalar b) { return xadd(a, xneg(b)); }

inline ExtScalar xmul(ExtScalar a, ExtScalar b) {
    ExtScalar c = xp::two_prod(a.hi, b.hi);
    double t = std::fma(a.hi, b.lo, a.lo * b.hi);
    return xp::fast_two_sum(c.hi, c.lo + t);
}

inline ExtScalar xdiv(ExtScalar a, ExtScalar b) {
    double q1 = a.hi / b.hi;
    ExtScalar r = xsub(a, xmul(ExtScalar(q1), b));
    double q2 = r.hi / b.hi;
    r = xsub(r, xmul(ExtScalar(q2), b));
    double q3 = r.hi / b.hi;
    return xadd(xp::two_sum(q1, q2), ExtScalar(q3));
}

/// fused a*b + acc in double-double, rounding only inside the representation
inline ExtScalar xfma_acc(ExtScalar acc, double a, double b) {
    return xadd(acc, xp::two_prod(a, b));
}

/// Inner product accumulated in double-double, rounded once at the end.
double xdot(std::span<const double> a, std::span<const double> b);
ExtScalar xdot_full(std::span<const double> a, std::span<const double> b);

/// Matrix product with every entry accumulated in double-double.
DenseMatrix xmatmul(const DenseMatrix& a, const DenseMatrix& b);

/// C = A*B - D, entrywise double-double accumulation (one final rounding).
DenseMatrix xmatmul_sub(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& d);

/// r = b - A*x computed in double-double and rounded once per entry.
Vec xresidual(const DenseMatrix& a, const Vec& x, const Vec& b);

/// R = B - A*X, column-wise xresidual.
DenseMatrix xresidual_mat(const DenseMatrix& a, const DenseMatrix& x, const DenseMatrix& b);

/// C = A + U V^T in double-double, rounded once per entry.
DenseMatrix xadd_outer(const DenseMatrix& a, const DenseMatrix& u, const DenseMatrix& v);

/// Solution vector kept as an unevaluated sum hi + lo: the "accumulated
/// low-precision summands" output representation of the refined solvers.
/// Rounding such a vector to plain doubles costs ~eps * ||y|| of backward
/// error, which for kappa ~ 1e17 systems is the whole answer.
struct ExtVec {
    Vec hi, lo;

    ExtVec() = default;
    explicit ExtVec(std::size_t n) : hi(n, 0.0), lo(n, 0.0) {}
    explicit ExtVec(const Vec& v) : hi(v), lo(v.size(), 0.0) {}

    std::size_t size() const { return hi.size(); }
    ExtScalar at(std::size_t i) const { return {hi[i], lo[i]}; }
    void set(std::size_t i, ExtScalar v) { hi[i] = v.hi, lo[i] = v.lo; }
    void add(std::size_t i, ExtScalar v) { set(i, xadd(at(i), v)); }
    /// y += d for a plain correction vector
    void accumulate(const Vec& d);
    Vec rounded() const;
    double norm() const;
};

/// columns kept in extended precision
struct ExtMat {
    std::vector<ExtVec> cols;
    std::size_t rows() const { return cols.empty() ? 0 : cols[0].size(); }
    std::size_t width() const { return cols.size(); }
};

/// Dense matrix as an unevaluated hi + lo sum; carries matrices like
/// C = A + U V^T whose sub-eps digits the recovery formulas depend on.
struct ExtDense {
    DenseMatrix hi, lo;
    std::size_t rows() const { return hi.rows(); }
    std::size_t cols() const { return hi.cols(); }
    ExtScalar at(std::size_t i, std::size_t j) const { return {hi(i, j), lo(i, j)}; }
};

/// C = A + U V^T with each entry kept as a double-double (no final rounding).
ExtDense xadd_outer_ext(const DenseMatrix& a, const DenseMatrix& u, const DenseMatrix& v);

/// r = b - M y for the extended matrix and iterate.
Vec xresidual_ext2(const ExtDense& m, const ExtVec& y, const Vec& b);

/// A * B with the product entries retained as double-doubles.
ExtDense xmatmul_keep(const DenseMatrix& a, const DenseMatrix& b);

/// A * M for an extended right factor, rounded once per output entry; chained
/// with xmatmul_keep this computes triple products like K^T A L without the
/// intermediate rounding that would wipe out the small blocks.
DenseMatrix xmatmul_round(const DenseMatrix& a, const ExtDense& m);

/// A * M keeping extended entries, and M * B variants.
ExtDense xmatmul_keep2(const DenseMatrix& a, const ExtDense& m);
DenseMatrix xmatmul_round_right(const ExtDense& m, const DenseMatrix& b);

/// r = b - A y with the extended iterate, rounded once per entry (the
/// leading residual digits survive; the dd tail is below further use).
Vec xresidual_ext(const DenseMatrix& a, const ExtVec& y, const Vec& b);

/// y = A x for extended x, extended result.
ExtVec xmatvec_ext(const DenseMatrix& a, const ExtVec& x);

/// relative residual ||b - A y|| / ||b|| for the extended representation
double relative_residual_ext(const DenseMatrix& a, const ExtVec& y, const Vec& b);

/// Gaussian elimination with partial pivoting carried out entirely in
/// double-double; for the tiny Schur systems whose entries live near 1e-17.
ExtVec xsolve_small(const std::vector<std::vector<ExtScalar>>& g, const ExtVec& rhs);

}  // namespace rmx
