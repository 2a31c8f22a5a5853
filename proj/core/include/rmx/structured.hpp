#pragma once

#include <cstdint>

#include "rmx/fft.hpp"
#include "rmx/linalg.hpp"
#include "rmx/matrix.hpp"

namespace rmx {

/// Toeplitz / f-circulant / Hankel matrix held by its generating vector.
class StructuredMatrix {
public:
    enum class Kind { toeplitz, f_circulant, hankel };

    /// diags = (t_{1-n},...,t_0,...,t_{m-1}), length m+n-1
    static StructuredMatrix toeplitz(std::size_t m, std::size_t n, Vec diags);
    /// first column of Z_f(v)
    static StructuredMatrix f_circulant(std::size_t n, double f, Vec first_col);
    /// antidiags = (h_2,...,h_{m+n}) walking anti-diagonals: H(i,j) = a_{i+j}
    static StructuredMatrix hankel(std::size_t m, std::size_t n, Vec antidiags);

    Kind kind() const { return kind_; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }
    double f() const { return f_; }
    const Vec& data() const { return data_; }

    double entry(std::size_t i, std::size_t j) const;
    DenseMatrix densify() const;
    Vec apply(const Vec& x) const;
    Vec apply_transposed(const Vec& x) const;

    /// Reads the generating vector back off a dense matrix; throws if the
    /// matrix does not have the exact structure.
    static StructuredMatrix from_dense(const DenseMatrix& a, Kind kind, double f = 1.0);

private:
    Kind kind_;
    std::size_t m_, n_;
    double f_ = 1.0;
    Vec data_;
};

/// General (nonsymmetric) Levinson solve of T x = b for a square Toeplitz T
/// given by its diagonal vector.  O(n^2); requires nonsingular leading blocks.
/// Throws NumericalError on breakdown.
Vec levinson_solve(const Vec& diags, const Vec& b);

/// Implicit Toeplitz inverse: y = T^{-1} x in O(n log n) through four
/// triangular Toeplitz factors.
class GsInverse {
public:
    Vec apply(const Vec& x) const;
    std::size_t size() const { return a_.size(); }

    // factors with scale: T^{-1} = (Z(a) Z(b)^T - Z(c) Z(d)^T) / pivot
    Vec a_, b_, c_, d_;
    double pivot_ = 1.0;
};

struct GsOptions {
    double pivot_tol = 1e-13;   // relative threshold on the pivot scalar
    std::uint64_t corner_seed = 0x9e3779b97f4a7c15ull;  // corners for the (n+1) embedding
    bool use_levinson = true;   // fall back to dense PLU when false or on breakdown
};

/// Gohberg-Semencul representation of T^{-1} for a nonsingular Toeplitz T.
/// Tries the direct formula first, then the (n+1)x(n+1) embedding with
/// randomized corner entries (two attempts).
GsInverse toeplitz_inverse_gs(const StructuredMatrix& t, const GsOptions& opts = {});

/// Hankel <-> Toeplitz bridge (T = H J or J H); side records which product.
enum class BridgeSide { right, left };
struct HankelBridge {
    StructuredMatrix toeplitz;
    BridgeSide side;
};
HankelBridge hankel_bridge(const StructuredMatrix& h, BridgeSide side = BridgeSide::right);
StructuredMatrix bridge_back(const HankelBridge& b);

/// Solve H y = x through the bridge and a Toeplitz inverse.
Vec hankel_solve(const StructuredMatrix& h, const Vec& x, const GsOptions& opts = {});

}  // namespace rmx
