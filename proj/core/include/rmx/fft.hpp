#pragma once

#include <complex>
#include <vector>

#include "rmx/matrix.hpp"
#include "rmx/xprec.hpp"

namespace rmx {

using CVec = std::vector<std::complex<double>>;

/// In-place iterative radix-2 transform; v.size() must be a power of two.
/// Forward uses exp(-2*pi*i/n) twiddles; ifft undoes fft exactly including
/// the 1/n factor.
void fft(CVec& v);
void ifft(CVec& v);

CVec fft(const Vec& v);
Vec ifft_real(CVec v);

std::size_t next_pow2(std::size_t n);

/// Eigenvalues of the circulant Z_1(c): the DFT of its first column.
CVec circulant_eigenvalues(const Vec& c);

/// y = Z_1(c) x, first column c, via FFT convolution.  Any length.
Vec circulant_matvec(const Vec& c, const Vec& x);

/// y = Z_f(c) x for f != 0, via diagonal scaling by an n-th root of f.
Vec f_circulant_matvec(const Vec& c, double f, const Vec& x);

/// y = T x for an m x n Toeplitz matrix given by its diagonal vector
/// t = (t_{1-n},...,t_0,...,t_{m-1}) of length m+n-1, via circulant embedding.
Vec toeplitz_matvec(const Vec& diags, std::size_t m, std::size_t n, const Vec& x);

/// y = T^T x for the same representation.
Vec toeplitz_matvec_transposed(const Vec& diags, std::size_t m, std::size_t n, const Vec& x);

/// y = Z(t) x (lower triangular Toeplitz, first column t) and y = Z(t)^T x.
Vec lower_toeplitz_matvec(const Vec& t, const Vec& x);
Vec lower_toeplitz_matvec_transposed(const Vec& t, const Vec& x);

// --- double-double transform kernels ---------------------------------------
// Needed where the refined iterate is an extended-precision vector and the
// residual must come out to ~1e-30 relative: a plain double FFT floors the
// achievable accuracy at eps * ||T|| * ||y||.

struct XComplex {
    ExtScalar re, im;
};
using XCVec = std::vector<XComplex>;

/// sin/cos of x to double-double accuracy (argument reduction + Taylor).
void xsincos(ExtScalar x, ExtScalar& s, ExtScalar& c);

void xfft(XCVec& v);
void xifft(XCVec& v);

/// r = b - T y for the extended iterate y, each entry accumulated in
/// double-double through the circulant embedding; O(n log n).
Vec toeplitz_residual_ext(const Vec& diags, std::size_t m, std::size_t n, const struct ExtVec& y,
                          const Vec& b);

}  // namespace rmx
