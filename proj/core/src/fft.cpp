#include "rmx/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rmx {

namespace {

void transform(CVec& v, bool inverse) {
    std::size_t n = v.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: length must be a power of 2");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * std::numbers::pi / double(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = v[i + k];
                std::complex<double> t = v[i + k + len / 2] * w;
                v[i + k] = u + t;
                v[i + k + len / 2] = u - t;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& x : v) x /= double(n);
    }
}

}  // namespace

void fft(CVec& v) { transform(v, false); }
void ifft(CVec& v) { transform(v, true); }

CVec fft(const Vec& v) {
    CVec c(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) c[i] = v[i];
    fft(c);
    return c;
}

Vec ifft_real(CVec v) {
    ifft(v);
    Vec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].real();
    return r;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

CVec circulant_eigenvalues(const Vec& c) {
    std::size_t n = c.size();
    if ((n & (n - 1)) == 0) return fft(c);
    // direct DFT for non power-of-2 sizes; only used at call sites that accept O(n^2)
    CVec e(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double ang = -2.0 * std::numbers::pi * double(j * k % n) / double(n);
            s += c[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        e[k] = s;
    }
    return e;
}

namespace {

// cyclic convolution of two complex length-n sequences, padding internally
CVec cyclic_convolve(const CVec& c, const CVec& x) {
    std::size_t n = c.size();
    if ((n & (n - 1)) == 0) {
        CVec fc(c), fx(x);
        fft(fc);
        fft(fx);
        for (std::size_t i = 0; i < n; ++i) fc[i] *= fx[i];
        ifft(fc);
        return fc;
    }
    std::size_t np = next_pow2(2 * n - 1);
    CVec cp(np, 0.0), xp(np, 0.0);
    for (std::size_t i = 0; i < n; ++i) cp[i] = c[i], xp[i] = x[i];
    fft(cp);
    fft(xp);
    for (std::size_t i = 0; i < np; ++i) cp[i] *= xp[i];
    ifft(cp);
    CVec y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) y[i] = cp[i];
    for (std::size_t i = n; i < 2 * n - 1; ++i) y[i - n] += cp[i];
    return y;
}

}  // namespace

Vec circulant_matvec(const Vec& c, const Vec& x) {
    if (c.size() != x.size()) throw std::invalid_argument("circulant_matvec: length mismatch");
    std::size_t n = c.size();
    CVec cc(n), cx(n);
    for (std::size_t i = 0; i < n; ++i) cc[i] = c[i], cx[i] = x[i];
    CVec y = cyclic_convolve(cc, cx);
    Vec r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = y[i].real();
    return r;
}

Vec f_circulant_matvec(const Vec& c, double f, const Vec& x) {
    if (f == 0.0) throw std::invalid_argument("f_circulant_matvec: f must be nonzero");
    std::size_t n = c.size();
    if (f == 1.0) return circulant_matvec(c, x);
    // Z_f(v) = D_g^{-1} Z_1(D_g v) D_g for g^n = f, D_g = diag(g^i)
    double r = std::pow(std::fabs(f), 1.0 / double(n));
    double theta = (f < 0.0) ? std::numbers::pi / double(n) : 0.0;
    CVec cs(n), xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> g = std::polar(std::pow(r, double(i)), theta * double(i));
        cs[i] = g * c[i];
        xs[i] = g * x[i];
    }
    CVec prod = cyclic_convolve(cs, xs);
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> ginv = std::polar(std::pow(r, -double(i)), -theta * double(i));
        y[i] = (prod[i] * ginv).real();
    }
    return y;
}

Vec toeplitz_matvec(const Vec& diags, std::size_t m, std::size_t n, const Vec& x) {
    if (diags.size() != m + n - 1) throw std::invalid_argument("toeplitz_matvec: bad diagonal vector");
    if (x.size() != n) throw std::invalid_argument("toeplitz_matvec: bad x");
    // T(i,j) = diags[n-1 + i - j]; embed into circulant of padded size
    std::size_t nc = next_pow2(m + n - 1);
    Vec c(nc, 0.0), xp(nc, 0.0);
    for (std::size_t i = 0; i < m; ++i) c[i] = diags[n - 1 + i];
    for (std::size_t j = 1; j < n; ++j) c[nc - j] = diags[n - 1 - j];
    for (std::size_t j = 0; j < n; ++j) xp[j] = x[j];
    Vec full = circulant_matvec(c, xp);
    Vec y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = full[i];
    return y;
}

Vec toeplitz_matvec_transposed(const Vec& diags, std::size_t m, std::size_t n, const Vec& x) {
    // T^T is the n x m Toeplitz with reversed diagonal vector
    return toeplitz_matvec(reversed(diags), n, m, x);
}

Vec lower_toeplitz_matvec(const Vec& t, const Vec& x) {
    std::size_t n = t.size();
    Vec diags(2 * n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) diags[n - 1 + i] = t[i];
    return toeplitz_matvec(diags, n, n, x);
}

Vec lower_toeplitz_matvec_transposed(const Vec& t, const Vec& x) {
    std::size_t n = t.size();
    Vec diags(2 * n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) diags[n - 1 - i] = t[i];
    return toeplitz_matvec(diags, n, n, x);
}

// --- double-double kernels --------------------------------------------------

namespace {

// pi and pi/2 as double-double constants
constexpr ExtScalar kPi{3.141592653589793116, 1.2246467991473531772e-16};
constexpr ExtScalar kHalfPi{1.570796326794896558, 6.123233995736765886e-17};

ExtScalar taylor_sin(ExtScalar x) {
    ExtScalar x2 = xmul(x, x);
    ExtScalar term = x, sum = x;
    for (int k = 1; k <= 16; ++k) {
        term = xmul(term, x2);
        term = xdiv(term, ExtScalar(double(2 * k) * double(2 * k + 1)));
        term = xneg(term);
        sum = xadd(sum, term);
    }
    return sum;
}

ExtScalar taylor_cos(ExtScalar x) {
    ExtScalar x2 = xmul(x, x);
    ExtScalar term{1.0}, sum{1.0};
    for (int k = 1; k <= 16; ++k) {
        term = xmul(term, x2);
        term = xdiv(term, ExtScalar(double(2 * k - 1) * double(2 * k)));
        term = xneg(term);
        sum = xadd(sum, term);
    }
    return sum;
}

inline XComplex xc_mul(XComplex a, XComplex b) {
    return {xsub(xmul(a.re, b.re), xmul(a.im, b.im)),
            xadd(xmul(a.re, b.im), xmul(a.im, b.re))};
}

inline XComplex xc_add(XComplex a, XComplex b) { return {xadd(a.re, b.re), xadd(a.im, b.im)}; }
inline XComplex xc_sub(XComplex a, XComplex b) { return {xsub(a.re, b.re), xsub(a.im, b.im)}; }

void xtransform(XCVec& v, bool inverse) {
    std::size_t n = v.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("xfft: length must be a power of 2");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        // angle = +-2*pi/len; len is a power of two so 1/len is exact
        ExtScalar ang = xmul(kPi, ExtScalar(2.0 / double(len)));
        if (!inverse) ang = xneg(ang);
        ExtScalar s, c;
        xsincos(ang, s, c);
        XComplex wlen{c, s};
        for (std::size_t i = 0; i < n; i += len) {
            XComplex w{ExtScalar(1.0), ExtScalar(0.0)};
            for (std::size_t k = 0; k < len / 2; ++k) {
                XComplex u = v[i + k];
                XComplex t = xc_mul(v[i + k + len / 2], w);
                v[i + k] = xc_add(u, t);
                v[i + k + len / 2] = xc_sub(u, t);
                w = xc_mul(w, wlen);
            }
        }
    }
    if (inverse) {
        ExtScalar scale{1.0 / double(n)};  // exact for powers of two
        for (auto& x : v) {
            x.re = xmul(x.re, scale);
            x.im = xmul(x.im, scale);
        }
    }
}

}  // namespace

void xsincos(ExtScalar x, ExtScalar& s, ExtScalar& c) {
    // reduce x = m * (pi/2) + r with |r| <= pi/4
    double m = std::round(x.value() / kHalfPi.value());
    ExtScalar r = xsub(x, xmul(kHalfPi, ExtScalar(m)));
    ExtScalar sr = taylor_sin(r), cr = taylor_cos(r);
    long q = long(m) & 3;
    if (q < 0) q += 4;
    switch (q) {
        case 0: s = sr; c = cr; break;
        case 1: s = cr; c = xneg(sr); break;
        case 2: s = xneg(sr); c = xneg(cr); break;
        default: s = xneg(cr); c = sr; break;
    }
}

void xfft(XCVec& v) { xtransform(v, false); }
void xifft(XCVec& v) { xtransform(v, true); }

Vec toeplitz_residual_ext(const Vec& diags, std::size_t m, std::size_t n, const ExtVec& y,
                          const Vec& b) {
    if (diags.size() != m + n - 1 || y.size() != n || b.size() != m)
        throw std::invalid_argument("toeplitz_residual_ext: shape mismatch");
    std::size_t nc = next_pow2(m + n - 1);
    XCVec c(nc, XComplex{ExtScalar(0.0), ExtScalar(0.0)});
    XCVec x(nc, XComplex{ExtScalar(0.0), ExtScalar(0.0)});
    for (std::size_t i = 0; i < m; ++i) c[i].re = ExtScalar(diags[n - 1 + i]);
    for (std::size_t j = 1; j < n; ++j) c[nc - j].re = ExtScalar(diags[n - 1 - j]);
    for (std::size_t j = 0; j < n; ++j) x[j].re = y.at(j);
    xfft(c);
    xfft(x);
    for (std::size_t i = 0; i < nc; ++i) c[i] = xc_mul(c[i], x[i]);
    xifft(c);
    Vec r(m);
    for (std::size_t i = 0; i < m; ++i) r[i] = xsub(ExtScalar(b[i]), c[i].re).value();
    return r;
}

}  // namespace rmx
