#include "rmx/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rmx {

namespace {

inline std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits() {
    std::uint64_t c = counter_++;
    return mix64(seed_ + 0x9e3779b97f4a7c15ull * (c + 1));
}

double CounterRng::uniform01() { return double(bits() >> 11) * 0x1.0p-53; }

double CounterRng::uniform_pm1() { return 2.0 * uniform01() - 1.0; }

double CounterRng::gaussian() {
    // Box-Muller, cosine branch, two dedicated counter slots per draw
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t m) { return bits() % m; }

DenseMatrix gaussian_matrix(std::size_t m, std::size_t n, double mu, double sigma, Seed seed) {
    CounterRng rng(seed);
    DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.gaussian(mu, sigma);
    return a;
}

DenseMatrix uniform_matrix(std::size_t m, std::size_t n, Seed seed) {
    CounterRng rng(seed);
    DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.uniform_pm1();
    return a;
}

Vec gaussian_vector(std::size_t n, double mu, double sigma, Seed seed) {
    CounterRng rng(seed);
    Vec v(n);
    for (double& x : v) x = rng.gaussian(mu, sigma);
    return v;
}

Vec uniform_vector(std::size_t n, Seed seed) {
    CounterRng rng(seed);
    Vec v(n);
    for (double& x : v) x = rng.uniform_pm1();
    return v;
}

StructuredMatrix gaussian_toeplitz(std::size_t m, std::size_t n, double mu, double sigma, Seed seed) {
    return StructuredMatrix::toeplitz(m, n, gaussian_vector(m + n - 1, mu, sigma, seed));
}

StructuredMatrix gaussian_circulant(std::size_t n, double f, double mu, double sigma, Seed seed) {
    return StructuredMatrix::f_circulant(n, f, gaussian_vector(n, mu, sigma, seed));
}

StructuredMatrix uniform_toeplitz(std::size_t m, std::size_t n, Seed seed) {
    return StructuredMatrix::toeplitz(m, n, uniform_vector(m + n - 1, seed));
}

StructuredMatrix uniform_circulant(std::size_t n, Seed seed) {
    return StructuredMatrix::f_circulant(n, 1.0, uniform_vector(n, seed));
}

StructuredMatrix sign_circulant(std::size_t n, Seed seed) {
    CounterRng rng(seed);
    Vec c(n);
    for (double& x : c) x = rng.sign();
    return StructuredMatrix::f_circulant(n, 1.0, std::move(c));
}

DenseMatrix householder_pm1(std::size_t n, Seed seed) {
    CounterRng rng(seed);
    Vec u(n), v(n);
    double uv = 0.0;
    do {
        for (double& x : u) x = rng.sign();
        for (double& x : v) x = rng.sign();
        uv = dot(u, v);
    } while (std::fabs(uv) < 1.0);
    DenseMatrix h = DenseMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) -= u[i] * v[j] / uv;
    return h;
}

DenseMatrix block_sign(std::size_t n, std::size_t r, Seed seed) {
    if (r > n) throw std::invalid_argument("block_sign: r > n");
    CounterRng rng(seed);
    DenseMatrix u(n, r);
    std::size_t row = 0;
    std::size_t sign_blocks = 0;
    bool sign_block = true;
    while (row < n) {
        std::size_t len = std::min(r, n - row);
        if (sign_block && len == r) {
            double s = rng.sign();
            for (std::size_t i = 0; i < r; ++i) u(row + i, i) = s;
            ++sign_blocks;
        }
        // a short remainder block stays zero (the O_{r,s} tail)
        row += len;
        sign_block = !sign_block;
    }
    if (sign_blocks == 0) {
        for (std::size_t i = 0; i < std::min(r, n); ++i) u(i, i) = 1.0;
        sign_blocks = 1;
    }
    double nrm = std::sqrt(double(sign_blocks));  // stacked identities: ||U|| = sqrt(#blocks)
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < r; ++j) u(i, j) /= nrm;
    return u;
}

DenseMatrix random_orthogonal(std::size_t n, Seed seed) {
    return qr_q(gaussian_matrix(n, n, 0.0, 1.0, seed));
}

DenseMatrix planted_svd(const Vec& sigma, Seed seed, bool symmetric) {
    std::size_t n = sigma.size();
    DenseMatrix s = random_orthogonal(n, seed.child(1));
    DenseMatrix t = symmetric ? s : random_orthogonal(n, seed.child(2));
    return s * DenseMatrix::diag(sigma) * t.transposed();
}

Vec sigma_profile_class1(std::size_t n, std::size_t r, Seed seed) {
    if (n <= r + 1) throw std::invalid_argument("sigma_profile_class1: need n > r+1");
    CounterRng rng(seed.child(3));
    Vec sig(n);
    sig[0] = 1.0;
    std::size_t last_random = n - r - 1;  // 0-indexed slot of sigma_{n-r} = 0.1
    for (std::size_t j = 1; j < last_random; ++j) sig[j] = 0.1 + 0.9 * rng.uniform01();
    std::sort(sig.begin() + 1, sig.begin() + std::ptrdiff_t(last_random), std::greater<double>());
    sig[last_random] = 0.1;
    for (std::size_t j = n - r; j < n; ++j) sig[j] = 1e-16;
    return sig;
}

Vec sigma_profile_head(std::size_t n, std::size_t q) {
    Vec sig(n, 1e-10);
    for (std::size_t j = 0; j < std::min(q, n); ++j) sig[j] = 1.0 / double(j + 1);
    return sig;
}

Vec sigma_profile_tail17(std::size_t n, std::size_t r) {
    Vec sig(n, 1e-17);
    for (std::size_t j = 0; j + r < n; ++j) sig[j] = 1.0 / double(j + 1);
    return sig;
}

namespace {

// classes 2n..4s share the final A/||A|| + beta*I shift; for the nonsymmetric
// ones beta is found by bisection until sigma_min is in [1e-18, 1e-16]*||A||
DenseMatrix beta_shift(DenseMatrix a, bool symmetric) {
    double nrm = norm2_estimate(a);
    if (nrm > 0.0) a *= 1.0 / nrm;
    std::size_t n = a.rows();
    if (symmetric) {
        for (std::size_t i = 0; i < n; ++i) a(i, i) += 1e-16;
        return a;
    }
    auto smin_of = [&](double beta) {
        DenseMatrix b = a;
        for (std::size_t i = 0; i < n; ++i) b(i, i) += beta;
        PluFactors f = plu(b);
        if (f.singular) return 0.0;
        // inverse power iteration on B^{-1} B^{-T}
        Vec x(n, 1.0 / std::sqrt(double(n)));
        double est = 0.0;
        DenseMatrix bt = b.transposed();
        PluFactors ft = plu(bt);
        for (int it = 0; it < 40; ++it) {
            Vec y = plu_solve(ft, x);
            Vec z = plu_solve(f, y);
            double nz = norm2(z);
            if (nz == 0.0) return 0.0;
            double prev = est;
            est = 1.0 / std::sqrt(nz);
            for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / nz;
            if (it > 4 && std::fabs(est - prev) < 1e-3 * est) break;
        }
        return est;
    };
    double base = smin_of(0.0);
    if (base >= 1e-18) return a;  // already at or above the target band
    double lo = 1e-20, hi = 1e-12;
    while (smin_of(hi) < 1e-18 && hi < 1e-6) hi *= 16.0;
    double beta = hi;
    for (int it = 0; it < 60 && hi / lo > 1.2; ++it) {
        double mid = std::sqrt(lo * hi);
        double s = smin_of(mid);
        if (s < 1e-18)
            lo = mid;
        else if (s > 1e-16)
            hi = mid;
        else {
            beta = mid;
            lo = hi = mid;
            break;
        }
        beta = hi;
    }
    for (std::size_t i = 0; i < n; ++i) a(i, i) += beta;
    return a;
}

DenseMatrix orthogonal_rect(std::size_t m, std::size_t n, Seed seed) {
    // m x n with orthonormal columns (m >= n) or rows (m < n)
    if (m >= n) return qr_q(gaussian_matrix(m, n, 0.0, 1.0, seed));
    return qr_q(gaussian_matrix(n, m, 0.0, 1.0, seed)).transposed();
}

DenseMatrix class2(std::size_t n, std::size_t r, bool symmetric, Seed seed) {
    DenseMatrix w = orthogonal_rect(n, n - r, seed.child(11));
    DenseMatrix a;
    if (symmetric) {
        a = w * w.transposed();
    } else {
        DenseMatrix z = orthogonal_rect(n - r, r, seed.child(12));
        a = hstack(w, w * z);
    }
    return beta_shift(std::move(a), symmetric);
}

DenseMatrix class3(std::size_t n, std::size_t r, bool symmetric, Seed seed) {
    DenseMatrix t = gaussian_toeplitz(n, n - r, 0.0, 1.0, seed.child(21)).densify();
    DenseMatrix a;
    if (symmetric) {
        a = t * t.transposed();
    } else {
        DenseMatrix s = gaussian_toeplitz(n - r, r, 0.0, 1.0, seed.child(22)).densify();
        a = hstack(t, t * s);
    }
    return beta_shift(std::move(a), symmetric);
}

// Toeplitz with the last row forced into the row span of the others
DenseMatrix class4n_core(std::size_t n, Seed seed) {
    Vec d = gaussian_vector(2 * n - 1, 0.0, 1.0, seed.child(31));
    // rows 0..n-2 do not involve d[2n-2] (= a_{n-1}, the bottom-left corner)
    DenseMatrix top(n - 1, n);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = 0; j < n; ++j) top(i, j) = d[n - 1 + i - j];
    SvdFactors f = svd(top);
    Vec u = f.T.column(n - 1);  // null vector of the top rows
    // last row (d[2n-2], d[2n-3], ..., d[n-1]) must be orthogonal to u
    double acc = 0.0;
    for (std::size_t j = 1; j < n; ++j) acc += d[2 * n - 2 - j] * u[j];
    if (u[0] == 0.0) throw NumericalError("class4n: degenerate null vector, reseed");
    d[2 * n - 2] = -acc / u[0];
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = d[n - 1 + i - j];
    return a;
}

// symmetric Toeplitz whose corner entry is a root of det A(t) = 0
DenseMatrix class4s_core(std::size_t n, Seed seed) {
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        Vec c = gaussian_vector(n - 1, 0.0, 1.0, seed.child(41 + attempt));
        // A(t) symmetric Toeplitz, first column (c_0,...,c_{n-2}, t)
        DenseMatrix a0(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::size_t k = i > j ? i - j : j - i;
                a0(i, j) = (k < n - 1) ? c[k] : 0.0;
            }
        // det(A0 + t B) = 0 with B = e_1 e_n^T + e_n e_1^T; reduce through p = A0^{-1}e_1,
        // q = A0^{-1}e_n:  (1 + t p_n)(1 + t q_1) - t^2 p_1 q_n = 0
        Vec diags(2 * n - 1);
        for (std::size_t h = 0; h < n; ++h) {
            double v = (h < n - 1) ? c[h] : 0.0;
            diags[n - 1 + h] = v;
            diags[n - 1 - h] = v;
        }
        Vec p, q;
        try {
            p = levinson_solve(diags, basis_vector(n, 0));
            q = levinson_solve(diags, basis_vector(n, n - 1));
        } catch (const NumericalError&) {
            continue;
        }
        double a2 = p[n - 1] * q[0] - p[0] * q[n - 1];
        double a1 = p[n - 1] + q[0];
        double a0c = 1.0;
        double disc = a1 * a1 - 4.0 * a2 * a0c;
        if (disc < 0.0) continue;
        double root;
        if (std::fabs(a2) < 1e-300) {
            if (std::fabs(a1) < 1e-300) continue;
            root = -a0c / a1;
        } else {
            double r1 = (-a1 + std::sqrt(disc)) / (2.0 * a2);
            double r2 = (-a1 - std::sqrt(disc)) / (2.0 * a2);
            root = std::fabs(r1) < std::fabs(r2) ? r1 : r2;
        }
        DenseMatrix a = a0;
        a(0, n - 1) = root;
        a(n - 1, 0) = root;
        return a;
    }
    throw NumericalError("class4s: no real root after 100 retries");
}

}  // namespace

DenseMatrix test_matrix(const MatrixClassSpec& spec, Seed seed) {
    std::size_t n = spec.n ? spec.n : spec.m;
    std::size_t m = spec.m ? spec.m : n;
    switch (spec.cls) {
        case MatrixClass::gauss:
            return gaussian_matrix(m, n, 0.0, 1.0, seed);
        case MatrixClass::gauss_toeplitz:
            return gaussian_toeplitz(m, n, 0.0, 1.0, seed).densify();
        case MatrixClass::gauss_circulant:
            return gaussian_circulant(n, spec.f, 0.0, 1.0, seed).densify();
        case MatrixClass::sign_circulant_cls:
            return sign_circulant(n, seed).densify();
        case MatrixClass::householder:
            return householder_pm1(n, seed);
        case MatrixClass::block_sign_cls:
            return block_sign(n, spec.r, seed);
        case MatrixClass::orthogonal:
            return random_orthogonal(n, seed);
        case MatrixClass::class1n:
            return planted_svd(sigma_profile_class1(n, spec.r, seed), seed, false);
        case MatrixClass::class1s:
            return planted_svd(sigma_profile_class1(n, spec.r, seed), seed, true);
        case MatrixClass::class2n:
            return class2(n, spec.r, false, seed);
        case MatrixClass::class2s:
            return class2(n, spec.r, true, seed);
        case MatrixClass::class3n:
            return class3(n, spec.r, false, seed);
        case MatrixClass::class3s:
            return class3(n, spec.r, true, seed);
        case MatrixClass::class4n:
            return beta_shift(class4n_core(n, seed), false);
        case MatrixClass::class4s:
            return beta_shift(class4s_core(n, seed), true);
        case MatrixClass::svd_planted:
            return planted_svd(spec.sigma_profile, seed, false);
    }
    throw std::invalid_argument("test_matrix: bad class");
}

}  // namespace rmx
