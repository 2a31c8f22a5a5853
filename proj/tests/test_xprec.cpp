#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>

#include "rmx/rng.hpp"
#include "rmx/xprec.hpp"

using namespace rmx;

TEST_CASE("cancellation: (1e16 + 1) - 1e16 survives") {
    ExtScalar a = xadd(ExtScalar(1e16), ExtScalar(1.0));
    ExtScalar b = xsub(a, ExtScalar(1e16));
    CHECK(b.value() == 1.0);
    // plain doubles lose it
    CHECK((1e16 + 1.0) - 1e16 == 0.0);
}

TEST_CASE("exact small products") {
    CHECK(xmul(ExtScalar(3.0), ExtScalar(7.0)).value() == 21.0);
    CHECK(xmul(ExtScalar(-4.0), ExtScalar(2.5)).value() == -10.0);
}

TEST_CASE("dot that standard precision gets exactly wrong") {
    Vec a{1e8, 1.0, -1e8}, b{1e8, 1.0, 1e8};
    CHECK(xdot(a, b) == 1.0);
    CHECK(dot(a, b) == 0.0);
}

TEST_CASE("xresidual of the identity is exactly zero") {
    DenseMatrix eye = DenseMatrix::identity(5);
    Vec b = uniform_vector(5, Seed{2});
    Vec r = xresidual(eye, b, b);
    for (double v : r) CHECK(v == 0.0);
}

TEST_CASE("Hilbert-4 times its exact integer inverse") {
    // the inverse of the 4x4 Hilbert matrix is integer; the only error left is
    // the representation of 1/3, 1/5, ... amplified by the inverse entries,
    // which lands around 1e-13 (the oracle value; well beyond double matmul)
    DenseMatrix h(4, 4), hinv(4, 4);
    double inv[16] = {16,   -120,  240,   -140,  -120, 1200,  -2700, 1680,
                      240,  -2700, 6480,  -4200, -140, 1680,  -4200, 2800};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            h(i, j) = 1.0 / double(i + j + 1);
            hinv(i, j) = inv[4 * i + j];
        }
    DenseMatrix prod = xmatmul(h, hinv);
    double err = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) err = std::max(err, std::fabs(prod(i, j) - (i == j ? 1.0 : 0.0)));
    CHECK(err < 1e-12);
}

TEST_CASE("integer systems: residual of a planted exact solution is exactly 0") {
    std::size_t n = 8;
    CounterRng rng(Seed{7});
    DenseMatrix a(n, n);
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = double(std::int64_t(rng.below(64)) - 32);
        for (std::size_t j = 0; j < n; ++j) a(i, j) = double(std::int64_t(rng.below(64)) - 32);
    }
    // b = A x exactly (entries bounded by 8 * 32 * 32 < 2^53)
    Vec b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b[i] += a(i, j) * x[j];
    Vec r = xresidual(a, x, b);
    for (double v : r) CHECK(v == 0.0);
}

TEST_CASE("ring properties over seeded scalars") {
    CounterRng rng(Seed{11});
    for (int t = 0; t < 200; ++t) {
        ExtScalar a(rng.gaussian() * 1e4, 0.0);
        ExtScalar b(rng.gaussian(), 0.0);
        ExtScalar c(rng.gaussian() * 1e-4, 0.0);
        // commutativity is exact
        ExtScalar ab = xadd(a, b), ba = xadd(b, a);
        CHECK(ab.hi == ba.hi);
        CHECK(ab.lo == ba.lo);
        ExtScalar m1 = xmul(a, b), m2 = xmul(b, a);
        CHECK(m1.hi == m2.hi);
        // unit
        CHECK(xmul(a, ExtScalar(1.0)).value() == a.value());
        // associativity to <= 2^-100 relative
        ExtScalar l = xadd(xadd(a, b), c), r = xadd(a, xadd(b, c));
        double mag = std::fabs(l.value()) + 1e-300;
        CHECK(std::fabs(xsub(l, r).value()) <= std::ldexp(1.0, -100) * mag * 16);
        ExtScalar lm = xmul(xmul(a, b), c), rm = xmul(a, xmul(b, c));
        double magm = std::fabs(lm.value()) + 1e-300;
        CHECK(std::fabs(xsub(lm, rm).value()) <= std::ldexp(1.0, -100) * magm * 16);
    }
}

TEST_CASE("integer xresidual exactness property") {
    // any A, x, b with integer entries bounded by 2^20, n <= 64
    CounterRng rng(Seed{13});
    std::size_t n = 64;
    DenseMatrix a(n, n);
    Vec x(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = double(std::int64_t(rng.below(1 << 20)) - (1 << 19));
        b[i] = double(std::int64_t(rng.below(1 << 20)) - (1 << 19));
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = double(std::int64_t(rng.below(1 << 8)) - (1 << 7));
    }
    // reference in __int128
    Vec r = xresidual(a, x, b);
    for (std::size_t i = 0; i < n; ++i) {
        __int128 acc = __int128(b[i]);
        for (std::size_t j = 0; j < n; ++j) acc -= __int128(a(i, j)) * __int128(x[j]);
        CHECK(r[i] == double(acc));
    }
}

TEST_CASE("ExtVec accumulate and rounding") {
    ExtVec y(3);
    y.accumulate({1e16, 1.0, -2.0});
    y.accumulate({1.0, 1e-18, 2.0});
    CHECK(y.at(0).value() == 1e16 + 1.0);
    CHECK(y.at(1).hi == 1.0);
    CHECK(y.at(1).lo == 1e-18);
    CHECK(y.at(2).value() == 0.0);
}

TEST_CASE("xsolve_small on a tiny-scale system") {
    // entries near 1e-17: the scale the SMW Schur matrices live at
    std::vector<std::vector<ExtScalar>> g{{ExtScalar(3e-17), ExtScalar(1e-17)},
                                          {ExtScalar(1e-17), ExtScalar(2e-17)}};
    ExtVec rhs(2);
    rhs.set(0, ExtScalar(5e-17));
    rhs.set(1, ExtScalar(4e-17));
    ExtVec x = xsolve_small(g, rhs);
    // exact solution of [[3,1],[1,2]] x = [5,4] is [1.2, 1.4]
    CHECK(x.at(0).value() == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(x.at(1).value() == doctest::Approx(1.4).epsilon(1e-14));
}
