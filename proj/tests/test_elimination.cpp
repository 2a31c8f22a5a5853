#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rmx/elimination.hpp"
#include "rmx/experiments.hpp"
#include "rmx/linalg.hpp"
#include "rmx/rng.hpp"

using namespace rmx;

namespace {

DenseMatrix diag_dominant(std::size_t n, Seed seed) {
    DenseMatrix a = gaussian_matrix(n, n, 0.0, 1.0, seed);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += double(n);
    return a;
}

// unpack the no-pivoting factors and rebuild L U
DenseMatrix genp_reconstruct(const GenpFactors& f) {
    std::size_t n = f.lu.rows();
    DenseMatrix l = DenseMatrix::identity(n), u(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j < i)
                l(i, j) = f.lu(i, j);
            else
                u(i, j) = f.lu(i, j);
        }
    return l * u;
}

}  // namespace

TEST_CASE("genp on a diagonally dominant matrix reconstructs A") {
    DenseMatrix a = diag_dominant(12, Seed{1});
    GenpFactors f = genp(a);
    CHECK(norm_frobenius(genp_reconstruct(f) - a) <= 1e-12 * norm_frobenius(a));
}

TEST_CASE("genp fails on the exchange matrix") {
    DenseMatrix a(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = 1.0;
    CHECK_THROWS_AS((void)genp(a), NumericalError);
}

TEST_CASE("monitor bound N + N_ N^2 on a strongly well conditioned matrix") {
    std::size_t n = 10;
    DenseMatrix a = diag_dominant(n, Seed{2});
    GenpFactors f = genp(a);
    double bign = norm(a, NormKind::two);
    double bign_ = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
        bign_ = std::max(bign_, norm(inverse(a.block(0, 0, k, k)), NormKind::two));
    CHECK(f.monitor.max_pivot <= bign + bign_ * bign * bign + 1e-9);
    CHECK(f.monitor.max_pivot_recip <= bign_ * (1.0 + 1e-9));
}

TEST_CASE("block genp with block = n is a single solve") {
    std::size_t n = 8;
    DenseMatrix a = diag_dominant(n, Seed{3});
    BlockGenpResult r = block_genp(a, n);
    Vec b = uniform_vector(n, Seed{4});
    Vec y = block_genp_solve(r, b);
    Vec ref = lu_solve(a, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("block genp with block = 1 matches genp elementwise") {
    std::size_t n = 6;
    DenseMatrix a = diag_dominant(n, Seed{5});
    BlockGenpResult r = block_genp(a, 1);
    GenpFactors f = genp(a);
    Vec b = uniform_vector(n, Seed{6});
    Vec y1 = block_genp_solve(r, b);
    Vec y2 = genp_solve(f, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-11));
}

TEST_CASE("block genp succeeds on a seeded SPD matrix with bounded monitor") {
    std::size_t n = 12;
    DenseMatrix g = gaussian_matrix(n, n, 0.0, 1.0, Seed{7});
    DenseMatrix a = g.transposed() * g;
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;
    BlockGenpResult r = block_genp(a, 4);
    double bign = norm(a, NormKind::two);
    double bign_ = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
        bign_ = std::max(bign_, norm(inverse(a.block(0, 0, k, k)), NormKind::two));
    CHECK(r.monitor.max_block_norm <= (bign + bign_ * bign * bign) * 1.01);
    CHECK(r.monitor.max_block_inv_norm <= bign_ * 1.05);
}

TEST_CASE("iterative refinement leaves an exact solver's answer unchanged") {
    std::size_t n = 7;
    DenseMatrix a = diag_dominant(n, Seed{8});
    PluFactors f = plu(a);
    Vec b = uniform_vector(n, Seed{9});
    auto apply = [&](const Vec& x) { return a * x; };
    auto solve = [&](const Vec& r) { return plu_solve(f, r); };
    Vec y0 = solve(b);
    Vec y = iterative_refinement(apply, solve, b, 3);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(y0[i]).epsilon(1e-13));
}

TEST_CASE("refinement with a 0.9-scaled inverse contracts at least 5x per step") {
    std::size_t n = 8;
    DenseMatrix a = diag_dominant(n, Seed{10});
    DenseMatrix ainv = inverse(a);
    ainv *= 0.9;
    Vec b = uniform_vector(n, Seed{11});
    Vec ref = lu_solve(a, b);
    auto apply = [&](const Vec& x) { return a * x; };
    auto solve = [&](const Vec& r) { return ainv * r; };
    Vec prev = solve(b);
    double prev_err = norm2(vsub(prev, ref));
    for (int steps = 1; steps <= 3; ++steps) {
        Vec y = iterative_refinement(apply, solve, b, steps);
        double err = norm2(vsub(y, ref));
        CHECK(err <= prev_err / 5.0);
        prev_err = err;
    }
}

TEST_CASE("zero refinement steps return the approximate solve") {
    std::size_t n = 5;
    DenseMatrix a = diag_dominant(n, Seed{12});
    DenseMatrix ainv = inverse(a);
    ainv *= 0.5;
    Vec b = uniform_vector(n, Seed{13});
    auto apply = [&](const Vec& x) { return a * x; };
    auto solve = [&](const Vec& r) { return ainv * r; };
    Vec y = iterative_refinement(apply, solve, b, 0);
    Vec expect = solve(b);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == expect[i]);
}

TEST_CASE("refinement divergence detector") {
    std::size_t n = 5;
    DenseMatrix a = diag_dominant(n, Seed{14});
    DenseMatrix bad = inverse(a);
    bad *= -3.0;  // expansion, not contraction
    Vec b = uniform_vector(n, Seed{15});
    auto apply = [&](const Vec& x) { return a * x; };
    auto solve = [&](const Vec& r) { return bad * r; };
    CHECK_THROWS_AS((void)iterative_refinement(apply, solve, b, 10), NumericalError);
}

TEST_CASE("randomized genp with the identity multiplier is plain genp") {
    std::size_t n = 8;
    DenseMatrix a = diag_dominant(n, Seed{16});
    Vec b = uniform_vector(n, Seed{17});
    Vec y = randomized_genp_solve(a, b, Multiplier::none, 0, Seed{18});
    GenpFactors f = genp(a);
    Vec ref = genp_solve(f, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == ref[i]);
}

TEST_CASE("sign-circulant multiplier rescues the hard family (statistical)") {
    std::size_t n = 64;
    int ok0 = 0, ok1 = 0, plain_bad = 0, total = 20;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{500}.derived(t);
        DenseMatrix a = genp_hard_instance(n, s);
        Vec b = uniform_vector(n, s.child(6));
        Vec y0 = randomized_genp_solve(a, b, Multiplier::sign_circulant, 0, s.child(7));
        if (relative_residual(a, y0, b) <= 1e-8) ++ok0;
        Vec y1 = randomized_genp_solve(a, b, Multiplier::sign_circulant, 1, s.child(7));
        if (relative_residual(a, y1, b) <= 1e-11) ++ok1;
        try {
            Vec yp = randomized_genp_solve(a, b, Multiplier::none, 0, s);
            double r = relative_residual(a, yp, b);
            if (!std::isfinite(r) || r >= 10.0) ++plain_bad;
        } catch (const NumericalError&) {
            ++plain_bad;
        }
    }
    CHECK(ok0 >= 19);
    CHECK(ok1 >= 19);
    CHECK(plain_bad >= 18);
}

TEST_CASE("householder and two-sided gaussian multipliers also solve the family") {
    std::size_t n = 32;
    Seed s{600};
    DenseMatrix a = genp_hard_instance(n, s);
    Vec b = uniform_vector(n, s.child(6));
    for (Multiplier m : {Multiplier::householder, Multiplier::gaussian,
                         Multiplier::gaussian_two_sided}) {
        Vec y = randomized_genp_solve(a, b, m, 1, s.child(7));
        CHECK(relative_residual(a, y, b) <= 1e-9);
    }
}

TEST_CASE("generic rank profile of G M (Corollary 4.1 restated, statistical)") {
    std::size_t n = 32, rho = 16;
    int good = 0, total = 20;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{700}.derived(t);
        Vec sig(n, 0.0);
        for (std::size_t j = 0; j < rho; ++j) sig[j] = 1.0 / double(j + 1);
        DenseMatrix m = planted_svd(sig, s);
        DenseMatrix g = gaussian_matrix(n, n, 0.0, 1.0, s.child(1));
        DenseMatrix gm = g * m;
        bool all_ok = true;
        double nm = norm(m, NormKind::two);
        for (std::size_t i = 1; i <= rho; ++i) {
            SvdFactors f = svd(gm.block(0, 0, i, i));
            if (f.sigma.back() <= 1e-10 * nm) all_ok = false;
        }
        if (all_ok) ++good;
    }
    CHECK(good >= 19);
}

TEST_CASE("two-sided gaussian preprocessing keeps pivots away from zero (statistical)") {
    std::size_t n = 32;
    int good = 0, total = 20;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{800}.derived(t);
        DenseMatrix a = genp_hard_instance(n, s);
        DenseMatrix g = gaussian_matrix(n, n, 0.0, 1.0, s.child(1));
        DenseMatrix h = gaussian_matrix(n, n, 0.0, 1.0, s.child(2));
        DenseMatrix gah = g * a * h;
        double na = norm(gah, NormKind::two);
        try {
            GenpFactors f = genp(gah);
            if (1.0 / f.monitor.max_pivot_recip >= 1e-8 * na) ++good;
        } catch (const NumericalError&) {
        }
    }
    CHECK(good >= 19);
}
