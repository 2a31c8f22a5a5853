#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rmx/linalg.hpp"
#include "rmx/lowrank.hpp"
#include "rmx/rng.hpp"

using namespace rmx;

TEST_CASE("full-width sampling captures the whole row space") {
    std::size_t n = 6;
    DenseMatrix a = gaussian_matrix(n, n, 0.0, 1.0, Seed{1});
    DenseMatrix t = sample_cover(a, n, SampleSide::right, SampleFamily::gaussian, Seed{2});
    // range(T) = range(A^T): projector difference vanishes
    CHECK(subspace_distance(t, a.transposed()) < 1e-10);
}

TEST_CASE("sampling a planted numerical-rank-3 matrix reveals rank 3 (statistical)") {
    Vec sig{1.0, 0.5, 0.2, 1e-10, 1e-10, 1e-10, 1e-10, 1e-10};
    int good = 0, total = 20;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{10}.derived(t);
        DenseMatrix a = planted_svd(sig, s);
        DenseMatrix sk = sample_cover(a, 3, SampleSide::right, SampleFamily::gaussian, s.child(1));
        if (numerical_rank(sk, 1e-6) == 3) ++good;
    }
    CHECK(good >= 19);
}

TEST_CASE("zero matrix gives a zero sketch") {
    DenseMatrix sk = sample_cover(DenseMatrix(5, 5), 2, SampleSide::left, SampleFamily::gaussian,
                                  Seed{3});
    CHECK(norm_frobenius(sk) == 0.0);
}

TEST_CASE("rank reveal on an exactly rank-2 sketch") {
    DenseMatrix b = gaussian_matrix(8, 2, 0.0, 1.0, Seed{4});
    DenseMatrix c = gaussian_matrix(5, 2, 0.0, 1.0, Seed{5});
    DenseMatrix t = b * c.transposed();
    RankReveal rr = rank_reveal_truncate(t, 1e-12);
    CHECK(rr.s == 2);
    CHECK(norm_frobenius(rr.T.transposed() * rr.T - DenseMatrix::identity(2)) < 1e-12);
}

TEST_CASE("rank reveal with tau above the norm keeps nothing") {
    DenseMatrix t = gaussian_matrix(6, 3, 0.0, 1.0, Seed{6});
    RankReveal rr = rank_reveal_truncate(t, 2.0 * norm(t, NormKind::two));
    CHECK(rr.s == 0);
}

TEST_CASE("rank reveal on the planted profile at tau = 1e-8 ||A||") {
    Vec sig{1.0, 0.5, 0.2, 1e-10, 1e-10, 1e-10};
    DenseMatrix a = planted_svd(sig, Seed{7});
    DenseMatrix sk = sample_cover(a, 5, SampleSide::right, SampleFamily::gaussian, Seed{8});
    RankReveal rr = rank_reveal_truncate(sk, 1e-8 * norm(a, NormKind::two));
    CHECK(rr.s == 3);
}

TEST_CASE("low rank approx of an exactly rank-2 matrix") {
    DenseMatrix b = gaussian_matrix(10, 2, 0.0, 1.0, Seed{9});
    DenseMatrix c = gaussian_matrix(7, 2, 0.0, 1.0, Seed{10});
    DenseMatrix a = b * c.transposed();
    LowRankResult r = low_rank_approx(a, 2, 1e-12, 1e-10, Seed{11});
    CHECK(r.success);
    CHECK(r.rho == 2);
    CHECK(norm(r.A_rho - a, NormKind::two) <= 1e-10 * norm(a, NormKind::two));
}

TEST_CASE("low rank approx on the head family (statistical)") {
    std::size_t n = 64, q = 8;
    int good = 0, total = 20;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{20}.derived(t);
        DenseMatrix a = planted_svd(sigma_profile_head(n, q), s);
        LowRankResult r = low_rank_approx(a, q, 1e-8, 1e-6, s.child(1));
        if (r.success && r.rel_error <= 1e-6) ++good;
    }
    CHECK(good >= 19);
}

TEST_CASE("orthogonal-basis formula: the (T^T T)^{-1} path equals the T T^T path") {
    std::size_t n = 12, q = 3;
    DenseMatrix a = planted_svd(sigma_profile_head(n, q), Seed{30});
    LowRankResult r = low_rank_approx(a, q, 1e-8, 1e-4, Seed{31});
    REQUIRE(r.success);
    // exercise the general formula with a deliberately mixed basis T R
    DenseMatrix mix = gaussian_matrix(r.T.cols(), r.T.cols(), 0.0, 1.0, Seed{32});
    DenseMatrix tr = r.T * mix;
    DenseMatrix gram = tr.transposed() * tr;
    DenseMatrix proj = tr * inverse(gram) * tr.transposed();
    DenseMatrix a1 = a * proj;
    DenseMatrix a2 = a * r.T * r.T.transposed();
    CHECK(norm_frobenius(a1 - a2) <= 1e-12 * norm_frobenius(a2) + 1e-12);
}

TEST_CASE("FAILURE is a value with diagnostics") {
    Vec sig{1.0, 0.8, 0.6, 0.4, 1e-10, 1e-10};
    DenseMatrix a = planted_svd(sig, Seed{33});
    // rho_plus below the numerical rank cannot reach tau_prime
    LowRankResult r = low_rank_approx(a, 2, 1e-8, 1e-6, Seed{34});
    CHECK_FALSE(r.success);
    CHECK_FALSE(r.diagnostics.empty());
}

TEST_CASE("power transform: h = 0 and the sigma-power laws") {
    DenseMatrix a = DenseMatrix::diag({2.0, 1.0});
    CHECK(norm_frobenius(power_transform(a, 0) - a) == 0.0);
    DenseMatrix b = power_transform(a, 1);
    CHECK(norm_frobenius(b - DenseMatrix::diag({8.0, 1.0})) < 1e-12);
    // seeded 6x4, h = 2: sigma^5 law
    DenseMatrix c = gaussian_matrix(6, 4, 0.0, 1.0, Seed{35});
    SvdFactors fc = svd(c);
    SvdFactors f5 = svd(power_transform(c, 2));
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(f5.sigma[j] == doctest::Approx(std::pow(fc.sigma[j], 5.0)).epsilon(1e-8));
}

TEST_CASE("randomized residual check accepts A itself and rejects the zero approximation") {
    DenseMatrix a = gaussian_matrix(16, 16, 0.0, 1.0, Seed{36});
    CHECK(randomized_residual_check(a, a, 1e-6, 2, Seed{37}));
    int rejected = 0, total = 20;
    for (int t = 0; t < total; ++t)
        if (!randomized_residual_check(a, DenseMatrix(16, 16), 1e-6, 2, Seed{38}.derived(t)))
            ++rejected;
    CHECK(rejected == total);
}

TEST_CASE("accepted instances also pass the dense residual bound (statistical)") {
    std::size_t n = 32, q = 4;
    int consistent = 0, total = 20;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{40}.derived(t);
        DenseMatrix a = planted_svd(sigma_profile_head(n, q), s);
        LowRankResult r = low_rank_approx(a, q + 2, 1e-8, 1e-5, s.child(1));
        if (!r.success) continue;
        double tau = 1e-5;
        bool accepted = randomized_residual_check(a, r.A_rho, tau, 2, s.child(2));
        bool dense_ok = norm(a - r.A_rho, NormKind::two) <= 10.0 * tau * norm(a, NormKind::two);
        if (!accepted || dense_ok) ++consistent;
    }
    CHECK(consistent >= 19);
}

TEST_CASE("projection optimality on a planted basis") {
    std::size_t n = 16, q = 4;
    PlantedFamily fam = planted_with_bases(sigma_profile_head(n, q), q, Seed{50});
    DenseMatrix t = fam.T_lead;
    DenseMatrix proj = fam.A * t * t.transposed();
    double err = norm(fam.A - proj, NormKind::two);
    CHECK(err == doctest::Approx(1e-10).epsilon(1e-8));  // sigma_{q+1}
}

TEST_CASE("error is non-increasing in rho_plus (median over seeds)") {
    std::size_t n = 32, q = 6;
    std::vector<double> med_small, med_big;
    for (int t = 0; t < 10; ++t) {
        Seed s = Seed{60}.derived(t);
        DenseMatrix a = planted_svd(sigma_profile_head(n, q), s);
        med_small.push_back(low_rank_approx(a, q, 1e-9, 1.0, s.child(1)).rel_error);
        med_big.push_back(low_rank_approx(a, q + 4, 1e-9, 1.0, s.child(1)).rel_error);
    }
    std::sort(med_small.begin(), med_small.end());
    std::sort(med_big.begin(), med_big.end());
    CHECK(med_big[5] <= med_small[5] * (1.0 + 1e-6));
}

TEST_CASE("oversampling by 4 eliminates failures on the head family") {
    std::size_t n = 64, q = 8;
    int fails = 0;
    for (int t = 0; t < 25; ++t) {
        Seed s = Seed{70}.derived(t);
        DenseMatrix a = planted_svd(sigma_profile_head(n, q), s);
        LowRankResult r = low_rank_approx(a, q + 4, 1e-8, 1e-6, s.child(1));
        if (!r.success) ++fails;
    }
    CHECK(fails == 0);
}

TEST_CASE("gaussian-toeplitz sampling works as the random family") {
    std::size_t n = 32, q = 4;
    DenseMatrix a = planted_svd(sigma_profile_head(n, q), Seed{80});
    DenseMatrix sk = sample_cover(a, q, SampleSide::right, SampleFamily::gaussian_toeplitz,
                                  Seed{81});
    CHECK(numerical_rank(sk, 1e-6) == q);
}
