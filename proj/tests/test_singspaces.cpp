#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rmx/experiments.hpp"
#include "rmx/linalg.hpp"
#include "rmx/rng.hpp"
#include "rmx/singspaces.hpp"

using namespace rmx;

TEST_CASE("nmb of a nonsingular matrix is empty") {
    DenseMatrix a = gaussian_matrix(6, 6, 0.0, 1.0, Seed{1});
    for (std::size_t i = 0; i < 6; ++i) a(i, i) += 4.0;
    DenseMatrix b = nmb(a);
    CHECK(b.cols() == 0);
}

TEST_CASE("nmb of the all-ones 2x2 spans (1, -1)") {
    DenseMatrix a(2, 2, 1.0);
    DenseMatrix b = nmb(a);
    REQUIRE(b.cols() == 1);
    CHECK(std::fabs(b(0, 0) + b(1, 0)) < 1e-10);
    CHECK(std::fabs(b(0, 0)) > 0.1);
}

TEST_CASE("nmb of a seeded rank-5 8x8 has 3 columns with tiny A B") {
    Vec sig(8, 0.0);
    for (int j = 0; j < 5; ++j) sig[j] = 1.0 / double(j + 1);
    DenseMatrix a = planted_svd(sig, Seed{2});
    DenseMatrix b = nmb(a, 1e-10, Seed{3});
    REQUIRE(b.cols() == 3);
    CHECK(norm(a * b, NormKind::two) <= 1e-10 * norm(a, NormKind::two) * norm(b, NormKind::two) * 10);
}

TEST_CASE("nmb handles wide inputs through zero padding") {
    // 2x5 full-rank: null space has dimension 3
    DenseMatrix a = gaussian_matrix(2, 5, 0.0, 1.0, Seed{4});
    DenseMatrix b = nmb(a, 1e-10, Seed{5});
    REQUIRE(b.cols() == 3);
    DenseMatrix ab(2, 3);
    for (std::size_t j = 0; j < 3; ++j) {
        Vec col = a * b.column(j);
        ab.set_column(j, col);
    }
    CHECK(norm_frobenius(ab) < 1e-9);
}

TEST_CASE("subspace containment: R(B) contains svd null vectors") {
    Vec sig(10, 0.0);
    for (int j = 0; j < 6; ++j) sig[j] = 1.0;
    DenseMatrix a = planted_svd(sig, Seed{6});
    DenseMatrix b = nmb(a, 1e-10, Seed{7});
    REQUIRE(b.cols() == 4);
    DenseMatrix q = orthonormalize(b);
    SvdFactors f = svd(a);
    for (std::size_t j = 6; j < 10; ++j) {
        Vec v = f.T.column(j);
        Vec pv = q * matvec_transposed(q, v);
        CHECK(norm2(vsub(pv, v)) < 1e-8);
    }
}

TEST_CASE("trailing basis via additive preprocessing on an exact-rank instance (statistical)") {
    std::size_t n = 16, r = 3;
    int good = 0, total = 20;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{10}.derived(t);
        Vec sig(n, 0.0);
        for (std::size_t j = 0; j + r < n; ++j) sig[j] = 1.0 / double(j + 1);
        DenseMatrix a = planted_svd(sig, s);
        TrailingBasisResult res = trailing_basis_additive(a, r, 1e-10, s.child(1));
        if (!res.success) continue;
        if (norm(a * res.B, NormKind::two) <=
            1e-9 * norm(a, NormKind::two) * std::max(norm(res.B, NormKind::two), 1e-300))
            ++good;
    }
    CHECK(good >= 19);
}

TEST_CASE("trailing basis aligns with the planted space on the head family") {
    std::size_t n = 64, r = 8;
    int good = 0, total = 15;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{20}.derived(t);
        PlantedFamily fam = planted_with_bases(sigma_profile_head(n, n - r), n - r, s);
        TrailingBasisResult res = trailing_basis_additive(fam.A, r, 1e-6, s.child(1));
        if (!res.success || res.r != r) continue;
        DenseMatrix y = pseudo_inverse(res.B) * fam.T_trail;
        if (norm(res.B * y - fam.T_trail, NormKind::two) <= 1e-6) ++good;
    }
    CHECK(good >= 14);
}

TEST_CASE("trailing basis recursion trims an oversized width") {
    std::size_t n = 64, r = 8;
    Seed s{30};
    DenseMatrix a = planted_svd(sigma_profile_head(n, n - r), s);
    TrailingBasisResult res = trailing_basis_additive(a, r + 3, 1e-6, s.child(1));
    REQUIRE(res.success);
    CHECK(res.r == r);
}

TEST_CASE("trailing basis via augmentation matches the additive subspace") {
    std::size_t n = 24, r = 4;
    Seed s{40};
    Vec sig(n, 0.0);
    for (std::size_t j = 0; j + r < n; ++j) sig[j] = 1.0 / double(j + 1);
    DenseMatrix a = planted_svd(sig, s);
    TrailingBasisResult r1 = trailing_basis_additive(a, r, 1e-9, s.child(1));
    TrailingBasisResult r2 = trailing_basis_augment(a, r, 1e-9, s.child(2));
    REQUIRE(r1.success);
    REQUIRE(r2.success);
    CHECK(subspace_distance(r1.B, r2.B) < 1e-6);
}

TEST_CASE("augment with an undersized width fails through an ill conditioned K (statistical)") {
    std::size_t n = 24, true_nullity = 4;
    int fails = 0, total = 20;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{50}.derived(t);
        Vec sig(n, 0.0);
        for (std::size_t j = 0; j + true_nullity < n; ++j) sig[j] = 1.0 / double(j + 1);
        DenseMatrix a = planted_svd(sig, s);
        TrailingBasisResult res = trailing_basis_augment(a, true_nullity - 2, 1e-9, s.child(1));
        if (!res.success) ++fails;
    }
    CHECK(fails >= 19);
}

TEST_CASE("leading basis via dual preprocessing on an orthogonal matrix") {
    std::size_t n = 10;
    DenseMatrix a = random_orthogonal(n, Seed{60});
    DenseMatrix b = leading_basis_dual(a, n, Seed{61});
    // T_{n,A} is all of R^n: any full-rank basis qualifies
    CHECK(numerical_rank(b, 1e-8) == n);
}

TEST_CASE("leading basis (dual) aligns on the head family (statistical)") {
    std::size_t n = 64, q = 8;
    int good = 0, total = 15;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{70}.derived(t);
        PlantedFamily fam = planted_with_bases(sigma_profile_head(n, q), q, s);
        DenseMatrix b = leading_basis_dual(fam.A, q, s.child(1));
        DenseMatrix y = pseudo_inverse(b) * fam.T_lead;
        if (norm(b * y - fam.T_lead, NormKind::two) <= 1e-6) ++good;
    }
    CHECK(good >= 14);
}

TEST_CASE("dual and sampling leading bases agree as subspaces") {
    std::size_t n = 48, q = 4;
    Seed s{80};
    DenseMatrix a = planted_svd(sigma_profile_head(n, q), s);
    DenseMatrix b1 = leading_basis_dual(a, q, s.child(1));
    DenseMatrix b2 = leading_basis_sampling(a, q, SampleFamily::gaussian, s.child(2));
    CHECK(subspace_distance(b1, b2) < 1e-5);
}

TEST_CASE("dual augmentation: A = I, W = I closed form") {
    std::size_t n = 8, q = 2;
    // T_+ = U - U S^{-1} V^T U with S = I + U^T V
    Seed s{90};
    DenseMatrix a = DenseMatrix::identity(n);
    DenseMatrix b = leading_basis_dual_aug(a, q, s);
    DenseMatrix u = gaussian_matrix(n, q, 0.0, 1.0, s.child(30));
    DenseMatrix v = gaussian_matrix(n, q, 0.0, 1.0, s.child(40));
    DenseMatrix ss = DenseMatrix::identity(q) + u.transposed() * v;
    DenseMatrix expect = u - u * inverse(ss) * v.transposed() * u;
    CHECK(norm_frobenius(b - expect) <= 1e-10 * norm_frobenius(expect));
}

TEST_CASE("dual augmentation agrees with the unsimplified block-inverse formula") {
    std::size_t n = 12, q = 3;
    Seed s{100};
    DenseMatrix a = gaussian_matrix(n, n, 0.0, 1.0, s.child(99));
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 4.0;
    DenseMatrix b = leading_basis_dual_aug(a, q, s);
    // rebuild through K_+ = (W V^T; -U A^{-T}) and T_+ = (O | I) K_+^{-1} (O; U)
    DenseMatrix u = gaussian_matrix(n, q, 0.0, 1.0, s.child(30));
    DenseMatrix v = gaussian_matrix(n, q, 0.0, 1.0, s.child(40));
    DenseMatrix w = DenseMatrix::identity(q);
    DenseMatrix kp(n + q, n + q);
    kp.set_block(0, 0, w);
    kp.set_block(0, q, v.transposed());
    DenseMatrix mu = u;
    mu *= -1.0;
    kp.set_block(q, 0, mu);
    kp.set_block(q, q, inverse(a.transposed()));
    DenseMatrix rhs(n + q, q);
    rhs.set_block(q, 0, u);
    DenseMatrix sol = inverse(kp) * rhs;
    DenseMatrix tplus = sol.block(q, 0, n, q);
    CHECK(norm_frobenius(b - tplus) <= 1e-9 * (norm_frobenius(tplus) + 1.0));
}

TEST_CASE("leading basis by sampling: full width gives the row space") {
    std::size_t n = 8;
    DenseMatrix a = gaussian_matrix(n, n, 0.0, 1.0, Seed{110});
    DenseMatrix b = leading_basis_sampling(a, n, SampleFamily::gaussian, Seed{111});
    CHECK(numerical_rank(b, 1e-10) == n);
}

TEST_CASE("sampling bases align on the head family for both families (statistical)") {
    std::size_t n = 64, q = 8;
    for (SampleFamily fam_kind : {SampleFamily::gaussian, SampleFamily::gaussian_toeplitz}) {
        int good = 0, total = 15;
        for (int t = 0; t < total; ++t) {
            Seed s = Seed{120}.derived(t);
            PlantedFamily fam = planted_with_bases(sigma_profile_head(n, q), q, s);
            DenseMatrix b = leading_basis_sampling(fam.A, q, fam_kind, s.child(1));
            DenseMatrix y = pseudo_inverse(b) * fam.T_lead;
            if (norm(b * y - fam.T_lead, NormKind::two) <= 1e-5) ++good;
        }
        CHECK(good >= 14);
    }
}

TEST_CASE("cond probe: sigma_+ lands in [1, 1.2] sigma_1 with a clear gap") {
    for (int t = 0; t < 10; ++t) {
        Seed s = Seed{130}.derived(t);
        Vec sig{3.0, 2.0, 1.0, 0.5};
        DenseMatrix b = planted_svd(sig, s);
        CondProbe p = cond_probe(b);
        CHECK(p.sigma_plus >= 3.0 * (1.0 - 1e-6));
        CHECK(p.sigma_plus <= 3.0 * 1.2);
        CHECK(p.well_conditioned);
    }
}

TEST_CASE("numerical rank searches on a planted rank-3 16x16 (statistical)") {
    Vec sig(16, 1e-12);
    sig[0] = 1.0;
    sig[1] = 0.5;
    sig[2] = 0.2;
    int ok_s = 0, ok_a = 0, ok_g = 0, total = 20;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{140}.derived(t);
        DenseMatrix a = planted_svd(sig, s);
        if (numerical_rank_sampling(a, 0, 16, s.child(1)).rho == 3) ++ok_s;
        if (numerical_rank_additive(a, 0, 16, s.child(2)) == 3) ++ok_a;
        if (numerical_rank_augment(a, 0, 16, s.child(3)) == 3) ++ok_g;
    }
    CHECK(ok_s >= 19);
    CHECK(ok_a >= 19);
    CHECK(ok_g >= 19);
}

TEST_CASE("degenerate range returns immediately") {
    DenseMatrix a = gaussian_matrix(8, 8, 0.0, 1.0, Seed{150});
    RankSearchResult r = numerical_rank_sampling(a, 5, 5, Seed{151});
    CHECK(r.rho == 5);
}

TEST_CASE("well conditioned input has full numerical rank by both methods") {
    std::size_t n = 12;
    DenseMatrix a = gaussian_matrix(n, n, 0.0, 1.0, Seed{160});
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 4.0;
    CHECK(numerical_rank_additive(a, 0, n, Seed{161}) == n);
    CHECK(numerical_rank_augment(a, 0, n, Seed{162}) == n);
}

TEST_CASE("method agreement on the head family (statistical)") {
    std::size_t n = 64, q = 8;
    int agree = 0, total = 20;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{170}.derived(t);
        DenseMatrix a = planted_svd(sigma_profile_head(n, q), s);
        std::size_t r1 = numerical_rank_sampling(a, 0, n, s.child(1)).rho;
        if (r1 == q) ++agree;
    }
    CHECK(agree >= 19);
}

TEST_CASE("planted nullity 2 recovered by additive and augment searches (statistical)") {
    std::size_t n = 16;
    Vec sig(n, 1e-12);
    for (std::size_t j = 0; j + 2 < n; ++j) sig[j] = 1.0 / double(j + 1);
    int ok = 0, total = 20;
    for (int t = 0; t < total; ++t) {
        Seed s = Seed{180}.derived(t);
        DenseMatrix a = planted_svd(sig, s);
        if (numerical_rank_additive(a, 0, n, s.child(1)) == n - 2 &&
            numerical_rank_augment(a, 0, n, s.child(2)) == n - 2)
            ++ok;
    }
    CHECK(ok >= 19);
}
