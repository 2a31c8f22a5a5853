#include "rmx/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "rmx/elimination.hpp"
#include "rmx/linalg.hpp"
#include "rmx/lowrank.hpp"
#include "rmx/precond.hpp"
#include "rmx/singspaces.hpp"
#include "rmx/solvers.hpp"
#include "rmx/structured.hpp"
#include "rmx/tt.hpp"
#include "rmx/xprec.hpp"

namespace rmx {

TrialStats summarize(const std::vector<double>& samples) {
    TrialStats t;
    t.trials = samples.size();
    if (samples.empty()) return t;
    double lo = samples[0], hi = samples[0], sum = 0.0;
    for (double v : samples) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    t.min = lo;
    t.max = hi;
    t.mean = sum / double(samples.size());
    double ss = 0.0;
    for (double v : samples) ss += (v - t.mean) * (v - t.mean);
    t.std_dev = samples.size() > 1 ? std::sqrt(ss / double(samples.size() - 1)) : 0.0;
    return t;
}

void ExperimentResult::add(const std::string& experiment, const std::string& family, std::size_t n,
                           std::size_t r_or_q, const std::string& metric,
                           std::vector<double> values, Seed seed) {
    TrialStats t = summarize(values);
    t.experiment = experiment;
    t.family = family;
    t.n = n;
    t.r_or_q = r_or_q;
    t.metric = metric;
    t.seed = seed.value;
    rows.push_back(t);
    samples[family + "/" + std::to_string(n) + "/" + std::to_string(r_or_q) + "/" + metric] =
        std::move(values);
}

const std::vector<double>& ExperimentResult::at(const std::string& key) const {
    auto it = samples.find(key);
    if (it == samples.end()) throw std::out_of_range("no samples under key " + key);
    return it->second;
}

void write_csv(std::ostream& os, const std::vector<TrialStats>& rows) {
    os << "experiment,family,n,r_or_q,metric,min,max,mean,std,trials,seed\n";
    os.precision(12);
    for (const auto& t : rows) {
        os << t.experiment << ',' << t.family << ',' << t.n << ',' << t.r_or_q << ',' << t.metric
           << ',' << t.min << ',' << t.max << ',' << t.mean << ',' << t.std_dev << ',' << t.trials
           << ',' << t.seed << '\n';
    }
}

double relative_residual(const DenseMatrix& a, const Vec& y, const Vec& b) {
    Vec r = xresidual(a, y, b);
    double nb = norm2(b);
    return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

DenseMatrix genp_hard_instance(std::size_t n, Seed seed) {
    std::size_t k = n / 2;
    // leading block A00 = L0 U0 with small-integer unit-triangular factors and
    // one planted 1e-16 pivot: the leading elimination stays exact integer
    // arithmetic until the pivot, so unpreprocessed GENP deterministically
    // divides by ~1e-16 and corrupts everything behind it
    CounterRng rng(seed.child(1));
    DenseMatrix l0 = DenseMatrix::identity(k), u0 = DenseMatrix::identity(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            l0(i, j) = double(std::int64_t(rng.below(5)) - 2);
            u0(j, i) = double(std::int64_t(rng.below(5)) - 2);
        }
    u0(k - 1, k - 1) = 0.0;
    DenseMatrix a00 = l0 * u0;
    // exact power-of-two rescale: the integer structure (and with it the
    // planted pivot below) must survive the normalization bit for bit
    a00 *= std::ldexp(1.0, -int(std::log2(double(k))) - 2);
    // planted near-noise pivot, exactly representable against the scaled
    // integer entry so the leading elimination reproduces it bit for bit
    a00(k - 1, k - 1) += std::ldexp(1.0, -48);
    double s = 1.0 / std::sqrt(double(n));
    DenseMatrix a(n, n);
    a.set_block(0, 0, a00);
    a.set_block(0, k, gaussian_matrix(k, n - k, 0.0, s, seed.child(3)));
    a.set_block(k, 0, gaussian_matrix(n - k, k, 0.0, s, seed.child(4)));
    a.set_block(k, k, gaussian_matrix(n - k, n - k, 0.0, s, seed.child(5)));
    return a;
}

DenseMatrix head_family(std::size_t n, std::size_t q, Seed seed) {
    return planted_svd(sigma_profile_head(n, q), seed);
}

DenseMatrix tail17_family(std::size_t n, std::size_t r, Seed seed) {
    return planted_svd(sigma_profile_tail17(n, r), seed);
}

PlantedFamily planted_with_bases(const Vec& sigma, std::size_t q, Seed seed) {
    std::size_t n = sigma.size();
    DenseMatrix s = random_orthogonal(n, seed.child(1));
    DenseMatrix t = random_orthogonal(n, seed.child(2));
    PlantedFamily out;
    out.A = s * DenseMatrix::diag(sigma) * t.transposed();
    out.T_lead = t.block(0, 0, n, q);
    out.T_trail = t.block(0, q, n, n - q);
    return out;
}

namespace {

double kappa_via_svd(const DenseMatrix& a) {
    SvdFactors f = svd(a);
    double lo = f.sigma.back();
    return lo > 0.0 ? f.sigma.front() / lo : std::numeric_limits<double>::infinity();
}

// least-squares alignment error ||B (B^+ T) - T||_2
double lsq_alignment(const DenseMatrix& b, const DenseMatrix& target) {
    DenseMatrix y = pseudo_inverse(b) * target;
    return norm(b * y - target, NormKind::two);
}

}  // namespace

ExperimentResult exp_condstats(const ExperimentParams& p) {
    ExperimentResult out;
    bool gaussian_entries = (p.dist != "uniform");
    std::vector<double> kappa, ratio2, ratiof;
    for (std::size_t t = 0; t < p.trials; ++t) {
        Seed s = p.seed.derived(t);
        if (p.family == "circulant") {
            Vec col = gaussian_entries ? gaussian_vector(p.n, 0.0, 1.0, s) : uniform_vector(p.n, s);
            CVec eig = circulant_eigenvalues(col);
            double hi = 0.0, lo = std::numeric_limits<double>::infinity();
            for (auto& e : eig) {
                double m = std::abs(e);
                hi = std::max(hi, m);
                lo = std::min(lo, m);
            }
            kappa.push_back(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
            double n1 = norm1(col);  // every column of a circulant has the same abs sum
            ratio2.push_back(n1 / hi);
            ratiof.push_back(n1 / (std::sqrt(double(p.n)) * norm2(col)));
        } else if (p.family == "toeplitz") {
            StructuredMatrix tm = gaussian_entries ? gaussian_toeplitz(p.n, p.n, 0.0, 1.0, s)
                                                   : uniform_toeplitz(p.n, p.n, s);
            DenseMatrix a = tm.densify();
            double n1 = norm_one(a);
            DenseMatrix inv = inverse(a);
            kappa.push_back(n1 * norm_one(inv));  // kappa_1, as reported for Toeplitz inputs
            ratio2.push_back(n1 / norm2_estimate(a, 200));
            ratiof.push_back(n1 / norm_frobenius(a));
        } else {
            DenseMatrix a = gaussian_entries ? gaussian_matrix(p.n, p.n, 0.0, 1.0, s)
                                             : uniform_matrix(p.n, p.n, s);
            SvdFactors f = svd(a);
            kappa.push_back(f.sigma.back() > 0.0 ? f.sigma.front() / f.sigma.back()
                                                 : std::numeric_limits<double>::infinity());
            ratio2.push_back(norm_one(a) / f.sigma.front());
            ratiof.push_back(norm_one(a) / norm_frobenius(a));
        }
    }
    std::string metric = (p.family == "toeplitz") ? "kappa1" : "kappa2";
    out.add("condstats", p.family, p.n, 0, metric, std::move(kappa), p.seed);
    out.add("condstats", p.family, p.n, 0, "norm1_over_norm2", std::move(ratio2), p.seed);
    out.add("condstats", p.family, p.n, 0, "norm1_over_normF", std::move(ratiof), p.seed);
    return out;
}

ExperimentResult exp_precondstats(const ExperimentParams& p) {
    ExperimentResult out;
    MatrixClassSpec spec;
    spec.n = spec.m = p.n;
    spec.r = p.r;
    if (p.family == "1n") spec.cls = MatrixClass::class1n;
    else if (p.family == "1s") spec.cls = MatrixClass::class1s;
    else if (p.family == "2n") spec.cls = MatrixClass::class2n;
    else if (p.family == "2s") spec.cls = MatrixClass::class2s;
    else if (p.family == "3n") spec.cls = MatrixClass::class3n;
    else if (p.family == "3s") spec.cls = MatrixClass::class3s;
    else if (p.family == "4n") spec.cls = MatrixClass::class4n;
    else if (p.family == "4s") spec.cls = MatrixClass::class4s;
    else throw std::invalid_argument("precondstats: family must be 1n..4s");
    if ((p.family == "4n" || p.family == "4s") && p.r != 1)
        throw std::invalid_argument("precondstats: type IV classes have nullity 1");
    std::vector<double> kappa_c;
    for (std::size_t t = 0; t < p.trials; ++t) {
        Seed s = p.seed.derived(t);
        DenseMatrix a = test_matrix(spec, s);
        DenseMatrix u = block_sign(p.n, p.r, s.child(91));
        AdditivePrep prep = additive_preprocess(a, u, u, false);
        kappa_c.push_back(kappa_via_svd(prep.C));
    }
    out.add("precondstats", p.family, p.n, p.r, "kappaC", std::move(kappa_c), p.seed);
    return out;
}

ExperimentResult exp_genp(const ExperimentParams& p) {
    ExperimentResult out;
    Multiplier mult = Multiplier::sign_circulant;
    if (p.family == "householder") mult = Multiplier::householder;
    if (p.family == "gaussian") mult = Multiplier::gaussian;
    if (p.family == "gaussian2") mult = Multiplier::gaussian_two_sided;
    std::vector<double> res, res_plain;
    for (std::size_t t = 0; t < p.trials; ++t) {
        Seed s = p.seed.derived(t);
        DenseMatrix a = genp_hard_instance(p.n, s);
        Vec b = uniform_vector(p.n, s.child(6));
        Vec y = randomized_genp_solve(a, b, mult, p.refine, s.child(7));
        res.push_back(relative_residual(a, y, b));
        double plain;
        try {
            Vec yp = randomized_genp_solve(a, b, Multiplier::none, 0, s);
            plain = relative_residual(a, yp, b);
            if (!std::isfinite(plain)) plain = 1e300;
        } catch (const NumericalError&) {
            plain = 1e300;  // hard pivot failure counts as a corrupted solve
        }
        res_plain.push_back(plain);
    }
    out.add("genp", p.family, p.n, std::size_t(p.refine), "residual", std::move(res), p.seed);
    out.add("genp", "plain", p.n, 0, "residual", std::move(res_plain), p.seed);
    return out;
}

ExperimentResult exp_svd_tail(const ExperimentParams& p) {
    ExperimentResult out;
    std::size_t n = p.n, r = p.r, q = n - r;
    std::vector<double> kc, rn1, rn2;
    for (std::size_t t = 0; t < p.trials; ++t) {
        Seed s = p.seed.derived(t);
        PlantedFamily fam = planted_with_bases(sigma_profile_head(n, q), q, s);
        DenseMatrix u = gaussian_matrix(n, r, 0.0, 1.0, s.child(11));
        DenseMatrix v = gaussian_matrix(n, r, 0.0, 1.0, s.child(12));
        double nu = norm2_estimate(u), nv = norm2_estimate(v);
        if (nu > 0.0) u *= 1.0 / nu;
        if (nv > 0.0) v *= 1.0 / nv;
        DenseMatrix c = xadd_outer(fam.A, u, v);
        kc.push_back(kappa_via_svd(c));
        PluFactors f = plu(c);
        DenseMatrix b(n, r);
        for (std::size_t j = 0; j < r; ++j) {
            Vec col = plu_solve(f, u.column(j));
            for (int step = 0; step < p.refine; ++step) {
                Vec rr = xresidual(c, col, u.column(j));
                Vec d = plu_solve(f, rr);
                for (std::size_t i = 0; i < n; ++i) col[i] += d[i];
            }
            b.set_column(j, col);
        }
        rn1.push_back(lsq_alignment(b, fam.T_trail));
        // rank-q approximation error off the trailing basis: ||A - A(I-QQ^T)|| = ||A Q||
        DenseMatrix qb = qr_q(b);
        rn2.push_back(norm(xmatmul(fam.A, qb), NormKind::two));
    }
    out.add("svd-tail", "planted", n, r, "kappaC", std::move(kc), p.seed);
    out.add("svd-tail", "planted", n, r, "rn1", std::move(rn1), p.seed);
    out.add("svd-tail", "planted", n, r, "rn2", std::move(rn2), p.seed);
    return out;
}

ExperimentResult exp_svd_head(const ExperimentParams& p) {
    ExperimentResult out;
    std::size_t n = p.n, q = p.r;
    std::vector<double> kc, rn1, rn2;
    for (std::size_t t = 0; t < p.trials; ++t) {
        Seed s = p.seed.derived(t);
        PlantedFamily fam = planted_with_bases(sigma_profile_head(n, q), q, s);
        // scale so ||U_ V_^T|| ~ ||A^{-1}|| = 1e10
        double col_scale = std::sqrt(1e10) / std::sqrt(double(n));
        DenseMatrix u = gaussian_matrix(n, q, 0.0, col_scale, s.child(21));
        DenseMatrix v = gaussian_matrix(n, q, 0.0, col_scale, s.child(22));
        DualPrepExt dp = dual_additive_ext(fam.A, u, v);
        kc.push_back(kappa_via_svd(dp.C_.hi));
        DenseMatrix b(n, q);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < q; ++j) {
                ExtScalar acc;
                for (std::size_t k = 0; k < n; ++k)
                    acc = xadd(acc, xmul(dp.C_.at(k, i), ExtScalar(v(k, j))));
                b(i, j) = acc.value();
            }
        rn1.push_back(lsq_alignment(b, fam.T_lead));
        DenseMatrix qb = qr_q(b);
        DenseMatrix proj = xmatmul_sub(xmatmul(fam.A, qb), qb.transposed(), fam.A);
        rn2.push_back(norm(proj, NormKind::two));
    }
    out.add("svd-head", "dual", n, q, "kappaC_", std::move(kc), p.seed);
    out.add("svd-head", "dual", n, q, "rn1", std::move(rn1), p.seed);
    out.add("svd-head", "dual", n, q, "rn2", std::move(rn2), p.seed);
    return out;
}

ExperimentResult exp_svd_head_sampling(const ExperimentParams& p) {
    ExperimentResult out;
    std::size_t n = p.n, q = p.r;
    SampleFamily fam_kind =
        (p.family == "toeplitz") ? SampleFamily::gaussian_toeplitz : SampleFamily::gaussian;
    std::vector<double> rn1, rn2;
    for (std::size_t t = 0; t < p.trials; ++t) {
        Seed s = p.seed.derived(t);
        PlantedFamily fam = planted_with_bases(sigma_profile_head(n, q), q, s);
        DenseMatrix b = leading_basis_sampling(fam.A, q, fam_kind, s.child(31));
        rn1.push_back(lsq_alignment(b, fam.T_lead));
        DenseMatrix qb = qr_q(b);
        DenseMatrix proj = xmatmul_sub(xmatmul(fam.A, qb), qb.transposed(), fam.A);
        rn2.push_back(norm(proj, NormKind::two));
    }
    out.add("svd-head-sampling", p.family, n, q, "rn1", std::move(rn1), p.seed);
    out.add("svd-head-sampling", p.family, n, q, "rn2", std::move(rn2), p.seed);
    return out;
}

namespace {

ExperimentResult blocktri_common(const ExperimentParams& p, BlockTriVariant variant,
                                 const std::string& label) {
    ExperimentResult out;
    std::size_t n = p.n;
    std::vector<double> res, res_ge, dominance;
    // orthogonal/simplified run the tail family (nullity r); dual runs the
    // head-style family with small numerical rank q = p.r
    bool dual = (variant == BlockTriVariant::dual);
    for (std::size_t t = 0; t < p.trials; ++t) {
        Seed s = p.seed.derived(t);
        std::size_t q = dual ? p.r : n - p.r;
        DenseMatrix a = planted_svd(sigma_profile_tail17(n, n - q), s);
        Vec b = uniform_vector(n, s.child(41));
        BlockTriangulation bt = block_triangulate(a, q, variant, s.child(42), p.refine);
        ExtVec y = solve_blocktri(bt, a, b);
        res.push_back(relative_residual_ext(a, y, b));
        double w00min = svd(bt.W.block(0, 0, q, q)).sigma.back();
        double off = std::max({norm(bt.W.block(0, q, q, n - q), NormKind::two),
                               norm(bt.W.block(q, 0, n - q, q), NormKind::two),
                               norm(bt.W.block(q, q, n - q, n - q), NormKind::two)});
        dominance.push_back(off > 0.0 ? w00min / off : std::numeric_limits<double>::infinity());
        // reference plain-GE baseline on the same instance
        try {
            Vec yge = lu_solve(a, b);
            double r = relative_residual(a, yge, b);
            res_ge.push_back(std::isfinite(r) ? r : 1e300);
        } catch (const NumericalError&) {
            res_ge.push_back(1e300);
        }
    }
    std::string variant_name = dual ? "dual" : (variant == BlockTriVariant::simplified ? "simplified" : "orthogonal");
    out.add(label, variant_name, n, p.r, "residual", std::move(res), p.seed);
    out.add(label, "ge-baseline", n, p.r, "residual", std::move(res_ge), p.seed);
    out.add(label, variant_name, n, p.r, "dominance", std::move(dominance), p.seed);
    return out;
}

}  // namespace

ExperimentResult exp_blocktri(const ExperimentParams& p) {
    BlockTriVariant v =
        (p.method == "simplified") ? BlockTriVariant::simplified : BlockTriVariant::orthogonal;
    return blocktri_common(p, v, "blocktri");
}

ExperimentResult exp_blocktri_dual(const ExperimentParams& p) {
    return blocktri_common(p, BlockTriVariant::dual, "blocktri-dual");
}

ExperimentResult exp_blocktri_sampling(const ExperimentParams& p) {
    ExperimentResult out;
    std::size_t n = p.n, q = p.r;
    std::vector<double> res;
    for (std::size_t t = 0; t < p.trials; ++t) {
        Seed s = p.seed.derived(t);
        DenseMatrix a = planted_svd(sigma_profile_tail17(n, n - q), s);
        Vec b = uniform_vector(n, s.child(41));
        // K0 = Q(A^T V), L0 = Q(A U); complements through orthogonal completion
        DenseMatrix v = gaussian_matrix(n, q, 0.0, 1.0, s.child(51));
        DenseMatrix u = gaussian_matrix(n, q, 0.0, 1.0, s.child(52));
        BlockTriangulation bt;
        bt.q = q;
        bt.K0 = qr_q(a.transposed() * v);
        bt.L0 = qr_q(a * u);
        bt.K1 = complete_orthonormal(bt.K0).block(0, q, n, n - q);
        bt.L1 = complete_orthonormal(bt.L0).block(0, q, n, n - q);
        bt.orthogonal = true;
        DenseMatrix k = hstack(bt.K0, bt.K1), l = hstack(bt.L0, bt.L1);
        bt.W = xmatmul_round(k.transposed(), xmatmul_keep(a, l));
        ExtVec y = solve_blocktri(bt, a, b);
        res.push_back(relative_residual_ext(a, y, b));
    }
    out.add("blocktri-sampling", p.family, n, q, "residual", std::move(res), p.seed);
    return out;
}

ExperimentResult exp_smw_solve(const ExperimentParams& p) {
    ExperimentResult out;
    std::vector<double> res;
    for (std::size_t t = 0; t < p.trials; ++t) {
        Seed s = p.seed.derived(t);
        DenseMatrix a = tail17_family(p.n, p.r, s);
        Vec b = uniform_vector(p.n, s.child(61));
        ExtVec y = solve_smw_refined(a, b, p.r, s.child(62), p.refine);
        res.push_back(relative_residual_ext(a, y, b));
    }
    out.add("smw-solve", "planted", p.n, p.r, "residual", std::move(res), p.seed);
    return out;
}

ExperimentResult exp_toeplitz_aug(const ExperimentParams& p) {
    ExperimentResult out;
    std::vector<double> res, secs;
    for (std::size_t t = 0; t < p.trials; ++t) {
        Seed s = p.seed.derived(t);
        // singular symmetric Toeplitz plus the 1e-9 diagonal shift
        MatrixClassSpec spec;
        spec.cls = MatrixClass::class4s;
        spec.n = spec.m = p.n;
        spec.r = 1;
        DenseMatrix sd;
        {
            // use the core (pre-shift) construction: corner root of det = 0
            // then T = S/||S|| + 1e-9 I through the class4s recipe pieces
            sd = test_matrix(spec, s);  // this is S/||S|| + 1e-16 I; re-shift below
        }
        // rebuild as S + 1e-9 I on the raw Toeplitz data
        StructuredMatrix st = StructuredMatrix::from_dense(sd, StructuredMatrix::Kind::toeplitz);
        Vec d = st.data();
        d[p.n - 1] += 1e-9 - 1e-16;
        StructuredMatrix tm = StructuredMatrix::toeplitz(p.n, p.n, d);
        Vec b = uniform_vector(p.n, s.child(71));
        auto t0 = std::chrono::steady_clock::now();
        ToeplitzAugReport rep = toeplitz_solve_aug(tm, b, s.child(72), p.refine);
        auto t1 = std::chrono::steady_clock::now();
        secs.push_back(std::chrono::duration<double>(t1 - t0).count());
        Vec rr = toeplitz_residual_ext(tm.data(), p.n, p.n, rep.y, b);
        res.push_back(norm2(rr) / norm2(b));
    }
    out.add("toeplitz-aug", "sym-toeplitz", p.n, 1, "residual", std::move(res), p.seed);
    out.add("toeplitz-aug", "sym-toeplitz", p.n, 1, "seconds", std::move(secs), p.seed);
    return out;
}

namespace {

// exact nonsingularity of an integer matrix via determinants modulo two primes
bool nonsingular_mod(const std::vector<std::vector<std::uint64_t>>& m, std::uint64_t p) {
    std::size_t k = m.size();
    std::vector<std::vector<std::uint64_t>> a = m;
    auto mulmod = [p](std::uint64_t x, std::uint64_t y) {
        return std::uint64_t((__uint128_t(x) * y) % p);
    };
    auto powmod = [&](std::uint64_t b, std::uint64_t e) {
        std::uint64_t r = 1;
        b %= p;
        while (e) {
            if (e & 1) r = mulmod(r, b);
            b = mulmod(b, b);
            e >>= 1;
        }
        return r;
    };
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        while (piv < k && a[piv][c] % p == 0) ++piv;
        if (piv == k) return false;
        std::swap(a[c], a[piv]);
        std::uint64_t inv = powmod(a[c][c] % p, p - 2);
        for (std::size_t i = c + 1; i < k; ++i) {
            std::uint64_t f = mulmod(a[i][c] % p, inv);
            if (f == 0) continue;
            for (std::size_t j = c; j < k; ++j) {
                std::uint64_t sub = mulmod(f, a[c][j] % p);
                a[i][j] = (a[i][j] % p + p - sub) % p;
            }
        }
    }
    return true;
}

}  // namespace

ExperimentResult exp_appendix_b(const ExperimentParams& p) {
    ExperimentResult out;
    std::size_t k = p.n;             // matrix size
    std::uint64_t grid = std::uint64_t(std::max(1.0, p.tol));  // |Delta|; reuse tol as the knob
    if (grid < 2) grid = 1000000;
    std::vector<double> nonsing;
    const std::uint64_t p1 = 0xffffffff00000001ull;  // 2^64 - 2^32 + 1, prime
    const std::uint64_t p2 = 2305843009213693951ull; // 2^61 - 1, prime
    for (std::size_t t = 0; t < p.trials; ++t) {
        CounterRng rng(p.seed.derived(t));
        std::vector<std::vector<std::uint64_t>> m(k, std::vector<std::uint64_t>(k));
        for (auto& row : m)
            for (auto& x : row) x = rng.below(grid);
        bool ok = nonsingular_mod(m, p1) || nonsingular_mod(m, p2);
        nonsing.push_back(ok ? 1.0 : 0.0);
    }
    out.add("appendixB", "uniform-grid", k, std::size_t(grid), "nonsingular", std::move(nonsing),
            p.seed);
    return out;
}

ExperimentResult exp_tt_demo(const ExperimentParams& p) {
    ExperimentResult out;
    std::vector<double> err_svd, err_rand, bound;
    for (std::size_t t = 0; t < p.trials; ++t) {
        Seed s = p.seed.derived(t);
        // planted TT tensor: random cores with ranks (r, r) on a 4^3 grid
        std::size_t nk = std::max<std::size_t>(p.n, 3);
        std::size_t r = std::max<std::size_t>(p.r, 1);
        TTDecomposition plant;
        plant.dims = {nk, nk, nk};
        plant.ranks = {r, r};
        CounterRng rng(s);
        auto rnd_core = [&](std::size_t a, std::size_t b, std::size_t c) {
            Vec v(a * b * c);
            for (double& x : v) x = rng.gaussian();
            return v;
        };
        plant.cores = {rnd_core(1, nk, r), rnd_core(r, nk, r), rnd_core(r, nk, 1)};
        DenseTensor full = tt_to_full(plant);
        TTOptions osvd;
        osvd.method = TTMethod::svd;
        osvd.ranks = {r, r};
        TTDecomposition back = tt_compress(full, osvd);
        DenseTensor rec = tt_to_full(back);
        double nf = full.frobenius();
        double e1 = 0.0;
        for (std::size_t i = 0; i < full.data.size(); ++i)
            e1 += (full.data[i] - rec.data[i]) * (full.data[i] - rec.data[i]);
        err_svd.push_back(std::sqrt(e1) / nf);
        TTOptions ornd = osvd;
        ornd.method = TTMethod::randomized;
        ornd.seed = s.child(3);
        TTDecomposition backr = tt_compress(full, ornd);
        DenseTensor recr = tt_to_full(backr);
        double e2 = 0.0;
        for (std::size_t i = 0; i < full.data.size(); ++i)
            e2 += (full.data[i] - recr.data[i]) * (full.data[i] - recr.data[i]);
        err_rand.push_back(std::sqrt(e2) / nf);
        // eq-style bound: sum of squared discarded unfolding singular values
        double budget = 0.0;
        for (std::size_t k = 1; k < 3; ++k) {
            SvdFactors f = svd(unfolding(full, k));
            for (std::size_t j = r; j < f.sigma.size(); ++j) budget += f.sigma[j] * f.sigma[j];
        }
        bound.push_back(std::sqrt(budget) / nf);
    }
    out.add("tt-demo", "planted", p.n, p.r, "err_svd", std::move(err_svd), p.seed);
    out.add("tt-demo", "planted", p.n, p.r, "err_randomized", std::move(err_rand), p.seed);
    out.add("tt-demo", "planted", p.n, p.r, "unfolding_bound", std::move(bound), p.seed);
    return out;
}

ExperimentResult run_experiment(const std::string& name, const ExperimentParams& p) {
    if (name == "condstats") return exp_condstats(p);
    if (name == "precondstats") return exp_precondstats(p);
    if (name == "genp") return exp_genp(p);
    if (name == "svd-tail") return exp_svd_tail(p);
    if (name == "svd-head") return exp_svd_head(p);
    if (name == "svd-head-sampling") return exp_svd_head_sampling(p);
    if (name == "blocktri") return exp_blocktri(p);
    if (name == "blocktri-dual") return exp_blocktri_dual(p);
    if (name == "blocktri-sampling") return exp_blocktri_sampling(p);
    if (name == "smw-solve") return exp_smw_solve(p);
    if (name == "toeplitz-aug") return exp_toeplitz_aug(p);
    if (name == "appendixB") return exp_appendix_b(p);
    if (name == "tt-demo") return exp_tt_demo(p);
    throw std::invalid_argument("unknown experiment: " + name);
}

}  // namespace rmx
