#include "rmx/lowrank.hpp"

#include <cmath>

namespace rmx {

DenseMatrix sample_cover(const DenseMatrix& a, std::size_t rho_plus, SampleSide side,
                         SampleFamily family, Seed seed) {
    std::size_t m = a.rows(), n = a.cols();
    if (rho_plus < 1 || rho_plus > std::min(m, n))
        throw std::invalid_argument("sample_cover: bad width");
    auto draw = [&](std::size_t rows) {
        if (family == SampleFamily::gaussian) return gaussian_matrix(rows, rho_plus, 0.0, 1.0, seed);
        return gaussian_toeplitz(rows, rho_plus, 0.0, 1.0, seed).densify();
    };
    if (side == SampleSide::right) {
        DenseMatrix g = draw(m);  // T' = A^T G
        return a.transposed() * g;
    }
    DenseMatrix h = draw(n);  // S' = A H
    return a * h;
}

RankReveal rank_reveal_truncate(const DenseMatrix& t_prime, double tau_abs) {
    SvdFactors f = svd(t_prime);
    std::size_t s = 0;
    while (s < f.sigma.size() && f.sigma[s] > tau_abs) ++s;
    DenseMatrix t(t_prime.rows(), s);
    for (std::size_t j = 0; j < s; ++j)
        for (std::size_t i = 0; i < t_prime.rows(); ++i) t(i, j) = f.S(i, j);
    return {s, std::move(t)};
}

LowRankResult low_rank_approx(const DenseMatrix& a, std::size_t rho_plus, double tau,
                              double tau_prime, Seed seed) {
    LowRankResult out;
    double na = norm(a, NormKind::two);
    if (na == 0.0) {
        out.success = true;
        out.T = DenseMatrix(a.cols(), 0);
        out.A_rho = DenseMatrix(a.rows(), a.cols());
        return out;
    }
    DenseMatrix sketch = sample_cover(a, rho_plus, SampleSide::right, SampleFamily::gaussian, seed);
    RankReveal rr = rank_reveal_truncate(sketch, tau * na);
    if (rr.s == 0) {
        out.diagnostics = "sketch vanished below tau";
        out.A_rho = DenseMatrix(a.rows(), a.cols());
        out.T = rr.T;
        out.rel_error = 1.0;
        out.success = norm(a - out.A_rho, NormKind::two) <= tau_prime * na;
        return out;
    }
    // T has orthonormal columns, so A T (T^T T)^{-1} T^T = A T T^T
    DenseMatrix at = a * rr.T;
    DenseMatrix a_rho = at * rr.T.transposed();
    double err = norm(a - a_rho, NormKind::two) / na;
    out.rho = rr.s;
    out.T = rr.T;
    out.A_rho = std::move(a_rho);
    out.rel_error = err;
    out.success = err <= tau_prime;
    if (!out.success) out.diagnostics = "residual " + std::to_string(err) + " above tau_prime";
    return out;
}

DenseMatrix power_transform(const DenseMatrix& a, unsigned h) {
    DenseMatrix b = a;
    DenseMatrix aat = a * a.transposed();
    for (unsigned i = 0; i < h; ++i) b = aat * b;
    return b;
}

bool randomized_residual_check(const DenseMatrix& a, const DenseMatrix& a_rho, double tau,
                               std::size_t probe_width, Seed seed) {
    if (probe_width < 1) throw std::invalid_argument("randomized_residual_check: width >= 1");
    DenseMatrix k = gaussian_matrix(a.rows(), probe_width, 0.0, 1.0, seed.child(1));
    DenseMatrix l = gaussian_matrix(a.cols(), probe_width, 0.0, 1.0, seed.child(2));
    DenseMatrix r = a - a_rho;
    DenseMatrix probe = k.transposed() * r * l;
    double lhs = norm(probe, NormKind::two);
    double bound = tau * norm(k, NormKind::two) * norm(a, NormKind::two) * norm(l, NormKind::two);
    return lhs <= bound;
}

}  // namespace rmx
