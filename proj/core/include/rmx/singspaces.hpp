#pragma once

#include "rmx/linalg.hpp"
#include "rmx/lowrank.hpp"
#include "rmx/matrix.hpp"
#include "rmx/rng.hpp"

namespace rmx {

/// Null matrix basis of A through randomized additive preprocessing
/// (B = C^{-1} U with C = A + U V^T), recursing on A B while the width guess
/// exceeds the nullity.  Width grows until stabilized, capped at n.
DenseMatrix nmb(const DenseMatrix& a, double tol = 1e-10, Seed seed = {20240101});

/// Approximate basis of the trailing singular space T_{A,r}.
struct TrailingBasisResult {
    bool success = false;
    std::size_t r = 0;
    DenseMatrix B;
    std::string diagnostics;
};

TrailingBasisResult trailing_basis_additive(const DenseMatrix& a, std::size_t r_plus, double tau,
                                            Seed seed);
TrailingBasisResult trailing_basis_augment(const DenseMatrix& a, std::size_t r_plus, double tau,
                                           Seed seed);

/// Approximate basis of the leading singular space T_{q,A} through dual
/// additive preprocessing: the columns of C_-^T V_-.
DenseMatrix leading_basis_dual(const DenseMatrix& a, std::size_t q, Seed seed);

/// Same through dual augmentation, simplified to T_+ = B - B S^{-1} V^T B
/// with B = A^T U and S = W + U^T A^T V; only S is inverted.
DenseMatrix leading_basis_dual_aug(const DenseMatrix& a, std::size_t q, Seed seed);

/// Plain sampling basis A^T U for the chosen random family.
DenseMatrix leading_basis_sampling(const DenseMatrix& a, std::size_t q, SampleFamily family,
                                   Seed seed);

/// Power-iteration conditioning probe: sigma_+ (a slight over-estimate of
/// sigma_1) and sigma_min via the shifted second stage; well_conditioned
/// means the ratio stays at or below kappa_max.
struct CondProbe {
    double sigma_plus = 0.0;
    double sigma_min = 0.0;
    bool well_conditioned = false;
};
CondProbe cond_probe(const DenseMatrix& b, double kappa_max = 1e8, int budget = 200,
                     double rq_tol = 1e-4);

struct RankSearchResult {
    std::size_t rho = 0;
    DenseMatrix B;
};

/// Binary search for the numerical rank over [rho_minus, rho_plus], probing
/// B^T G_rho with the COND subroutine (no pivoting or orthogonalization).
RankSearchResult numerical_rank_sampling(const DenseMatrix& a, std::size_t rho_minus,
                                         std::size_t rho_plus, Seed seed, double kappa_max = 1e8);

/// Binary search with C = A + U_s V_s^T probes at width s = n - rho.
std::size_t numerical_rank_additive(const DenseMatrix& a, std::size_t rho_minus,
                                    std::size_t rho_plus, Seed seed, double kappa_max = 1e8);

/// Binary search with augmented K probes at width s = n - rho.
std::size_t numerical_rank_augment(const DenseMatrix& a, std::size_t rho_minus,
                                   std::size_t rho_plus, Seed seed, double kappa_max = 1e8);

}  // namespace rmx
