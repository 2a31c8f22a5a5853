#pragma once

#include "rmx/linalg.hpp"
#include "rmx/matrix.hpp"
#include "rmx/rng.hpp"

namespace rmx {

enum class SampleSide { left, right };
enum class SampleFamily { gaussian, gaussian_toeplitz };

/// Randomized range sketch: A^T G (right singular structure) or A H (left),
/// with a Gaussian or Gaussian-Toeplitz test matrix of width rho_plus.
DenseMatrix sample_cover(const DenseMatrix& a, std::size_t rho_plus, SampleSide side,
                         SampleFamily family, Seed seed);

/// SVD-based rank-revealing truncation of a sketch: keeps the directions
/// whose singular values exceed tau_abs and returns them as an orthonormal
/// n x s basis.
struct RankReveal {
    std::size_t s = 0;
    DenseMatrix T;
};
RankReveal rank_reveal_truncate(const DenseMatrix& t_prime, double tau_abs);

/// Rank-rho approximation by random sampling.  FAILURE is a value: the
/// caller retries with a fresh seed or looser tolerances.
struct LowRankResult {
    bool success = false;
    std::size_t rho = 0;
    DenseMatrix T;        // n x rho orthonormal basis for the right leading space
    DenseMatrix A_rho;    // the rank-rho approximation A T (T^T T)^{-1} T^T
    double rel_error = 0.0;
    std::string diagnostics;
};
LowRankResult low_rank_approx(const DenseMatrix& a, std::size_t rho_plus, double tau,
                              double tau_prime, Seed seed);

/// (A A^T)^h A; raises every singular value to the (2h+1)-th power.
DenseMatrix power_transform(const DenseMatrix& a, unsigned h);

/// Probabilistic residual acceptance with Gaussian probes K, L:
/// ||K^T (A - A_rho) L|| <= tau ||K|| ||A|| ||L||.
bool randomized_residual_check(const DenseMatrix& a, const DenseMatrix& a_rho, double tau,
                               std::size_t probe_width, Seed seed);

}  // namespace rmx
