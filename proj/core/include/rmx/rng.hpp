#pragma once

#include <cstdint>
#include <string>

#include "rmx/matrix.hpp"
#include "rmx/structured.hpp"

namespace rmx {

/// Seed for the counter-based stream.  Identical seeds give bit-identical
/// draws regardless of how the consuming loops are ordered or threaded.
struct Seed {
    std::uint64_t value = 0;

    /// Disjoint per-trial streams: sequential and parallel runs agree.
    Seed derived(std::uint64_t trial) const { return {value + trial}; }
    Seed child(std::uint64_t tag) const { return {value ^ (0x632be59bd9b4e019ull * (tag + 1))}; }
};

/// Counter-based generator: draw i is a pure function of (seed, i).
class CounterRng {
public:
    explicit CounterRng(Seed seed) : seed_(seed.value) {}

    double uniform01();              // [0,1)
    double uniform_pm1();            // [-1,1)
    double gaussian();               // N(0,1), Box-Muller on two counter slots
    double gaussian(double mu, double sigma) { return mu + sigma * gaussian(); }
    std::uint64_t bits();
    double sign() { return (bits() & 1) ? 1.0 : -1.0; }
    /// uniformly from {0,...,m-1}
    std::uint64_t below(std::uint64_t m);

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

DenseMatrix gaussian_matrix(std::size_t m, std::size_t n, double mu, double sigma, Seed seed);
DenseMatrix uniform_matrix(std::size_t m, std::size_t n, Seed seed);  // entries in [-1,1)
Vec gaussian_vector(std::size_t n, double mu, double sigma, Seed seed);
Vec uniform_vector(std::size_t n, Seed seed);

/// Toeplitz with m+n-1 independent Gaussian parameters.
StructuredMatrix gaussian_toeplitz(std::size_t m, std::size_t n, double mu, double sigma, Seed seed);
/// f-circulant with n independent Gaussian parameters in the first column.
StructuredMatrix gaussian_circulant(std::size_t n, double f, double mu, double sigma, Seed seed);
StructuredMatrix uniform_toeplitz(std::size_t m, std::size_t n, Seed seed);
StructuredMatrix uniform_circulant(std::size_t n, Seed seed);

/// Circulant with +-1 first column: the cheap GENP multiplier.
StructuredMatrix sign_circulant(std::size_t n, Seed seed);

/// I - u v^T / (u^T v) with u, v in {-1,+1}^n, redrawn while |u^T v| < 1.
DenseMatrix householder_pm1(std::size_t n, Seed seed);

/// Stacked +-I_r / O_r blocks, ending in a zero remainder block, normalized
/// to unit 2-norm.
DenseMatrix block_sign(std::size_t n, std::size_t r, Seed seed);

/// Q factor of a Gaussian matrix.
DenseMatrix random_orthogonal(std::size_t n, Seed seed);

/// The experiment matrix classes: planted-SVD types I, orthogonal-product
/// types II, Toeplitz-like types III, singular-Toeplitz types IV, plus a free
/// planted-sigma constructor.
enum class MatrixClass {
    gauss,
    gauss_toeplitz,
    gauss_circulant,
    sign_circulant_cls,
    householder,
    block_sign_cls,
    orthogonal,
    class1n,
    class1s,
    class2n,
    class2s,
    class3n,
    class3s,
    class4n,
    class4s,
    svd_planted,
};

struct MatrixClassSpec {
    MatrixClass cls = MatrixClass::gauss;
    std::size_t m = 0, n = 0;
    std::size_t r = 0;       // nullity parameter where applicable
    double f = 1.0;          // f-circulant parameter
    Vec sigma_profile;       // svd_planted
};

DenseMatrix test_matrix(const MatrixClassSpec& spec, Seed seed);

/// A = S diag(sigma) T^T with fresh random orthogonal S, T (S = T when
/// symmetric).  The workhorse behind classes 1n/1s and the planted families.
DenseMatrix planted_svd(const Vec& sigma, Seed seed, bool symmetric = false);

/// sigma profiles used across the experiments
Vec sigma_profile_class1(std::size_t n, std::size_t r, Seed seed);   // 1, [0.1,1) draws, 0.1, 1e-16...
Vec sigma_profile_head(std::size_t n, std::size_t q);                // 1/j then 1e-10
Vec sigma_profile_tail17(std::size_t n, std::size_t r);              // 1/j then 1e-17

}  // namespace rmx
