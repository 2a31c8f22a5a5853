#pragma once

#include <iosfwd>

#include "rmx/matrix.hpp"
#include "rmx/rng.hpp"

namespace rmx {

/// Dense d-way tensor, flat data in lexicographic index order (the last index
/// moves fastest).
struct DenseTensor {
    std::vector<std::size_t> dims;
    Vec data;

    std::size_t order() const { return dims.size(); }
    std::size_t size() const;
    double& at(const std::vector<std::size_t>& idx);
    double at(const std::vector<std::size_t>& idx) const;
    double frobenius() const;
};

/// Chain of 3-way cores, core k shaped r_{k-1} x n_k x r_k with r_0 = r_d = 1.
struct TTDecomposition {
    std::vector<std::size_t> dims;
    std::vector<std::size_t> ranks;     // r_1 .. r_{d-1}
    std::vector<Vec> cores;             // core k flattened (alpha, i, beta) lexicographic

    std::size_t core_rows(std::size_t k) const { return k == 0 ? 1 : ranks[k - 1]; }
    std::size_t core_cols(std::size_t k) const { return k + 1 == dims.size() ? 1 : ranks[k]; }
};

/// k-th unfolding: (n_1...n_k) x (n_{k+1}...n_d) matrix, lexicographic maps
/// on both axes.
DenseMatrix unfolding(const DenseTensor& a, std::size_t k);

enum class TTMethod { svd, randomized };

struct TTOptions {
    TTMethod method = TTMethod::svd;
    double tol = 0.0;                    // Frobenius truncation budget per sweep step
    std::vector<std::size_t> ranks;      // prescribed ranks r_1..r_{d-1} (empty: tol-driven)
    std::size_t oversample = 2;          // randomized method only
    Seed seed{1};
};

/// Left-to-right sweep truncating each unfolding; the randomized method
/// replaces the truncated SVD with a sampled range basis of the same width.
TTDecomposition tt_compress(const DenseTensor& a, const TTOptions& opts);

DenseTensor tt_to_full(const TTDecomposition& t);
double tt_eval(const TTDecomposition& t, const std::vector<std::size_t>& idx);

/// File formats: tensors as "dims: n1 n2 ... nd" then values; TT as one
/// shape header plus values per core.
void write_tensor(std::ostream& os, const DenseTensor& a);
DenseTensor read_tensor(std::istream& is);
void write_tt(std::ostream& os, const TTDecomposition& t);
TTDecomposition read_tt(std::istream& is);

}  // namespace rmx
