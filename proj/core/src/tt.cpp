#include "rmx/tt.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "rmx/linalg.hpp"
#include "rmx/lowrank.hpp"

namespace rmx {

std::size_t DenseTensor::size() const {
    std::size_t s = 1;
    for (std::size_t d : dims) s *= d;
    return s;
}

double& DenseTensor::at(const std::vector<std::size_t>& idx) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) off = off * dims[k] + idx[k];
    return data[off];
}

double DenseTensor::at(const std::vector<std::size_t>& idx) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) off = off * dims[k] + idx[k];
    return data[off];
}

double DenseTensor::frobenius() const {
    double s = 0.0;
    for (double x : data) s += x * x;
    return std::sqrt(s);
}

DenseMatrix unfolding(const DenseTensor& a, std::size_t k) {
    std::size_t d = a.order();
    if (k < 1 || k >= d) throw std::invalid_argument("unfolding: 1 <= k <= d-1 required");
    std::size_t rows = 1, cols = 1;
    for (std::size_t i = 0; i < k; ++i) rows *= a.dims[i];
    for (std::size_t i = k; i < d; ++i) cols *= a.dims[i];
    // lexicographic flat order = row-major over (row multi-index, col multi-index)
    DenseMatrix m(rows, cols, a.data);
    return m;
}

namespace {

// orthonormal column basis of m of prescribed width, by truncated SVD or by
// randomized sampling (oversampled, then truncated back)
DenseMatrix left_basis(const DenseMatrix& m, std::size_t width, TTMethod method,
                       std::size_t oversample, Seed seed) {
    if (method == TTMethod::svd) {
        SvdFactors f = svd(m);
        DenseMatrix u(m.rows(), width);
        for (std::size_t j = 0; j < width; ++j)
            for (std::size_t i = 0; i < m.rows(); ++i) u(i, j) = f.S(i, j);
        return u;
    }
    std::size_t probe = std::min(m.cols(), std::min(m.rows(), width + oversample));
    DenseMatrix sketch = sample_cover(m, probe, SampleSide::left, SampleFamily::gaussian, seed);
    SvdFactors f = svd(sketch);
    DenseMatrix u(m.rows(), width);
    for (std::size_t j = 0; j < width; ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) u(i, j) = f.S(i, j);
    return u;
}

// width by Frobenius truncation budget: keep the leading singular values
// whose discarded tail is <= tol
std::size_t width_for_tol(const DenseMatrix& m, double tol) {
    SvdFactors f = svd(m);
    double tail = 0.0;
    for (double s : f.sigma) tail += s * s;
    std::size_t w = 0;
    while (w < f.sigma.size() && tail > tol * tol) {
        tail -= f.sigma[w] * f.sigma[w];
        ++w;
    }
    return std::max<std::size_t>(w, 1);
}

}  // namespace

TTDecomposition tt_compress(const DenseTensor& a, const TTOptions& opts) {
    std::size_t d = a.order();
    if (d < 2) throw std::invalid_argument("tt_compress: d >= 2 required");
    if (!opts.ranks.empty() && opts.ranks.size() != d - 1)
        throw std::invalid_argument("tt_compress: need d-1 prescribed ranks");

    TTDecomposition t;
    t.dims = a.dims;
    t.ranks.resize(d - 1);

    // left-to-right sweep: w holds the remainder, reshaped so its rows carry
    // (r_{k-1}, n_k)
    std::size_t tail_cols = a.size() / a.dims[0];
    DenseMatrix w(a.dims[0], tail_cols, a.data);
    std::size_t r_prev = 1;
    for (std::size_t k = 0; k + 1 < d; ++k) {
        std::size_t rows = r_prev * a.dims[k];
        std::size_t cols = w.cols() * w.rows() / rows;
        DenseMatrix m(rows, cols, Vec(w.data(), w.data() + rows * cols));
        std::size_t width;
        if (!opts.ranks.empty())
            width = std::min(opts.ranks[k], std::min(rows, cols));
        else
            width = std::min(width_for_tol(m, opts.tol), std::min(rows, cols));
        DenseMatrix u = left_basis(m, width, opts.method, opts.oversample,
                                   opts.seed.child(1000 + k));
        t.ranks[k] = width;
        t.cores.push_back(Vec(u.data(), u.data() + rows * width));
        // remainder: U^T M, rows become the new r_k
        DenseMatrix next = u.transposed() * m;
        w = std::move(next);
        r_prev = width;
    }
    // last core: the remainder itself, shaped r_{d-1} x n_d x 1
    t.cores.push_back(Vec(w.data(), w.data() + w.rows() * w.cols()));
    return t;
}

DenseTensor tt_to_full(const TTDecomposition& t) {
    std::size_t d = t.dims.size();
    // accumulate left-to-right: rows = spatial prefix, cols = current rank
    DenseMatrix acc(1, 1);
    acc(0, 0) = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
        std::size_t rk_in = t.core_rows(k), rk_out = t.core_cols(k);
        DenseMatrix core(rk_in, t.dims[k] * rk_out, t.cores[k]);
        // acc (P x rk_in) * core (rk_in x (n_k rk_out)) -> P n_k x rk_out
        DenseMatrix grown = acc * core;
        DenseMatrix reshaped(grown.rows() * t.dims[k], rk_out,
                             Vec(grown.data(), grown.data() + grown.rows() * grown.cols()));
        acc = std::move(reshaped);
    }
    DenseTensor out;
    out.dims = t.dims;
    out.data = Vec(acc.data(), acc.data() + acc.rows());
    return out;
}

double tt_eval(const TTDecomposition& t, const std::vector<std::size_t>& idx) {
    std::size_t d = t.dims.size();
    Vec v{1.0};
    for (std::size_t k = 0; k < d; ++k) {
        std::size_t rin = t.core_rows(k), rout = t.core_cols(k);
        Vec next(rout, 0.0);
        const Vec& core = t.cores[k];
        for (std::size_t a = 0; a < rin; ++a) {
            double va = v[a];
            if (va == 0.0) continue;
            std::size_t base = (a * t.dims[k] + idx[k]) * rout;
            for (std::size_t b = 0; b < rout; ++b) next[b] += va * core[base + b];
        }
        v = std::move(next);
    }
    return v[0];
}

void write_tensor(std::ostream& os, const DenseTensor& a) {
    os << "dims:";
    for (std::size_t d : a.dims) os << ' ' << d;
    os << '\n';
    os.precision(17);
    for (std::size_t i = 0; i < a.data.size(); ++i)
        os << a.data[i] << ((i + 1) % 8 == 0 ? '\n' : ' ');
    os << '\n';
}

DenseTensor read_tensor(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("tensor read: empty input (line 1)");
    std::istringstream hdr(line);
    std::string tag;
    hdr >> tag;
    if (tag != "dims:") throw std::runtime_error("tensor read: missing 'dims:' header (line 1)");
    DenseTensor t;
    std::size_t d;
    while (hdr >> d) t.dims.push_back(d);
    if (t.dims.empty()) throw std::runtime_error("tensor read: no dimensions (line 1)");
    t.data.resize(t.size());
    for (std::size_t i = 0; i < t.data.size(); ++i)
        if (!(is >> t.data[i]))
            throw std::runtime_error("tensor read: expected " + std::to_string(t.data.size()) +
                                     " values, got " + std::to_string(i));
    return t;
}

void write_tt(std::ostream& os, const TTDecomposition& t) {
    os << "tt-cores: " << t.dims.size() << '\n';
    os.precision(17);
    for (std::size_t k = 0; k < t.cores.size(); ++k) {
        os << "core: " << t.core_rows(k) << ' ' << t.dims[k] << ' ' << t.core_cols(k) << '\n';
        for (std::size_t i = 0; i < t.cores[k].size(); ++i)
            os << t.cores[k][i] << ((i + 1) % 8 == 0 ? '\n' : ' ');
        os << '\n';
    }
}

TTDecomposition read_tt(std::istream& is) {
    std::string tag;
    std::size_t d;
    is >> tag >> d;
    if (tag != "tt-cores:") throw std::runtime_error("tt read: missing 'tt-cores:' header");
    TTDecomposition t;
    for (std::size_t k = 0; k < d; ++k) {
        std::size_t rin, nk, rout;
        is >> tag >> rin >> nk >> rout;
        if (tag != "core:") throw std::runtime_error("tt read: missing core header");
        t.dims.push_back(nk);
        if (k + 1 < d) t.ranks.push_back(rout);
        Vec core(rin * nk * rout);
        for (double& x : core)
            if (!(is >> x)) throw std::runtime_error("tt read: truncated core data");
        t.cores.push_back(std::move(core));
    }
    return t;
}

}  // namespace rmx
