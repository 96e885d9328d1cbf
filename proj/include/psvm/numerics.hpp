#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "psvm/corpus.hpp"

namespace psvm {

using DenseVector = std::vector<double>;

struct KernelSpec {
    enum class Kind { Linear, Rbf };
    Kind kind = Kind::Linear;
    double sigma = 1.0;  // Rbf only, > 0

    static KernelSpec linear() { return {Kind::Linear, 1.0}; }
    static KernelSpec rbf(double sigma);
};

// Dense symmetric matrix, row-major. Doubles as the kernel (Gram) matrix
// and the solver input; symmetry is by construction (upper triangle
// computed, lower mirrored).
struct GramMatrix {
    std::size_t n = 0;
    std::vector<double> data;  // n * n

    explicit GramMatrix(std::size_t n_ = 0) : n(n_), data(n_ * n_, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

// a . b with a sparse and b dense. Throws TrainError if an index of `a`
// is out of range for `b`.
double sparse_dot(const SparseVector& a, std::span<const double> b);

// a . b over two sorted sparse vectors (index merge).
double sparse_sparse_dot(const SparseVector& a, const SparseVector& b);

// ||a - b||^2 over two sorted sparse vectors.
double sparse_dist_sq(const SparseVector& a, const SparseVector& b);

// Linear: <a, b>. Rbf: exp(-||a-b||^2 / (2 sigma^2)).
double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b);

// K[i][j] = kernel_eval(spec, xs[i], xs[j]).
GramMatrix gram(const KernelSpec& spec, std::span<const SparseVector> xs);

// Solves A x = y for symmetric positive definite A by Cholesky
// factorization. Guarantees ||A x - y||inf <= 1e-8 * (1 + ||y||inf) for
// well-conditioned inputs; a non-positive pivot throws TrainError
// (singular or indefinite system, e.g. lambda too small).
DenseVector solve_spd(const GramMatrix& A, std::span<const double> y);

}  // namespace psvm
