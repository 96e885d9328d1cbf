#include "psvm/numerics.hpp"

#include <cmath>
#include <sstream>

#include "psvm/errors.hpp"

namespace psvm {

KernelSpec KernelSpec::rbf(double sigma) {
    if (!(sigma > 0.0)) throw TrainError("rbf kernel requires sigma > 0");
    return {Kind::Rbf, sigma};
}

double sparse_dot(const SparseVector& a, std::span<const double> b) {
    double sum = 0.0;
    for (const auto& e : a.entries) {
        if (e.index >= b.size()) {
            std::ostringstream os;
            os << "sparse_dot: index " << e.index << " out of range for dimension "
               << b.size();
            throw TrainError(os.str());
        }
        sum += e.value * b[e.index];
    }
    return sum;
}

double sparse_sparse_dot(const SparseVector& a, const SparseVector& b) {
    double sum = 0.0;
    auto ia = a.entries.begin(), ea = a.entries.end();
    auto ib = b.entries.begin(), eb = b.entries.end();
    while (ia != ea && ib != eb) {
        if (ia->index < ib->index) {
            ++ia;
        } else if (ib->index < ia->index) {
            ++ib;
        } else {
            sum += ia->value * ib->value;
            ++ia;
            ++ib;
        }
    }
    return sum;
}

double sparse_dist_sq(const SparseVector& a, const SparseVector& b) {
    double sum = 0.0;
    auto ia = a.entries.begin(), ea = a.entries.end();
    auto ib = b.entries.begin(), eb = b.entries.end();
    while (ia != ea && ib != eb) {
        if (ia->index < ib->index) {
            sum += ia->value * ia->value;
            ++ia;
        } else if (ib->index < ia->index) {
            sum += ib->value * ib->value;
            ++ib;
        } else {
            double d = ia->value - ib->value;
            sum += d * d;
            ++ia;
            ++ib;
        }
    }
    for (; ia != ea; ++ia) sum += ia->value * ia->value;
    for (; ib != eb; ++ib) sum += ib->value * ib->value;
    return sum;
}

double kernel_eval(const KernelSpec& spec, const SparseVector& a, const SparseVector& b) {
    if (spec.kind == KernelSpec::Kind::Linear) return sparse_sparse_dot(a, b);
    return std::exp(-sparse_dist_sq(a, b) / (2.0 * spec.sigma * spec.sigma));
}

GramMatrix gram(const KernelSpec& spec, std::span<const SparseVector> xs) {
    GramMatrix K(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i; j < xs.size(); ++j) {
            double v = kernel_eval(spec, xs[i], xs[j]);
            K.at(i, j) = v;
            K.at(j, i) = v;
        }
    }
    return K;
}

DenseVector solve_spd(const GramMatrix& A, std::span<const double> y) {
    std::size_t n = A.n;
    if (y.size() != n) throw TrainError("solve_spd: dimension mismatch");
    if (n == 0) return {};

    // Lower-triangular Cholesky factor, row-major.
    std::vector<double> L(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double d = A.at(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
        if (!(d > 0.0)) {
            std::ostringstream os;
            os << "solve_spd: non-positive pivot at row " << j
               << " (system singular or not positive definite)";
            throw TrainError(os.str());
        }
        L[j * n + j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = A.at(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
            L[i * n + j] = s / L[j * n + j];
        }
    }

    // L z = y, then L^T x = z.
    DenseVector x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = y[i];
        for (std::size_t k = 0; k < i; ++k) s -= L[i * n + k] * x[k];
        x[i] = s / L[i * n + i];
    }
    for (std::size_t ii = n; ii > 0; --ii) {
        std::size_t i = ii - 1;
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= L[k * n + i] * x[k];
        x[i] = s / L[i * n + i];
    }
    return x;
}

}  // namespace psvm
