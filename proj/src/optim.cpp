#include "psvm/optim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "psvm/errors.hpp"
#include "psvm/rng.hpp"

namespace psvm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double norm2(std::span<const double> w) {
    double s = 0.0;
    for (double v : w) s += v * v;
    return s;
}

}  // namespace

double quad_hinge_loss(std::span<const double> w, const SparseVector& x, int y) {
    double margin = static_cast<double>(y) * sparse_dot(x, w);
    double gap = 1.0 - margin;
    return gap > 0.0 ? gap * gap : 0.0;
}

double quad_hinge_objective(std::span<const double> w, std::span<const Instance> data) {
    double sum = 0.0;
    for (const auto& inst : data) sum += quad_hinge_loss(w, inst.features, inst.binary_label);
    return sum;
}

DenseVector quad_hinge_grad(std::span<const double> w, std::span<const Instance> data,
                            std::size_t dim) {
    DenseVector g(dim, 0.0);
    for (const auto& inst : data) {
        double y = static_cast<double>(inst.binary_label);
        double margin = y * sparse_dot(inst.features, w);
        if (margin < 1.0) {
            double coef = -2.0 * (1.0 - margin) * y;
            for (const auto& e : inst.features.entries) g[e.index] += coef * e.value;
        }
    }
    return g;
}

LinearTrainResult gd_train(std::span<const Instance> data, std::size_t dim,
                           const GdConfig& cfg) {
    if (data.empty()) throw TrainError("gd_train: empty training set");
    if (!(cfg.eta > 0.0) || cfg.max_iters < 1)
        throw TrainError("gd_train: eta must be > 0 and max_iters >= 1");

    auto start = Clock::now();
    LinearTrainResult result;
    result.w.assign(dim, 0.0);

    auto objective = [&](std::span<const double> w) {
        double obj = quad_hinge_objective(w, data);
        if (cfg.reg > 0.0) obj += cfg.reg * norm2(w);
        return obj;
    };

    double prev = objective(result.w);
    for (int it = 1; it <= cfg.max_iters; ++it) {
        DenseVector g = quad_hinge_grad(result.w, data, dim);
        double shrink = 1.0 - 2.0 * cfg.eta * cfg.reg;
        for (std::size_t i = 0; i < dim; ++i)
            result.w[i] = shrink * result.w[i] - cfg.eta * g[i];

        double obj = objective(result.w);
        if (!std::isfinite(obj)) {
            std::ostringstream os;
            os << "gd_train: objective diverged at iteration " << it
               << " (eta too large)";
            throw TrainError(os.str());
        }
        result.objective_trace.push_back(obj);
        if (std::abs(obj - prev) <= cfg.rel_tol * (1.0 + prev)) break;
        prev = obj;
    }
    result.wall_seconds = seconds_since(start);
    return result;
}

DenseVector pegasos_step(std::span<const double> w, std::span<const Instance> data,
                         std::span<const std::uint32_t> batch_indices, std::size_t t,
                         double lambda) {
    if (t < 1 || !(lambda > 0.0)) throw TrainError("pegasos_step: t >= 1 and lambda > 0");

    // w - (1/(lambda t)) (lambda w - (1/|M|) sum_M y x)
    //   = (1 - 1/t) w + (1/(lambda t |M|)) sum_M y x
    std::vector<std::uint32_t> violators;
    for (std::uint32_t i : batch_indices) {
        const auto& inst = data[i];
        double margin = static_cast<double>(inst.binary_label) * sparse_dot(inst.features, w);
        if (1.0 - margin > 0.0) violators.push_back(i);
    }

    DenseVector next(w.begin(), w.end());
    double keep = 1.0 - 1.0 / static_cast<double>(t);
    for (double& v : next) v *= keep;
    if (!violators.empty()) {
        double scale = 1.0 / (lambda * static_cast<double>(t) *
                              static_cast<double>(violators.size()));
        for (std::uint32_t i : violators) {
            const auto& inst = data[i];
            double y = static_cast<double>(inst.binary_label);
            for (const auto& e : inst.features.entries)
                next[e.index] += scale * y * e.value;
        }
    }
    return next;
}

DenseVector pegasos_step(std::span<const double> w, std::span<const Instance> batch,
                         std::size_t t, double lambda) {
    std::vector<std::uint32_t> all(batch.size());
    std::iota(all.begin(), all.end(), 0u);
    return pegasos_step(w, batch, all, t, lambda);
}

DenseVector project_to_ball(DenseVector w, double lambda) {
    if (!(lambda > 0.0)) throw TrainError("project_to_ball: lambda > 0 required");
    double norm = std::sqrt(norm2(w));
    if (norm == 0.0) return w;
    double scale = std::min(1.0, 1.0 / (std::sqrt(lambda) * norm));
    if (scale < 1.0)
        for (double& v : w) v *= scale;
    return w;
}

double pegasos_objective(std::span<const double> w, std::span<const Instance> data,
                         double lambda) {
    double hinge = 0.0;
    for (const auto& inst : data) {
        double margin =
            static_cast<double>(inst.binary_label) * sparse_dot(inst.features, w);
        hinge += std::max(0.0, 1.0 - margin);
    }
    return 0.5 * lambda * norm2(w) + hinge / static_cast<double>(data.size());
}

LinearTrainResult pegasos_train(std::span<const Instance> data, std::size_t dim,
                                const PegasosConfig& cfg, const PegasosObserver& observer) {
    std::size_t n = data.size();
    if (n == 0) throw TrainError("pegasos_train: empty training set");
    if (cfg.k < 1 || cfg.k > n) {
        std::ostringstream os;
        os << "pegasos_train: k=" << cfg.k << " must be in [1, n=" << n << "]";
        throw TrainError(os.str());
    }
    if (cfg.T < 1 || !(cfg.lambda > 0.0))
        throw TrainError("pegasos_train: T >= 1 and lambda > 0 required");

    auto start = Clock::now();
    Rng rng(cfg.seed);
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);

    DenseVector w(dim, 0.0);
    for (std::size_t t = 1; t <= cfg.T; ++t) {
        // Partial Fisher-Yates: idx[0..k) is a uniform k-subset without
        // replacement; the array stays a permutation across iterations.
        for (std::size_t i = 0; i < cfg.k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
            std::swap(idx[i], idx[j]);
        }
        w = pegasos_step(w, data, std::span(idx).first(cfg.k), t, cfg.lambda);
        w = project_to_ball(std::move(w), cfg.lambda);
        if (observer) observer(t, w);
    }

    LinearTrainResult result;
    result.objective_trace.push_back(pegasos_objective(w, data, cfg.lambda));
    result.w = std::move(w);
    result.wall_seconds = seconds_since(start);
    return result;
}

namespace {

// Shared state for the recursive working-set schedule.
struct NewtonRun {
    const GramMatrix& K;
    std::span<const double> y;
    const NewtonConfig& cfg;
    bool converged = false;
    int iters = 0;

    // Trains on the first `m` instances; returns beta (length m, zero off
    // the working set) and the set used in the final solve. `converged`
    // and `iters` reflect the outermost call on return.
    std::pair<std::vector<double>, std::vector<std::uint32_t>> train_prefix(std::size_t m) {
        std::vector<std::uint32_t> sv;
        if (m > cfg.base_size) {
            auto [half_beta, half_sv] = train_prefix(m / 2);
            for (std::uint32_t i = 0; i < half_beta.size(); ++i)
                if (half_beta[i] != 0.0) sv.push_back(i);
        } else {
            sv.resize(m);
            std::iota(sv.begin(), sv.end(), 0u);
        }

        std::vector<double> beta(m, 0.0);
        std::vector<std::uint32_t> solved_sv;
        converged = false;
        iters = 0;
        for (int it = 1; it <= cfg.max_newton_iters; ++it) {
            iters = it;
            solved_sv = sv;
            std::fill(beta.begin(), beta.end(), 0.0);
            if (!sv.empty()) {
                GramMatrix A(sv.size());
                std::vector<double> rhs(sv.size());
                for (std::size_t a = 0; a < sv.size(); ++a) {
                    rhs[a] = y[sv[a]];
                    for (std::size_t b = 0; b < sv.size(); ++b)
                        A.at(a, b) = K.at(sv[a], sv[b]);
                    A.at(a, a) += cfg.lambda;
                }
                std::vector<double> beta_sv;
                try {
                    beta_sv = solve_spd(A, rhs);
                } catch (const TrainError& e) {
                    std::ostringstream os;
                    os << "newton_train: solve on " << sv.size()
                       << " support vectors failed: " << e.what();
                    throw TrainError(os.str());
                }
                for (std::size_t a = 0; a < sv.size(); ++a) beta[sv[a]] = beta_sv[a];
            }

            std::vector<std::uint32_t> next_sv;
            for (std::uint32_t i = 0; i < m; ++i) {
                double s = 0.0;
                for (std::uint32_t j : solved_sv) s += K.at(i, j) * beta[j];
                if (y[i] * s < 1.0) next_sv.push_back(i);
            }
            if (next_sv == solved_sv) {
                converged = true;
                break;
            }
            sv = std::move(next_sv);
        }
        return {std::move(beta), std::move(solved_sv)};
    }
};

}  // namespace

KernelTrainResult newton_train(std::span<const Instance> data, const NewtonConfig& cfg) {
    std::size_t n = data.size();
    if (n == 0) throw TrainError("newton_train: empty training set");
    if (n > cfg.max_n) {
        std::ostringstream os;
        os << "newton_train: n=" << n << " exceeds the cap of " << cfg.max_n
           << " (solve cost grows cubically with the support-vector count; "
              "raise max_n to force the run)";
        throw TrainError(os.str());
    }
    if (!(cfg.lambda > 0.0) || cfg.base_size < 1 || cfg.max_newton_iters < 1)
        throw TrainError("newton_train: invalid configuration");

    auto start = Clock::now();
    std::vector<SparseVector> xs;
    xs.reserve(n);
    std::vector<double> y;
    y.reserve(n);
    for (const auto& inst : data) {
        xs.push_back(inst.features);
        y.push_back(static_cast<double>(inst.binary_label));
    }

    GramMatrix K = gram(cfg.kernel, xs);
    NewtonRun run{K, y, cfg};
    auto [beta, sv] = run.train_prefix(n);

    KernelTrainResult result;
    result.beta = std::move(beta);
    result.sv_indices = std::move(sv);
    result.kernel = cfg.kernel;
    result.train_refs = std::move(xs);
    result.converged = run.converged;
    result.newton_iters = run.iters;
    result.wall_seconds = seconds_since(start);
    return result;
}

}  // namespace psvm
