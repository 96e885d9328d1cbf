#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "psvm/corpus.hpp"
#include "psvm/numerics.hpp"

namespace psvm {

// Full-batch gradient descent on the summed quadratic hinge loss.
struct GdConfig {
    double eta = 0.001;      // learning rate
    int max_iters = 100;
    double rel_tol = 1e-6;   // early stop on relative objective change
    double reg = 0.0;        // optional lambda ||w||^2 term, off by default
};

// Kernel Newton with recursive working-set warm starts.
struct NewtonConfig {
    double lambda = 0.001;
    KernelSpec kernel = KernelSpec::rbf(1.0);
    std::size_t base_size = 1000;      // recursion threshold
    int max_newton_iters = 5;
    std::size_t max_n = 4000;          // hard cap; solves are cubic in n_sv
};

// Stochastic subgradient with per-step projection onto the 1/sqrt(lambda) ball.
struct PegasosConfig {
    double lambda = 0.001;
    std::size_t k = 1;        // subset size per iteration
    std::size_t T = 2000;     // iterations
    std::uint64_t seed = 42;
};

struct LinearTrainResult {
    DenseVector w;
    std::vector<double> objective_trace;
    double wall_seconds = 0.0;
};

struct KernelTrainResult {
    std::vector<double> beta;               // length n_train, zero off sv
    std::vector<std::uint32_t> sv_indices;  // sorted; the working set of the last solve
    KernelSpec kernel;
    std::vector<SparseVector> train_refs;   // retained training vectors
    bool converged = false;
    int newton_iters = 0;
    double wall_seconds = 0.0;
};

// max(0, 1 - y * (w.x))^2. The hyperplane is homogeneous during training;
// any bias is fitted afterwards.
double quad_hinge_loss(std::span<const double> w, const SparseVector& x, int y);

// Summed quadratic hinge over `data` at `w`.
double quad_hinge_objective(std::span<const double> w, std::span<const Instance> data);

// Gradient of the summed loss: sum over margin violators of
// -2 (1 - y w.x) y x, accumulated dense.
DenseVector quad_hinge_grad(std::span<const double> w, std::span<const Instance> data,
                            std::size_t dim);

// w ← w - eta * grad, from w = 0, for max_iters or until the objective
// change falls under rel_tol * (1 + previous). Throws TrainError on a
// non-finite objective (step size too large).
LinearTrainResult gd_train(std::span<const Instance> data, std::size_t dim,
                           const GdConfig& cfg);

// One Pegasos subgradient update (no projection): with
// M = {(x,y) in batch : 1 - y w.x > 0},
//   grad = lambda w - (1/|M|) sum_{M} y x   (grad = lambda w if M empty)
//   returns w - (1/(lambda t)) grad.
DenseVector pegasos_step(std::span<const double> w, std::span<const Instance> batch,
                         std::size_t t, double lambda);
DenseVector pegasos_step(std::span<const double> w, std::span<const Instance> data,
                         std::span<const std::uint32_t> batch_indices, std::size_t t,
                         double lambda);

// Scales w onto the ball of radius 1/sqrt(lambda): w * min(1, r/||w||).
DenseVector project_to_ball(DenseVector w, double lambda);

// lambda/2 ||w||^2 + mean hinge loss over data.
double pegasos_objective(std::span<const double> w, std::span<const Instance> data,
                         double lambda);

// Called after each projection with (t, w_t). Used by tests to log norms.
using PegasosObserver = std::function<void(std::size_t t, const DenseVector& w)>;

// Runs T iterations of subgradient step + projection, sampling k distinct
// instances per iteration from the seeded generator. Deterministic for a
// fixed seed. The trace holds the final full-data objective.
LinearTrainResult pegasos_train(std::span<const Instance> data, std::size_t dim,
                                const PegasosConfig& cfg,
                                const PegasosObserver& observer = {});

// Kernel Newton on the quadratic hinge: repeatedly solves
// (K_sv + lambda I) beta_sv = Y_sv and recomputes sv = {i : y_i [K beta]_i < 1}
// until the set repeats. For n > base_size the working set is warm-started
// by recursing on the first half. Throws TrainError when n exceeds cfg.max_n.
KernelTrainResult newton_train(std::span<const Instance> data, const NewtonConfig& cfg);

}  // namespace psvm
