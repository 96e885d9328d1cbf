#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "psvm/corpus.hpp"
#include "psvm/numerics.hpp"
#include "psvm/optim.hpp"

namespace psvm {

struct LinearModel {
    DenseVector w;
    double bias = 0.0;
};

// A trained binary classifier: dense hyperplane with post-hoc bias, or a
// kernel expansion over the retained training vectors.
struct BinarySvm {
    std::variant<LinearModel, KernelTrainResult> model;

    bool is_linear() const { return std::holds_alternative<LinearModel>(model); }
    const LinearModel& linear() const { return std::get<LinearModel>(model); }
    const KernelTrainResult& kernel() const { return std::get<KernelTrainResult>(model); }
};

enum class Algorithm { Gd, Newton, Pegasos };

using OptimizerConfig = std::variant<GdConfig, NewtonConfig, PegasosConfig>;

Algorithm algorithm_of(const OptimizerConfig& cfg);

// Signs of the four pairwise decision values, ordered (0,1),(1,2),(2,3),(3,4).
using SignPattern = std::array<int, 4>;

// Co-occurrence counts of (sign pattern, label) over the training set.
// There are only 16 possible patterns, so rows are stored densely; a
// pattern is "seen" iff its row has a nonzero total.
struct PatternTable {
    std::array<std::array<std::uint64_t, 5>, 16> counts{};
    std::array<std::uint64_t, 5> prior{};

    static std::size_t key(const SignPattern& s) {
        std::size_t k = 0;
        for (int j = 0; j < 4; ++j)
            if (s[j] > 0) k |= 1u << j;
        return k;
    }
};

// Four adjacent-pair models plus the pattern table built over the full
// training set. pairwise[j] is trained on sentiments {j, j+1} with j+1
// relabeled +1.
struct MulticlassSvm {
    std::array<BinarySvm, 4> pairwise;
    PatternTable table;
};

// Post-hoc bias: mean of (y_i - w.x_i) over points with margin < 1, or 0
// when no point violates the margin.
double fit_bias(std::span<const double> w, std::span<const Instance> data);

// Linear: w.x + b. Kernel: sum over sv of beta_i K(x_i, x).
double decision_value(const BinarySvm& model, const SparseVector& x);

// +1 iff decision_value >= 0.
int predict_binary(const BinarySvm& model, const SparseVector& x);

// Trains one binary model with the chosen optimizer; linear optimizers get
// the post-hoc bias, the kernel path has none.
BinarySvm train_binary(std::span<const Instance> data, std::size_t dim,
                       const OptimizerConfig& optimizer);

SignPattern sign_pattern(const std::array<BinarySvm, 4>& models, const SparseVector& x);

// Counts each instance's (pattern, sentiment) pair and the label prior.
PatternTable build_pattern_table(const std::array<BinarySvm, 4>& models,
                                 std::span<const Instance> data);

// Trains the four pairwise models (throws TrainError naming any pair with a
// class missing) and builds the pattern table over all of `data`. Pegasos
// pair models get seeds offset by the pair index.
MulticlassSvm train_multiclass(std::span<const Instance> data, std::size_t dim,
                               const OptimizerConfig& optimizer);

// Pattern row argmax when the pattern was seen in training, label-prior
// argmax otherwise; ties break toward the lower label.
int predict_multiclass(const MulticlassSvm& model, const SparseVector& x);

}  // namespace psvm
