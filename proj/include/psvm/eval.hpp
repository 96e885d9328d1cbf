#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psvm/corpus.hpp"
#include "psvm/model_io.hpp"
#include "psvm/svm.hpp"

namespace psvm {

// What to train and on which representation; the eval harness runs one of
// these per CV round or sweep cell.
struct ModelSpec {
    TaskMode mode = TaskMode::Binary;
    FeatureMode features = FeatureMode::Binary;
    OptimizerConfig optimizer = PegasosConfig{};
};

struct CvConfig {
    int rounds = 10;
    double holdout_fraction = 0.1;
    std::uint64_t seed = 42;
};

struct RoundResult {
    double accuracy = 0.0;
    double train_seconds = 0.0;
};

struct CvReport {
    std::vector<RoundResult> per_round;
    double mean_accuracy = 0.0;
    double mean_train_seconds = 0.0;
    ModelSpec spec_echo;
    CvConfig cv_echo;
};

struct SweepGrid {
    std::string parameter;
    std::vector<double> values;
};

struct SweepCell {
    double value = 0.0;
    std::optional<CvReport> report;  // empty when the cell errored
    std::string error;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    int best_index = -1;  // argmax mean accuracy over successful cells
};

// Seeded permutation of 0..n-1 split into (train, test): the test block is
// the first max(1, floor(n * holdout_fraction)) permuted indices.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> split_round(
    std::size_t n, std::uint64_t round_seed, double holdout_fraction);

// Fraction of positions where the two label sequences agree.
double accuracy(std::span<const int> predictions, std::span<const int> truths);

// Repeated random-holdout cross validation. Round r uses seed + r for its
// split; the vocabulary is rebuilt from each round's training portion, so
// unseen test words are dropped. Only the training call is timed.
// Rounds run concurrently when PRIMAL_SVM_THREADS is set above 1; results
// are identical either way.
CvReport cross_validate(const std::vector<RawRecord>& records, const ModelSpec& spec,
                        const CvConfig& cfg);

// One cross_validate per grid value with that parameter overridden on a
// copy of `base`. Cell failures are recorded and the sweep continues.
// Throws UsageError for a parameter the base algorithm does not have.
SweepResult sweep(const std::vector<RawRecord>& records, const ModelSpec& base,
                  const SweepGrid& grid, const CvConfig& cfg);

// Validates/overrides one sweepable parameter (eta, iters, lambda, k, T,
// sigma) on the spec's optimizer config.
void apply_sweep_param(ModelSpec& spec, const std::string& parameter, double value);

// Built-in grids: "eta" (15 learning rates) and "lambda" (5 values).
std::vector<double> paper_grid(const std::string& parameter);

// PRIMAL_SVM_THREADS, clamped to >= 1 (unset, empty, or 0 mean sequential).
unsigned eval_threads();

}  // namespace psvm
