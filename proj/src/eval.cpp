#include "psvm/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include "psvm/errors.hpp"
#include "psvm/rng.hpp"

namespace psvm {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<RawRecord> gather(const std::vector<RawRecord>& records,
                              const std::vector<std::uint32_t>& indices) {
    std::vector<RawRecord> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(records[i]);
    return out;
}

RoundResult run_round(const std::vector<RawRecord>& records, const ModelSpec& spec,
                      const CvConfig& cfg, int round) {
    std::uint64_t round_seed = cfg.seed + static_cast<std::uint64_t>(round);
    auto [train_idx, test_idx] =
        split_round(records.size(), round_seed, cfg.holdout_fraction);
    auto train_records = gather(records, train_idx);
    auto test_records = gather(records, test_idx);

    Vocabulary vocab = build_vocabulary(train_records);
    std::size_t dim = vocab.size();
    auto train = make_instances(train_records, vocab, spec.features);
    auto test = make_instances(test_records, vocab, spec.features);

    OptimizerConfig optimizer = spec.optimizer;
    if (auto* peg = std::get_if<PegasosConfig>(&optimizer))
        peg->seed += static_cast<std::uint64_t>(round);

    RoundResult result;
    std::vector<int> predictions, truths;
    predictions.reserve(test.size());
    truths.reserve(test.size());

    if (spec.mode == TaskMode::Binary) {
        auto t0 = Clock::now();
        BinarySvm model = train_binary(train, dim, optimizer);
        result.train_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        for (const auto& inst : test) {
            predictions.push_back(predict_binary(model, inst.features));
            truths.push_back(inst.binary_label);
        }
    } else {
        auto t0 = Clock::now();
        MulticlassSvm model = train_multiclass(train, dim, optimizer);
        result.train_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        for (const auto& inst : test) {
            predictions.push_back(predict_multiclass(model, inst.features));
            truths.push_back(inst.sentiment);
        }
    }
    result.accuracy = accuracy(predictions, truths);
    return result;
}

}  // namespace

std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> split_round(
    std::size_t n, std::uint64_t round_seed, double holdout_fraction) {
    if (n < 2) throw TrainError("split_round: need at least 2 instances");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
        throw TrainError("split_round: holdout fraction must be in (0,1)");

    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    Rng rng(round_seed);
    rng.shuffle(perm);

    std::size_t n_test = static_cast<std::size_t>(
        static_cast<double>(n) * holdout_fraction);
    if (n_test < 1) n_test = 1;

    std::vector<std::uint32_t> test(perm.begin(), perm.begin() + n_test);
    std::vector<std::uint32_t> train(perm.begin() + n_test, perm.end());
    return {std::move(train), std::move(test)};
}

double accuracy(std::span<const int> predictions, std::span<const int> truths) {
    if (predictions.size() != truths.size())
        throw TrainError("accuracy: prediction/truth length mismatch");
    if (predictions.empty()) throw TrainError("accuracy: empty inputs");
    std::size_t matches = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == truths[i]) ++matches;
    return static_cast<double>(matches) / static_cast<double>(predictions.size());
}

unsigned eval_threads() {
    const char* env = std::getenv("PRIMAL_SVM_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || v < 1) return 1;
    return static_cast<unsigned>(v);
}

CvReport cross_validate(const std::vector<RawRecord>& records, const ModelSpec& spec,
                        const CvConfig& cfg) {
    if (cfg.rounds < 1) throw TrainError("cross_validate: rounds must be >= 1");

    CvReport report;
    report.spec_echo = spec;
    report.cv_echo = cfg;
    report.per_round.resize(cfg.rounds);

    std::vector<std::exception_ptr> errors(cfg.rounds);
    unsigned threads = std::min<unsigned>(eval_threads(), cfg.rounds);
    if (threads <= 1) {
        for (int r = 0; r < cfg.rounds; ++r)
            report.per_round[r] = run_round(records, spec, cfg, r);
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int r = next.fetch_add(1); r < cfg.rounds; r = next.fetch_add(1)) {
                try {
                    report.per_round[r] = run_round(records, spec, cfg, r);
                } catch (...) {
                    errors[r] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    double acc_sum = 0.0, time_sum = 0.0;
    for (const auto& round : report.per_round) {
        acc_sum += round.accuracy;
        time_sum += round.train_seconds;
    }
    report.mean_accuracy = acc_sum / static_cast<double>(cfg.rounds);
    report.mean_train_seconds = time_sum / static_cast<double>(cfg.rounds);
    return report;
}

void apply_sweep_param(ModelSpec& spec, const std::string& parameter, double value) {
    auto wrong_alg = [&](const char* needs) {
        std::ostringstream os;
        os << "sweep parameter `" << parameter << "` needs " << needs
           << "; valid names: eta, iters (gd), lambda (pegasos, newton), k, T (pegasos), "
              "sigma (newton rbf)";
        throw UsageError(os.str());
    };

    if (parameter == "eta") {
        auto* gd = std::get_if<GdConfig>(&spec.optimizer);
        if (!gd) wrong_alg("the gd algorithm");
        gd->eta = value;
    } else if (parameter == "iters") {
        auto* gd = std::get_if<GdConfig>(&spec.optimizer);
        if (!gd) wrong_alg("the gd algorithm");
        gd->max_iters = static_cast<int>(value);
    } else if (parameter == "lambda") {
        if (auto* peg = std::get_if<PegasosConfig>(&spec.optimizer))
            peg->lambda = value;
        else if (auto* newton = std::get_if<NewtonConfig>(&spec.optimizer))
            newton->lambda = value;
        else
            wrong_alg("pegasos or newton");
    } else if (parameter == "k") {
        auto* peg = std::get_if<PegasosConfig>(&spec.optimizer);
        if (!peg) wrong_alg("the pegasos algorithm");
        peg->k = static_cast<std::size_t>(value);
    } else if (parameter == "T") {
        auto* peg = std::get_if<PegasosConfig>(&spec.optimizer);
        if (!peg) wrong_alg("the pegasos algorithm");
        peg->T = static_cast<std::size_t>(value);
    } else if (parameter == "sigma") {
        auto* newton = std::get_if<NewtonConfig>(&spec.optimizer);
        if (!newton || newton->kernel.kind != KernelSpec::Kind::Rbf)
            wrong_alg("the newton algorithm with the rbf kernel");
        newton->kernel = KernelSpec::rbf(value);
    } else {
        std::ostringstream os;
        os << "unknown sweep parameter `" << parameter
           << "`; valid names: eta, iters, lambda, k, T, sigma";
        throw UsageError(os.str());
    }
}

std::vector<double> paper_grid(const std::string& parameter) {
    if (parameter == "eta")
        return {0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 1, 2, 3, 4, 5};
    if (parameter == "lambda") return {0.001, 0.01, 0.1, 1, 10};
    throw UsageError("no built-in grid for parameter `" + parameter +
                     "`; built-ins exist for eta and lambda");
}

SweepResult sweep(const std::vector<RawRecord>& records, const ModelSpec& base,
                  const SweepGrid& grid, const CvConfig& cfg) {
    if (grid.values.empty()) throw UsageError("sweep: empty grid");
    {
        // Reject bad parameter/algorithm combinations before any training.
        ModelSpec probe = base;
        apply_sweep_param(probe, grid.parameter, grid.values.front());
    }

    SweepResult result;
    result.cells.reserve(grid.values.size());
    for (double value : grid.values) {
        SweepCell cell;
        cell.value = value;
        ModelSpec spec = base;
        try {
            apply_sweep_param(spec, grid.parameter, value);
            cell.report = cross_validate(records, spec, cfg);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
        result.cells.push_back(std::move(cell));
    }

    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        const auto& cell = result.cells[i];
        if (!cell.report) continue;
        if (result.best_index < 0 ||
            cell.report->mean_accuracy >
                result.cells[result.best_index].report->mean_accuracy)
            result.best_index = static_cast<int>(i);
    }
    return result;
}

}  // namespace psvm
