#include "psvm/svm.hpp"

#include <algorithm>
#include <sstream>

#include "psvm/errors.hpp"

namespace psvm {

Algorithm algorithm_of(const OptimizerConfig& cfg) {
    if (std::holds_alternative<GdConfig>(cfg)) return Algorithm::Gd;
    if (std::holds_alternative<NewtonConfig>(cfg)) return Algorithm::Newton;
    return Algorithm::Pegasos;
}

double fit_bias(std::span<const double> w, std::span<const Instance> data) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& inst : data) {
        double wx = sparse_dot(inst.features, w);
        double y = static_cast<double>(inst.binary_label);
        if (y * wx < 1.0) {
            sum += y - wx;
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double decision_value(const BinarySvm& model, const SparseVector& x) {
    if (model.is_linear()) {
        const auto& lin = model.linear();
        return sparse_dot(x, lin.w) + lin.bias;
    }
    const auto& k = model.kernel();
    double sum = 0.0;
    for (std::uint32_t i : k.sv_indices)
        sum += k.beta[i] * kernel_eval(k.kernel, k.train_refs[i], x);
    return sum;
}

int predict_binary(const BinarySvm& model, const SparseVector& x) {
    return decision_value(model, x) >= 0.0 ? +1 : -1;
}

BinarySvm train_binary(std::span<const Instance> data, std::size_t dim,
                       const OptimizerConfig& optimizer) {
    BinarySvm svm;
    switch (algorithm_of(optimizer)) {
        case Algorithm::Gd: {
            auto result = gd_train(data, dim, std::get<GdConfig>(optimizer));
            double b = fit_bias(result.w, data);
            svm.model = LinearModel{std::move(result.w), b};
            break;
        }
        case Algorithm::Pegasos: {
            auto result = pegasos_train(data, dim, std::get<PegasosConfig>(optimizer));
            double b = fit_bias(result.w, data);
            svm.model = LinearModel{std::move(result.w), b};
            break;
        }
        case Algorithm::Newton: {
            svm.model = newton_train(data, std::get<NewtonConfig>(optimizer));
            break;
        }
    }
    return svm;
}

SignPattern sign_pattern(const std::array<BinarySvm, 4>& models, const SparseVector& x) {
    SignPattern s;
    for (int j = 0; j < 4; ++j) s[j] = predict_binary(models[j], x);
    return s;
}

PatternTable build_pattern_table(const std::array<BinarySvm, 4>& models,
                                 std::span<const Instance> data) {
    PatternTable table;
    for (const auto& inst : data) {
        SignPattern s = sign_pattern(models, inst.features);
        table.counts[PatternTable::key(s)][inst.sentiment] += 1;
        table.prior[inst.sentiment] += 1;
    }
    return table;
}

MulticlassSvm train_multiclass(std::span<const Instance> data, std::size_t dim,
                               const OptimizerConfig& optimizer) {
    MulticlassSvm svm;
    for (int pair = 0; pair < 4; ++pair) {
        int lo = pair, hi = pair + 1;
        std::vector<Instance> subset;
        for (const auto& inst : data) {
            if (inst.sentiment != lo && inst.sentiment != hi) continue;
            Instance relabeled = inst;
            relabeled.binary_label = inst.sentiment == hi ? +1 : -1;
            subset.push_back(std::move(relabeled));
        }
        bool has_lo = std::any_of(subset.begin(), subset.end(),
                                  [&](const Instance& i) { return i.sentiment == lo; });
        bool has_hi = std::any_of(subset.begin(), subset.end(),
                                  [&](const Instance& i) { return i.sentiment == hi; });
        if (!has_lo || !has_hi) {
            std::ostringstream os;
            os << "train_multiclass: pair (" << lo << "," << hi << ") is missing label "
               << (has_lo ? hi : lo);
            throw TrainError(os.str());
        }

        OptimizerConfig pair_cfg = optimizer;
        if (auto* peg = std::get_if<PegasosConfig>(&pair_cfg))
            peg->seed += static_cast<std::uint64_t>(pair);
        svm.pairwise[pair] = train_binary(subset, dim, pair_cfg);
    }
    svm.table = build_pattern_table(svm.pairwise, data);
    return svm;
}

int predict_multiclass(const MulticlassSvm& model, const SparseVector& x) {
    SignPattern s = sign_pattern(model.pairwise, x);
    const auto& row = model.table.counts[PatternTable::key(s)];
    std::uint64_t row_total = 0;
    for (std::uint64_t c : row) row_total += c;

    const auto& scores = row_total > 0 ? row : model.table.prior;
    int best = 0;
    for (int label = 1; label < 5; ++label)
        if (scores[label] > scores[best]) best = label;
    return best;
}

}  // namespace psvm
