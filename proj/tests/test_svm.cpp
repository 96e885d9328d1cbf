#include <cmath>
#include <sstream>

#include "doctest.h"
#include "psvm/errors.hpp"
#include "psvm/eval.hpp"
#include "psvm/model_io.hpp"
#include "psvm/svm.hpp"
#include "test_helpers.hpp"

using namespace psvm;
using psvm::testing::instance;
using psvm::testing::random_sparse;
using psvm::testing::sparse;

namespace {

BinarySvm linear_svm(DenseVector w, double bias) {
    BinarySvm svm;
    svm.model = LinearModel{std::move(w), bias};
    return svm;
}

// Four constant-sign models: decision is just the bias. The weight vector
// is wide enough for any synthetic-corpus feature index.
std::array<BinarySvm, 4> constant_models(const std::array<double, 4>& biases) {
    std::array<BinarySvm, 4> models;
    for (int j = 0; j < 4; ++j) models[j] = linear_svm(DenseVector(100, 0.0), biases[j]);
    return models;
}

std::vector<Instance> ordinal_instances(std::uint64_t seed, std::size_t n) {
    auto records = synth_corpus(seed, n, SynthSpec{});
    auto vocab = build_vocabulary(records);
    return make_instances(records, vocab, FeatureMode::Frequency);
}

}  // namespace

TEST_SUITE_BEGIN("svm");

TEST_CASE("fit_bias averages margin-violator residuals") {
    DenseVector w{2.0};
    std::vector<Instance> satisfied{instance(sparse({{0, 1}}), +1)};
    CHECK(fit_bias(w, satisfied) == 0.0);

    DenseVector w2{0.4};
    std::vector<Instance> single{instance(sparse({{0, 1}}), +1)};
    CHECK(fit_bias(w2, single) == doctest::Approx(0.6));

    // violators at w.x = +0.4 (y=+1) and w.x = -0.4 (y=-1) cancel
    DenseVector w3{0.4, -0.4};
    std::vector<Instance> symmetric{instance(sparse({{0, 1}}), +1),
                                    instance(sparse({{1, 1}}), -1)};
    CHECK(fit_bias(w3, symmetric) == doctest::Approx(0.0));
}

TEST_CASE("decision_value for linear and kernel models") {
    auto lin = linear_svm(DenseVector{1.0, -1.0}, 0.5);
    CHECK(decision_value(lin, sparse({{0, 1}})) == 1.5);

    // from the 1x1 Newton solve: beta = 0.5 on a unit-norm point
    std::vector<Instance> data{instance(sparse({{0, 1}}), +1)};
    NewtonConfig cfg;
    cfg.lambda = 1.0;
    cfg.kernel = KernelSpec::linear();
    BinarySvm kern;
    kern.model = newton_train(data, cfg);
    CHECK(decision_value(kern, sparse({{0, 1}})) == doctest::Approx(0.5).epsilon(1e-12));

    auto zero = linear_svm(DenseVector{0.0, 0.0}, 0.0);
    CHECK(decision_value(zero, sparse({{1, 3}})) == 0.0);
}

TEST_CASE("predict_binary is the inclusive sign of the decision value") {
    auto zero = linear_svm(DenseVector{0.0}, 0.0);
    CHECK(predict_binary(zero, sparse({{0, 1}})) == +1);  // E = 0 -> positive

    auto neg = linear_svm(DenseVector{0.0}, -0.001);
    CHECK(predict_binary(neg, sparse({{0, 1}})) == -1);

    auto pos = linear_svm(DenseVector{0.0}, 3.2);
    CHECK(predict_binary(pos, sparse({{0, 1}})) == +1);

    Rng rng(88);
    auto model = linear_svm(DenseVector{0.7, -1.3, 0.2}, 0.1);
    for (int i = 0; i < 1000; ++i) {
        auto x = random_sparse(rng, 3, 3, -2.0, 2.0);
        CHECK(predict_binary(model, x) == (decision_value(model, x) >= 0.0 ? +1 : -1));
    }
}

TEST_CASE("build_pattern_table counts patterns and the prior") {
    auto models = constant_models({1.0, 1.0, 1.0, 1.0});  // always (+,+,+,+)
    std::vector<Instance> one{instance(sparse({{0, 1}}), +1)};
    one[0].sentiment = 4;
    auto table = build_pattern_table(models, one);
    auto key = PatternTable::key({+1, +1, +1, +1});
    CHECK(table.counts[key] == std::array<std::uint64_t, 5>{0, 0, 0, 0, 1});
    CHECK(table.prior == std::array<std::uint64_t, 5>{0, 0, 0, 0, 1});

    std::vector<Instance> two{instance(sparse({{0, 1}}), +1),
                              instance(sparse({{0, 2}}), +1)};
    two[0].sentiment = 3;
    two[1].sentiment = 4;
    table = build_pattern_table(models, two);
    CHECK(table.counts[key] == std::array<std::uint64_t, 5>{0, 0, 0, 1, 1});

    // totals over all patterns equal n
    auto data = ordinal_instances(21, 120);
    auto mixed = constant_models({1.0, -1.0, 1.0, -1.0});
    table = build_pattern_table(mixed, data);
    std::uint64_t total = 0;
    for (const auto& row : table.counts)
        for (auto c : row) total += c;
    CHECK(total == data.size());
}

TEST_CASE("predict_multiclass argmax, prior fallback, and tie rule") {
    MulticlassSvm model;
    model.pairwise = constant_models({1.0, 1.0, 1.0, 1.0});
    auto seen = PatternTable::key({+1, +1, +1, +1});

    model.table.counts[seen] = {0, 0, 5, 1, 0};
    model.table.prior = {10, 20, 40, 20, 10};
    CHECK(predict_multiclass(model, sparse({{0, 1}})) == 2);

    // the produced pattern has an all-zero row -> argmax(prior)
    model.table.counts[seen] = {0, 0, 0, 0, 0};
    CHECK(predict_multiclass(model, sparse({{0, 1}})) == 2);
    model.table.prior = {10, 20, 5, 20, 10};
    CHECK(predict_multiclass(model, sparse({{0, 1}})) == 1);  // tie 20/20 -> lower

    model.table.counts[seen] = {3, 3, 0, 0, 0};
    CHECK(predict_multiclass(model, sparse({{0, 1}})) == 0);
}

TEST_CASE("train_multiclass builds four models over adjacent pairs") {
    auto data = ordinal_instances(31, 400);
    GdConfig gd;
    gd.max_iters = 3;
    auto model = train_multiclass(data, 100, gd);

    // pair restriction: model j must equal gd trained on just its subset
    for (int pair = 0; pair < 4; ++pair) {
        std::vector<Instance> subset;
        for (const auto& inst : data) {
            if (inst.sentiment != pair && inst.sentiment != pair + 1) continue;
            Instance relabeled = inst;
            relabeled.binary_label = inst.sentiment == pair + 1 ? +1 : -1;
            subset.push_back(relabeled);
        }
        auto direct = gd_train(subset, 100, gd);
        double bias = fit_bias(direct.w, subset);
        REQUIRE(model.pairwise[pair].is_linear());
        CHECK(model.pairwise[pair].linear().w == direct.w);
        CHECK(model.pairwise[pair].linear().bias == bias);
    }

    std::uint64_t prior_total = 0;
    for (auto c : model.table.prior) prior_total += c;
    CHECK(prior_total == data.size());
}

TEST_CASE("train_multiclass names the pair whose class is missing") {
    auto data = ordinal_instances(32, 300);
    std::erase_if(data, [](const Instance& i) { return i.sentiment == 2; });
    GdConfig gd;
    gd.max_iters = 1;
    CHECK_THROWS_WITH_AS(train_multiclass(data, 100, gd), doctest::Contains("(1,2)"),
                         TrainError);
}

TEST_CASE("pairwise pegasos models separate their own pair subsets") {
    auto records = synth_corpus(33, 1000, SynthSpec{});
    auto vocab = build_vocabulary(records);
    auto data = make_instances(records, vocab, FeatureMode::Frequency);
    PegasosConfig peg;
    peg.lambda = 1e-3;
    peg.k = 20;
    peg.T = 1000;
    peg.seed = 5;
    auto model = train_multiclass(data, vocab.size(), peg);

    for (int pair = 0; pair < 4; ++pair) {
        std::size_t hits = 0, total = 0;
        for (const auto& inst : data) {
            if (inst.sentiment != pair && inst.sentiment != pair + 1) continue;
            int truth = inst.sentiment == pair + 1 ? +1 : -1;
            if (predict_binary(model.pairwise[pair], inst.features) == truth) ++hits;
            ++total;
        }
        REQUIRE(total > 0);
        CHECK(static_cast<double>(hits) / static_cast<double>(total) >= 0.9);
    }
}

TEST_CASE("multiclass training instances recover their pattern-row majority") {
    auto data = ordinal_instances(34, 500);
    PegasosConfig peg;
    peg.lambda = 1e-3;
    peg.k = 10;
    peg.T = 400;
    auto model = train_multiclass(data, 100, peg);

    for (const auto& inst : data) {
        auto s = sign_pattern(model.pairwise, inst.features);
        const auto& row = model.table.counts[PatternTable::key(s)];
        int majority = 0;
        for (int label = 1; label < 5; ++label)
            if (row[label] > row[majority]) majority = label;
        CHECK(predict_multiclass(model, inst.features) == majority);
    }
}

TEST_CASE("binary pegasos generalizes on the synthetic corpus") {
    auto records = synth_corpus(35, 1000, SynthSpec{});
    auto [train_idx, test_idx] = split_round(records.size(), 77, 0.1);

    std::vector<RawRecord> train_records, test_records;
    for (auto i : train_idx) train_records.push_back(records[i]);
    for (auto i : test_idx) test_records.push_back(records[i]);

    auto vocab = build_vocabulary(train_records);
    auto train = make_instances(train_records, vocab, FeatureMode::Frequency);
    auto test = make_instances(test_records, vocab, FeatureMode::Frequency);

    PegasosConfig peg;
    peg.lambda = 1e-3;
    peg.k = 20;
    peg.T = 2000;
    auto model = train_binary(train, vocab.size(), peg);

    std::size_t hits = 0;
    for (const auto& inst : test)
        if (predict_binary(model, inst.features) == inst.binary_label) ++hits;
    CHECK(static_cast<double>(hits) / static_cast<double>(test.size()) >= 0.95);
}

TEST_CASE("model save/load round trip preserves predictions") {
    auto records = synth_corpus(36, 300, SynthSpec{});
    auto vocab = build_vocabulary(records);
    auto data = make_instances(records, vocab, FeatureMode::Frequency);
    Rng rng(99);

    auto check_roundtrip = [&](const SavedModel& saved) {
        std::stringstream buffer;
        save_model(buffer, saved);
        SavedModel loaded = load_model(buffer);
        CHECK(loaded.vocab.index_to_word == saved.vocab.index_to_word);
        for (int i = 0; i < 100; ++i) {
            auto x = random_sparse(rng, static_cast<std::uint32_t>(vocab.size()), 8, 0.5, 3.0);
            if (saved.mode == TaskMode::Binary) {
                CHECK(decision_value(loaded.binary(), x) ==
                      decision_value(saved.binary(), x));
                CHECK(predict_binary(loaded.binary(), x) ==
                      predict_binary(saved.binary(), x));
            } else {
                CHECK(predict_multiclass(loaded.multiclass(), x) ==
                      predict_multiclass(saved.multiclass(), x));
            }
        }
    };

    PegasosConfig peg;
    peg.T = 200;
    peg.k = 5;
    SavedModel linear_saved;
    linear_saved.mode = TaskMode::Binary;
    linear_saved.features = FeatureMode::Frequency;
    linear_saved.vocab = vocab;
    linear_saved.model = train_binary(data, vocab.size(), peg);
    check_roundtrip(linear_saved);

    NewtonConfig newton;
    newton.lambda = 0.5;
    newton.kernel = KernelSpec::rbf(1.0);
    std::vector<Instance> small(data.begin(), data.begin() + 60);
    SavedModel kernel_saved;
    kernel_saved.mode = TaskMode::Binary;
    kernel_saved.features = FeatureMode::Frequency;
    kernel_saved.vocab = vocab;
    kernel_saved.model = train_binary(small, vocab.size(), newton);
    check_roundtrip(kernel_saved);

    SavedModel multi_saved;
    multi_saved.mode = TaskMode::Multiclass;
    multi_saved.features = FeatureMode::Frequency;
    multi_saved.vocab = vocab;
    multi_saved.model = train_multiclass(data, vocab.size(), peg);
    check_roundtrip(multi_saved);
}

TEST_CASE("model loader rejects foreign files and versions") {
    std::stringstream not_model("something else\n");
    CHECK_THROWS_AS(load_model(not_model), ParseError);

    std::stringstream future("psvm-model 2\nmode bin\n");
    CHECK_THROWS_WITH_AS(load_model(future), doctest::Contains("version"), ParseError);
}

TEST_SUITE_END();
