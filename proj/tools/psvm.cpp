// Command-line front end: dataset statistics, training, prediction,
// cross validation, parameter sweeps, and synthetic corpus generation.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 training error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "psvm/corpus.hpp"
#include "psvm/errors.hpp"
#include "psvm/eval.hpp"
#include "psvm/model_io.hpp"
#include "psvm/svm.hpp"

namespace {

using nlohmann::json;
using namespace psvm;

struct Options {
    std::string data_path;
    std::string model_path;
    std::string out_path;
    std::string alg = "pegasos";
    std::string mode = "bin";
    std::string features = "bin";
    std::string kernel = "rbf";
    std::string param;
    std::string grid = "paper";
    double eta = 0.001;
    int iters = 100;
    double gd_reg = 0.0;
    double lambda = 0.001;
    std::size_t k = 1;
    std::size_t T = 2000;
    double sigma = 1.0;
    int rounds = 10;
    double holdout = 0.1;
    std::uint64_t seed = 42;
    bool json_out = false;
    bool force = false;
    std::size_t synth_n = 1000;
    SynthSpec synth;
};

// Four decimals with no leading zero: ".7328" rather than "0.7328".
std::string fmt_accuracy(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", a);
    std::string s = buf;
    if (s.size() > 1 && s[0] == '0' && s[1] == '.') s.erase(0, 1);
    return s;
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", s);
    return buf;
}

FeatureMode parse_features(const std::string& s) {
    if (s == "bin") return FeatureMode::Binary;
    if (s == "freq") return FeatureMode::Frequency;
    throw UsageError("unknown feature mode `" + s + "` (expected bin or freq)");
}

TaskMode parse_mode(const std::string& s) {
    if (s == "bin") return TaskMode::Binary;
    if (s == "multi") return TaskMode::Multiclass;
    throw UsageError("unknown mode `" + s + "` (expected bin or multi)");
}

OptimizerConfig make_optimizer(const Options& opt) {
    if (opt.alg == "gd") {
        GdConfig cfg;
        cfg.eta = opt.eta;
        cfg.max_iters = opt.iters;
        cfg.reg = opt.gd_reg;
        return cfg;
    }
    if (opt.alg == "newton") {
        NewtonConfig cfg;
        cfg.lambda = opt.lambda;
        if (opt.kernel == "linear")
            cfg.kernel = KernelSpec::linear();
        else if (opt.kernel == "rbf")
            cfg.kernel = KernelSpec::rbf(opt.sigma);
        else
            throw UsageError("unknown kernel `" + opt.kernel + "` (expected linear or rbf)");
        if (opt.force) cfg.max_n = static_cast<std::size_t>(-1);
        return cfg;
    }
    if (opt.alg == "pegasos") {
        PegasosConfig cfg;
        cfg.lambda = opt.lambda;
        cfg.k = opt.k;
        cfg.T = opt.T;
        cfg.seed = opt.seed;
        return cfg;
    }
    throw UsageError("unknown algorithm `" + opt.alg + "` (expected gd, newton, pegasos)");
}

ModelSpec make_spec(const Options& opt) {
    ModelSpec spec;
    spec.mode = parse_mode(opt.mode);
    spec.features = parse_features(opt.features);
    spec.optimizer = make_optimizer(opt);
    return spec;
}

json optimizer_json(const OptimizerConfig& cfg) {
    json j;
    switch (algorithm_of(cfg)) {
        case Algorithm::Gd: {
            const auto& gd = std::get<GdConfig>(cfg);
            j = {{"alg", "gd"}, {"eta", gd.eta}, {"max_iters", gd.max_iters},
                 {"rel_tol", gd.rel_tol}, {"reg", gd.reg}};
            break;
        }
        case Algorithm::Newton: {
            const auto& nt = std::get<NewtonConfig>(cfg);
            j = {{"alg", "newton"},
                 {"lambda", nt.lambda},
                 {"kernel", nt.kernel.kind == KernelSpec::Kind::Linear ? "linear" : "rbf"},
                 {"sigma", nt.kernel.sigma},
                 {"base_size", nt.base_size},
                 {"max_newton_iters", nt.max_newton_iters},
                 {"max_n", nt.max_n}};
            break;
        }
        case Algorithm::Pegasos: {
            const auto& peg = std::get<PegasosConfig>(cfg);
            j = {{"alg", "pegasos"}, {"lambda", peg.lambda}, {"k", peg.k},
                 {"T", peg.T}, {"seed", peg.seed}};
            break;
        }
    }
    return j;
}

json report_json(const Options& opt, const CvReport& report) {
    json rounds = json::array();
    for (const auto& r : report.per_round)
        rounds.push_back({{"accuracy", r.accuracy}, {"train_seconds", r.train_seconds}});
    return {{"alg", opt.alg},
            {"mode", opt.mode},
            {"features", opt.features},
            {"mean_accuracy", report.mean_accuracy},
            {"mean_train_seconds", report.mean_train_seconds},
            {"rounds", rounds},
            {"cv", {{"rounds", report.cv_echo.rounds},
                    {"holdout", report.cv_echo.holdout_fraction},
                    {"seed", report.cv_echo.seed}}},
            {"optimizer", optimizer_json(report.spec_echo.optimizer)}};
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw ParseError("cannot write output file: " + path);
    return file;
}

int cmd_stats(const Options& opt) {
    auto records = parse_tsv_file(opt.data_path);
    if (records.empty()) throw ParseError("no data rows in " + opt.data_path);
    auto vocab = build_vocabulary(records);
    auto instances = make_instances(records, vocab, FeatureMode::Frequency);
    auto stats = corpus_stats(instances, vocab);

    char buf[64];
    std::cout << "instances\t" << stats.n_instances << '\n';
    std::cout << "distinct_words\t" << stats.n_distinct_words << '\n';
    std::snprintf(buf, sizeof(buf), "%.2f", stats.avg_words_per_phrase);
    std::cout << "avg_words_per_phrase\t" << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.2f", stats.avg_phrases_per_word);
    std::cout << "avg_phrases_per_word\t" << buf << '\n';
    return 0;
}

int cmd_train(const Options& opt) {
    auto records = parse_tsv_file(opt.data_path);
    if (records.empty()) throw ParseError("no data rows in " + opt.data_path);
    ModelSpec spec = make_spec(opt);

    SavedModel saved;
    saved.mode = spec.mode;
    saved.features = spec.features;
    saved.vocab = build_vocabulary(records);
    auto instances = make_instances(records, saved.vocab, spec.features);

    if (spec.mode == TaskMode::Binary)
        saved.model = train_binary(instances, saved.vocab.size(), spec.optimizer);
    else
        saved.model = train_multiclass(instances, saved.vocab.size(), spec.optimizer);

    if (opt.out_path.empty()) throw UsageError("train requires --out <model path>");
    save_model_file(opt.out_path, saved);
    std::cerr << "model written to " << opt.out_path << '\n';
    return 0;
}

int cmd_predict(const Options& opt) {
    SavedModel saved = load_model_file(opt.model_path);
    auto records = parse_tsv_file(opt.data_path);

    std::ofstream file;
    std::ostream& out = open_out(file, opt.out_path);
    out << "PhraseId\tPredictedLabel\n";
    for (const auto& rec : records) {
        SparseVector x = featurize(tokenize(rec.phrase), saved.vocab, saved.features);
        int label = saved.mode == TaskMode::Binary
                        ? predict_binary(saved.binary(), x)
                        : predict_multiclass(saved.multiclass(), x);
        out << rec.phrase_id << '\t' << label << '\n';
    }
    return 0;
}

int cmd_cv(const Options& opt) {
    auto records = parse_tsv_file(opt.data_path);
    ModelSpec spec = make_spec(opt);
    CvConfig cv{opt.rounds, opt.holdout, opt.seed};
    CvReport report = cross_validate(records, spec, cv);

    if (opt.json_out) {
        std::cout << report_json(opt, report).dump(2) << '\n';
    } else {
        std::cout << opt.alg << '\t' << opt.mode << '\t' << opt.features << '\t'
                  << fmt_accuracy(report.mean_accuracy) << '\t'
                  << fmt_seconds(report.mean_train_seconds) << '\n';
    }
    return 0;
}

int cmd_sweep(const Options& opt) {
    auto records = parse_tsv_file(opt.data_path);
    ModelSpec spec = make_spec(opt);
    CvConfig cv{opt.rounds, opt.holdout, opt.seed};

    SweepGrid grid;
    grid.parameter = opt.param;
    if (opt.grid == "paper") {
        grid.values = paper_grid(opt.param);
    } else {
        std::stringstream ss(opt.grid);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) grid.values.push_back(std::stod(item));
        if (grid.values.empty())
            throw UsageError("empty sweep grid `" + opt.grid + "`");
    }

    SweepResult result = sweep(records, spec, grid, cv);
    if (opt.json_out) {
        json cells = json::array();
        for (const auto& cell : result.cells) {
            json c = {{"value", cell.value}};
            if (cell.report) {
                c["mean_accuracy"] = cell.report->mean_accuracy;
                c["mean_train_seconds"] = cell.report->mean_train_seconds;
            } else {
                c["error"] = cell.error;
            }
            cells.push_back(std::move(c));
        }
        json j = {{"parameter", grid.parameter}, {"cells", cells}};
        if (result.best_index >= 0) {
            j["best_value"] = result.cells[result.best_index].value;
            j["best_accuracy"] = result.cells[result.best_index].report->mean_accuracy;
        }
        std::cout << j.dump(2) << '\n';
    } else {
        for (const auto& cell : result.cells) {
            std::cout << grid.parameter << '\t' << cell.value << '\t';
            if (cell.report)
                std::cout << fmt_accuracy(cell.report->mean_accuracy) << '\t'
                          << fmt_seconds(cell.report->mean_train_seconds) << '\n';
            else
                std::cout << "ERROR\t" << cell.error << '\n';
        }
        if (result.best_index >= 0) {
            const auto& best = result.cells[result.best_index];
            std::cout << "best\t" << grid.parameter << '=' << best.value << "\taccuracy="
                      << fmt_accuracy(best.report->mean_accuracy) << '\n';
        } else {
            std::cout << "best\tnone\n";
        }
    }
    return 0;
}

int cmd_synth(const Options& opt) {
    auto records = synth_corpus(opt.seed, opt.synth_n, opt.synth);
    std::ofstream file;
    std::ostream& out = open_out(file, opt.out_path);
    write_tsv(out, records);
    out.flush();
    if (!out) throw ParseError("error writing " + opt.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"primal SVM toolkit: gradient descent, kernel Newton, and Pegasos "
                 "trainers over bag-of-words text features"};
    app.require_subcommand(1);
    Options opt;

    auto add_data = [&](CLI::App* cmd) {
        cmd->add_option("--data", opt.data_path, "TSV data file")->required();
    };
    auto add_run_spec = [&](CLI::App* cmd) {
        cmd->add_option("--alg", opt.alg, "gd|newton|pegasos");
        cmd->add_option("--mode", opt.mode, "bin|multi");
        cmd->add_option("--features", opt.features, "bin|freq");
        cmd->add_option("--eta", opt.eta, "gd learning rate");
        cmd->add_option("--iters", opt.iters, "gd max iterations");
        cmd->add_option("--gd-reg", opt.gd_reg, "optional gd L2 coefficient");
        cmd->add_option("--lambda", opt.lambda, "regularization (pegasos, newton)");
        cmd->add_option("--k", opt.k, "pegasos subset size");
        cmd->add_option("--T", opt.T, "pegasos iterations");
        cmd->add_option("--kernel", opt.kernel, "newton kernel: linear|rbf");
        cmd->add_option("--sigma", opt.sigma, "rbf width");
        cmd->add_option("--seed", opt.seed, "PRNG seed (default 42)");
        cmd->add_flag("--force", opt.force, "lift the newton size cap");
    };

    auto* stats = app.add_subcommand("stats", "corpus statistics table");
    add_data(stats);

    auto* train = app.add_subcommand("train", "train a model and save it");
    add_data(train);
    add_run_spec(train);
    train->add_option("--out", opt.out_path, "model output path")->required();

    auto* predict = app.add_subcommand("predict", "predict labels with a saved model");
    predict->add_option("--model", opt.model_path, "model file")->required();
    add_data(predict);
    predict->add_option("--out", opt.out_path, "predictions output path (default stdout)");

    auto* cv = app.add_subcommand("cv", "repeated random-holdout cross validation");
    add_data(cv);
    add_run_spec(cv);
    cv->add_option("--rounds", opt.rounds, "CV rounds (default 10)");
    cv->add_option("--holdout", opt.holdout, "holdout fraction (default 0.1)");
    cv->add_flag("--json", opt.json_out, "emit JSON with per-round detail");

    auto* sweep = app.add_subcommand("sweep", "cross-validate over a parameter grid");
    add_data(sweep);
    add_run_spec(sweep);
    sweep->add_option("--param", opt.param, "eta|iters|lambda|k|T|sigma")->required();
    sweep->add_option("--grid", opt.grid, "`paper` or comma-separated values");
    sweep->add_option("--rounds", opt.rounds, "CV rounds per cell");
    sweep->add_option("--holdout", opt.holdout, "holdout fraction");
    sweep->add_flag("--json", opt.json_out, "emit JSON");

    auto* synth = app.add_subcommand("synth", "generate a deterministic synthetic corpus");
    synth->add_option("--n", opt.synth_n, "number of phrases");
    synth->add_option("--seed", opt.seed, "PRNG seed");
    synth->add_option("--n-pos", opt.synth.n_pos, "positive lexicon size");
    synth->add_option("--n-neg", opt.synth.n_neg, "negative lexicon size");
    synth->add_option("--n-neutral", opt.synth.n_neutral, "neutral lexicon size");
    synth->add_option("--len-min", opt.synth.len_min, "min phrase length");
    synth->add_option("--len-max", opt.synth.len_max, "max phrase length");
    synth->add_option("--out", opt.out_path, "output TSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (app.got_subcommand(stats)) return cmd_stats(opt);
        if (app.got_subcommand(train)) return cmd_train(opt);
        if (app.got_subcommand(predict)) return cmd_predict(opt);
        if (app.got_subcommand(cv)) return cmd_cv(opt);
        if (app.got_subcommand(sweep)) return cmd_sweep(opt);
        if (app.got_subcommand(synth)) return cmd_synth(opt);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const TrainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
