#include "psvm/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "psvm/errors.hpp"

namespace psvm {

namespace {

constexpr int kFormatVersion = 1;

// 17 significant digits round-trip any IEEE double exactly.
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void malformed(const std::string& why) {
    throw ParseError("model file: " + why);
}

std::string expect_token(std::istream& in, const char* what) {
    std::string tok;
    if (!(in >> tok)) malformed(std::string("missing ") + what);
    return tok;
}

template <typename T>
T expect_value(std::istream& in, const char* what) {
    T v{};
    if (!(in >> v)) malformed(std::string("bad ") + what);
    return v;
}

void write_binary_svm(std::ostream& out, const BinarySvm& svm) {
    if (svm.is_linear()) {
        const auto& lin = svm.linear();
        out << "linear\nbias " << fmt(lin.bias) << "\ndim " << lin.w.size() << "\nw";
        for (double v : lin.w) out << ' ' << fmt(v);
        out << '\n';
    } else {
        const auto& k = svm.kernel();
        if (k.kernel.kind == KernelSpec::Kind::Linear)
            out << "kernel linear\n";
        else
            out << "kernel rbf " << fmt(k.kernel.sigma) << '\n';
        out << "ntrain " << k.beta.size() << "\nnsv " << k.sv_indices.size() << '\n';
        for (std::uint32_t i : k.sv_indices) {
            const auto& x = k.train_refs[i];
            out << i << ' ' << fmt(k.beta[i]) << ' ' << x.nnz();
            for (const auto& e : x.entries) out << ' ' << e.index << ' ' << fmt(e.value);
            out << '\n';
        }
    }
}

BinarySvm read_binary_svm(std::istream& in) {
    BinarySvm svm;
    std::string kind = expect_token(in, "model kind");
    if (kind == "linear") {
        LinearModel lin;
        if (expect_token(in, "bias tag") != "bias") malformed("expected `bias`");
        lin.bias = expect_value<double>(in, "bias");
        if (expect_token(in, "dim tag") != "dim") malformed("expected `dim`");
        auto dim = expect_value<std::size_t>(in, "dim");
        if (expect_token(in, "w tag") != "w") malformed("expected `w`");
        lin.w.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) lin.w[i] = expect_value<double>(in, "weight");
        svm.model = std::move(lin);
    } else if (kind == "kernel") {
        KernelTrainResult k;
        std::string ktype = expect_token(in, "kernel type");
        if (ktype == "linear") {
            k.kernel = KernelSpec::linear();
        } else if (ktype == "rbf") {
            k.kernel = KernelSpec::rbf(expect_value<double>(in, "sigma"));
        } else {
            malformed("unknown kernel type `" + ktype + "`");
        }
        if (expect_token(in, "ntrain tag") != "ntrain") malformed("expected `ntrain`");
        auto n_train = expect_value<std::size_t>(in, "ntrain");
        if (expect_token(in, "nsv tag") != "nsv") malformed("expected `nsv`");
        auto n_sv = expect_value<std::size_t>(in, "nsv");
        if (n_sv > n_train) malformed("nsv exceeds ntrain");
        k.beta.assign(n_train, 0.0);
        k.train_refs.assign(n_train, SparseVector{});
        k.sv_indices.reserve(n_sv);
        for (std::size_t s = 0; s < n_sv; ++s) {
            auto idx = expect_value<std::uint32_t>(in, "sv index");
            if (idx >= n_train) malformed("sv index out of range");
            double beta = expect_value<double>(in, "beta");
            auto nnz = expect_value<std::size_t>(in, "sv nnz");
            SparseVector x;
            x.entries.reserve(nnz);
            for (std::size_t e = 0; e < nnz; ++e) {
                auto col = expect_value<std::uint32_t>(in, "sv entry index");
                double val = expect_value<double>(in, "sv entry value");
                x.entries.push_back({col, val});
            }
            k.sv_indices.push_back(idx);
            k.beta[idx] = beta;
            k.train_refs[idx] = std::move(x);
        }
        k.converged = true;  // persisted models are final
        svm.model = std::move(k);
    } else {
        malformed("unknown model kind `" + kind + "`");
    }
    return svm;
}

}  // namespace

void save_model(std::ostream& out, const SavedModel& saved) {
    out << "psvm-model " << kFormatVersion << '\n';
    out << "mode " << (saved.mode == TaskMode::Binary ? "bin" : "multi") << '\n';
    out << "features " << (saved.features == FeatureMode::Binary ? "bin" : "freq") << '\n';
    out << "vocab " << saved.vocab.size() << '\n';
    for (const auto& word : saved.vocab.index_to_word) out << word << '\n';

    if (saved.mode == TaskMode::Binary) {
        write_binary_svm(out, saved.binary());
    } else {
        const auto& mc = saved.multiclass();
        for (const auto& pairwise : mc.pairwise) write_binary_svm(out, pairwise);
        out << "table\n";
        for (const auto& row : mc.table.counts) {
            for (std::size_t l = 0; l < 5; ++l) out << (l ? " " : "") << row[l];
            out << '\n';
        }
        out << "prior";
        for (auto p : mc.table.prior) out << ' ' << p;
        out << '\n';
    }
}

void save_model_file(const std::string& path, const SavedModel& saved) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write model file: " + path);
    save_model(out, saved);
    out.flush();
    if (!out) throw ParseError("error writing model file: " + path);
}

SavedModel load_model(std::istream& in) {
    if (expect_token(in, "magic") != "psvm-model") malformed("not a psvm model file");
    auto version = expect_value<int>(in, "version");
    if (version != kFormatVersion)
        malformed("unsupported version " + std::to_string(version) + ", expected " +
                  std::to_string(kFormatVersion));

    SavedModel saved;
    if (expect_token(in, "mode tag") != "mode") malformed("expected `mode`");
    std::string mode = expect_token(in, "mode");
    if (mode == "bin")
        saved.mode = TaskMode::Binary;
    else if (mode == "multi")
        saved.mode = TaskMode::Multiclass;
    else
        malformed("unknown mode `" + mode + "`");

    if (expect_token(in, "features tag") != "features") malformed("expected `features`");
    std::string features = expect_token(in, "feature mode");
    if (features == "bin")
        saved.features = FeatureMode::Binary;
    else if (features == "freq")
        saved.features = FeatureMode::Frequency;
    else
        malformed("unknown feature mode `" + features + "`");

    if (expect_token(in, "vocab tag") != "vocab") malformed("expected `vocab`");
    auto vocab_size = expect_value<std::size_t>(in, "vocab size");
    for (std::size_t i = 0; i < vocab_size; ++i) {
        std::string word = expect_token(in, "vocab word");
        saved.vocab.word_to_index.emplace(word, static_cast<std::uint32_t>(i));
        saved.vocab.index_to_word.push_back(std::move(word));
    }

    if (saved.mode == TaskMode::Binary) {
        saved.model = read_binary_svm(in);
    } else {
        MulticlassSvm mc;
        for (auto& pairwise : mc.pairwise) pairwise = read_binary_svm(in);
        if (expect_token(in, "table tag") != "table") malformed("expected `table`");
        for (auto& row : mc.table.counts)
            for (auto& cell : row) cell = expect_value<std::uint64_t>(in, "table count");
        if (expect_token(in, "prior tag") != "prior") malformed("expected `prior`");
        for (auto& p : mc.table.prior) p = expect_value<std::uint64_t>(in, "prior count");
        saved.model = std::move(mc);
    }
    return saved;
}

SavedModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open model file: " + path);
    return load_model(in);
}

}  // namespace psvm
