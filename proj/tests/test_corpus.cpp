#include <sstream>

#include "doctest.h"
#include "psvm/corpus.hpp"
#include "psvm/errors.hpp"
#include "test_helpers.hpp"

using namespace psvm;

namespace {

const char* kHeader = "PhraseId\tSentenceId\tPhrase\tSentiment\n";

std::vector<RawRecord> parse(const std::string& body) {
    std::istringstream in(kHeader + body);
    return parse_tsv(in);
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

std::string to_tsv(const std::vector<RawRecord>& records) {
    std::ostringstream os;
    write_tsv(os, records);
    return os.str();
}

}  // namespace

TEST_SUITE_BEGIN("corpus");

TEST_CASE("parse_tsv reads well-formed lines in order") {
    auto records = parse("1\t1\tgood movie\t3\n2\t1\tbad\t0\n");
    REQUIRE(records.size() == 2);
    CHECK(records[0].phrase_id == 1);
    CHECK(records[0].sentence_id == 1);
    CHECK(records[0].phrase == "good movie");
    CHECK(records[0].sentiment == 3);
    CHECK(records[1].phrase == "bad");
}

TEST_CASE("parse_tsv tolerates CRLF line endings") {
    std::istringstream in("PhraseId\tSentenceId\tPhrase\tSentiment\r\n1\t1\tok\t2\r\n");
    auto records = parse_tsv(in);
    REQUIRE(records.size() == 1);
    CHECK(records[0].phrase == "ok");
}

TEST_CASE("parse_tsv rejects malformed lines with the line number") {
    CHECK_THROWS_WITH_AS(parse("1\t1\tgood\t7\n"), doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_WITH_AS(parse("1\t1\tgood\n"), doctest::Contains("4 tab-separated"),
                         ParseError);
    CHECK_THROWS_WITH_AS(parse("x\t1\tgood\t3\n"), doctest::Contains("PhraseId"), ParseError);
    CHECK_THROWS_WITH_AS(parse("1\t1\tgood\tx\n"), doctest::Contains("Sentiment"), ParseError);
    CHECK_THROWS_WITH_AS(parse("1\t1\ta\t3\n1\t2\tb\t3\n"), doctest::Contains("duplicate"),
                         ParseError);
    std::istringstream bad_header("Nope\n1\t1\tok\t2\n");
    CHECK_THROWS_AS(parse_tsv(bad_header), ParseError);
}

TEST_CASE("tokenize lowercases and strips punctuation") {
    CHECK(tokenize("Good, GREAT movie!") ==
          std::vector<std::string>{"good", "great", "movie"});
    CHECK(tokenize("...") == std::vector<std::string>{});
    CHECK(tokenize("it's so-so") == std::vector<std::string>{"its", "soso"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("  spaced\tout \n words ") ==
          std::vector<std::string>{"spaced", "out", "words"});
}

TEST_CASE("tokenize is idempotent over join") {
    for (const char* phrase :
         {"Good, GREAT movie!", "it's so-so", "A (quoted) \"thing\"; really?",
          "one two three", "--- ... ---", "Mixed CASE with-dashes and 'quotes'"}) {
        auto once = tokenize(phrase);
        CHECK(tokenize(join(once)) == once);
    }
}

TEST_CASE("build_vocabulary assigns indices by first appearance") {
    auto records = parse("1\t1\tgood movie\t3\n2\t1\tbad movie\t0\n");
    auto vocab = build_vocabulary(records);
    REQUIRE(vocab.size() == 3);
    CHECK(vocab.lookup("good") == 0);
    CHECK(vocab.lookup("movie") == 1);
    CHECK(vocab.lookup("bad") == 2);
    CHECK(vocab.lookup("unseen") == -1);
    CHECK(vocab.index_to_word == std::vector<std::string>{"good", "movie", "bad"});
}

TEST_CASE("build_vocabulary collapses repeated tokens") {
    auto vocab = build_vocabulary(parse("1\t1\ta a a\t2\n"));
    CHECK(vocab.size() == 1);
    CHECK(vocab.lookup("a") == 0);
}

TEST_CASE("build_vocabulary rejects an empty token universe") {
    CHECK_THROWS_AS(build_vocabulary(parse("1\t1\t...\t2\n")), ParseError);
}

TEST_CASE("featurize counts or marks tokens and skips unknown words") {
    auto vocab = build_vocabulary(parse("1\t1\tgood bad\t2\n"));
    std::vector<std::string> tokens{"good", "good", "bad"};

    auto freq = featurize(tokens, vocab, FeatureMode::Frequency);
    REQUIRE(freq.nnz() == 2);
    CHECK(freq.entries[0].index == 0);
    CHECK(freq.entries[0].value == 2.0);
    CHECK(freq.entries[1].index == 1);
    CHECK(freq.entries[1].value == 1.0);

    auto bin = featurize(tokens, vocab, FeatureMode::Binary);
    REQUIRE(bin.nnz() == 2);
    CHECK(bin.entries[0].value == 1.0);
    CHECK(bin.entries[1].value == 1.0);

    CHECK(featurize({"unseen"}, vocab, FeatureMode::Binary).empty());
}

TEST_CASE("binarize_label splits at sentiment 3") {
    CHECK(binarize_label(0) == -1);
    CHECK(binarize_label(1) == -1);
    CHECK(binarize_label(2) == -1);
    CHECK(binarize_label(3) == +1);
    CHECK(binarize_label(4) == +1);
    CHECK_THROWS_AS(binarize_label(5), ParseError);
    CHECK_THROWS_AS(binarize_label(-1), ParseError);
}

TEST_CASE("corpus_stats over the two-phrase corpus") {
    auto records = parse("1\t1\tgood movie\t3\n2\t1\tbad movie\t0\n");
    auto vocab = build_vocabulary(records);
    auto instances = make_instances(records, vocab, FeatureMode::Frequency);
    auto stats = corpus_stats(instances, vocab);
    CHECK(stats.n_instances == 2);
    CHECK(stats.n_distinct_words == 3);
    CHECK(stats.avg_words_per_phrase == doctest::Approx(2.0));
    CHECK(stats.avg_phrases_per_word == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("synth_corpus is bit-identical for equal seeds") {
    SynthSpec spec;
    auto a = synth_corpus(99, 150, spec);
    auto b = synth_corpus(99, 150, spec);
    CHECK(to_tsv(a) == to_tsv(b));
    auto c = synth_corpus(100, 150, spec);
    CHECK(to_tsv(a) != to_tsv(c));
}

TEST_CASE("synth sentiment follows the word-balance thresholds") {
    CHECK(synth_sentiment_from_balance(5) == 4);
    CHECK(synth_sentiment_from_balance(2) == 4);
    CHECK(synth_sentiment_from_balance(1) == 3);
    CHECK(synth_sentiment_from_balance(0) == 2);
    CHECK(synth_sentiment_from_balance(-1) == 1);
    CHECK(synth_sentiment_from_balance(-2) == 0);
    CHECK(synth_sentiment_from_balance(-9) == 0);

    // Every generated record's label must match a recount of its words.
    for (const auto& rec : synth_corpus(7, 300, SynthSpec{})) {
        long balance = 0;
        for (const auto& token : tokenize(rec.phrase)) {
            if (token.rfind("pos", 0) == 0) ++balance;
            if (token.rfind("neg", 0) == 0) --balance;
        }
        CHECK(rec.sentiment == synth_sentiment_from_balance(balance));
    }
}

TEST_CASE("synth output round-trips through parse_tsv") {
    auto records = synth_corpus(3, 80, SynthSpec{});
    std::istringstream in(to_tsv(records));
    auto reparsed = parse_tsv(in);
    REQUIRE(reparsed.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(reparsed[i].phrase_id == records[i].phrase_id);
        CHECK(reparsed[i].phrase == records[i].phrase);
        CHECK(reparsed[i].sentiment == records[i].sentiment);
    }
}

TEST_CASE("featurization invariants hold over a generated corpus") {
    auto records = synth_corpus(11, 200, SynthSpec{});
    auto vocab = build_vocabulary(records);
    for (const auto& rec : records) {
        auto tokens = tokenize(rec.phrase);
        auto freq = featurize(tokens, vocab, FeatureMode::Frequency);
        auto bin = featurize(tokens, vocab, FeatureMode::Binary);

        double freq_sum = 0.0;
        for (std::size_t i = 0; i < freq.nnz(); ++i) {
            freq_sum += freq.entries[i].value;
            if (i > 0) CHECK(freq.entries[i].index > freq.entries[i - 1].index);
        }
        // Training vocabulary covers every token, so no mass is lost.
        CHECK(freq_sum == doctest::Approx(static_cast<double>(tokens.size())));
        for (const auto& e : bin.entries) CHECK(e.value == 1.0);
        CHECK(bin.nnz() == freq.nnz());
        CHECK(bin.nnz() <= tokens.size());
    }
}

TEST_CASE("make_instance keeps the sentiment/binary-label invariant") {
    auto records = synth_corpus(5, 100, SynthSpec{});
    auto vocab = build_vocabulary(records);
    for (const auto& inst : make_instances(records, vocab, FeatureMode::Binary))
        CHECK(inst.binary_label == (inst.sentiment >= 3 ? +1 : -1));
}

TEST_SUITE_END();
