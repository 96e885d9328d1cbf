#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace psvm {

// One line of the dataset: a phrase with its 5-way sentiment label.
struct RawRecord {
    std::int64_t phrase_id = 0;
    std::int64_t sentence_id = 0;
    std::string phrase;
    int sentiment = 0;  // 0..4
};

// Normalized token -> dense feature index, indices assigned by first
// appearance in the corpus.
struct Vocabulary {
    std::unordered_map<std::string, std::uint32_t> word_to_index;
    std::vector<std::string> index_to_word;  // inverse map, same order

    std::size_t size() const { return index_to_word.size(); }

    // Returns the index of `token` or -1 if unknown.
    std::int64_t lookup(const std::string& token) const {
        auto it = word_to_index.find(token);
        return it == word_to_index.end() ? -1 : static_cast<std::int64_t>(it->second);
    }
};

// Sorted sparse vector: strictly increasing indices, no stored zeros.
struct SparseVector {
    struct Entry {
        std::uint32_t index;
        double value;
    };
    std::vector<Entry> entries;

    bool empty() const { return entries.empty(); }
    std::size_t nnz() const { return entries.size(); }
};

enum class FeatureMode { Binary, Frequency };

struct Instance {
    SparseVector features;
    int sentiment = 0;      // 0..4
    int binary_label = -1;  // +1 iff sentiment in {3,4}
};

struct CorpusStats {
    std::size_t n_instances = 0;
    std::size_t n_distinct_words = 0;
    double avg_words_per_phrase = 0.0;  // token occurrences / instances
    double avg_phrases_per_word = 0.0;  // (word, phrase) incidences / distinct words
};

// Parses the tab-separated dataset format:
//   header `PhraseId\tSentenceId\tPhrase\tSentiment`, then one record per
//   line. CRLF is tolerated. Throws ParseError naming the offending line on
//   wrong field counts, non-integer ids, sentiments outside 0..4, or
//   duplicate phrase ids.
std::vector<RawRecord> parse_tsv(std::istream& in);
std::vector<RawRecord> parse_tsv_file(const std::string& path);

// Splits on whitespace, lowercases, strips the punctuation characters
// ,.!?;:'"()- from each token, and drops tokens left empty.
std::vector<std::string> tokenize(const std::string& phrase);

// Distinct tokens over all phrases, indexed by first appearance.
// Throws ParseError if no tokens survive normalization.
Vocabulary build_vocabulary(const std::vector<RawRecord>& records);

// Bag-of-words featurization. Tokens missing from `vocab` are skipped.
SparseVector featurize(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                       FeatureMode mode);

// +1 for sentiment 3 or 4, -1 for 0..2. Throws ParseError out of range.
int binarize_label(int sentiment);

Instance make_instance(const RawRecord& record, const Vocabulary& vocab, FeatureMode mode);
std::vector<Instance> make_instances(const std::vector<RawRecord>& records,
                                     const Vocabulary& vocab, FeatureMode mode);

// Corpus statistics per CorpusStats. Word multiplicities come from the
// feature values, so `instances` must be Frequency-mode featurized for
// avg_words_per_phrase to count tokens with multiplicity.
CorpusStats corpus_stats(const std::vector<Instance>& instances, const Vocabulary& vocab);

// Deterministic synthetic corpus in the dataset format. Lexicons are
// `pos0..`, `neg0..`, `neut0..` sized per the counts; each phrase draws
// `n` words uniformly from the combined lexicon with length uniform in
// [len_min, len_max]. Sentiment comes from the signed balance
// d = (#pos - #neg): d>=2 -> 4, d=1 -> 3, d=0 -> 2, d=-1 -> 1, d<=-2 -> 0.
struct SynthSpec {
    std::size_t n_pos = 40;
    std::size_t n_neg = 40;
    std::size_t n_neutral = 20;
    std::size_t len_min = 5;
    std::size_t len_max = 12;
};
std::vector<RawRecord> synth_corpus(std::uint64_t seed, std::size_t n, const SynthSpec& spec);

// The sentiment rule used by synth_corpus, exposed for checks.
int synth_sentiment_from_balance(long pos_minus_neg);

// Writes records in the exact TSV format parse_tsv accepts.
void write_tsv(std::ostream& out, const std::vector<RawRecord>& records);

}  // namespace psvm
