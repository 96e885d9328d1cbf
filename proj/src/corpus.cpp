#include "psvm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "psvm/errors.hpp"
#include "psvm/rng.hpp"

namespace psvm {

namespace {

const char* const kPunctuation = ",.!?;:'\"()-";

bool is_stripped_punct(char c) {
    for (const char* p = kPunctuation; *p; ++p)
        if (*p == c) return true;
    return false;
}

// Parses a full string as a base-10 integer; rejects trailing garbage.
bool parse_int(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stoll(s, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == s.size();
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& why) {
    std::ostringstream os;
    os << "parse error at line " << line_no << ": " << why;
    throw ParseError(os.str());
}

}  // namespace

std::vector<RawRecord> parse_tsv(std::istream& in) {
    std::vector<RawRecord> records;
    std::unordered_set<std::int64_t> seen_ids;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            auto header = split_tabs(line);
            if (header.size() != 4 || header[0] != "PhraseId" || header[1] != "SentenceId" ||
                header[2] != "Phrase" || header[3] != "Sentiment")
                fail_line(line_no,
                          "expected header `PhraseId\tSentenceId\tPhrase\tSentiment`");
            continue;
        }
        if (line.empty()) continue;

        auto fields = split_tabs(line);
        if (fields.size() != 4) fail_line(line_no, "expected 4 tab-separated fields");

        RawRecord rec;
        std::int64_t sentiment = 0;
        if (!parse_int(fields[0], rec.phrase_id)) fail_line(line_no, "non-integer PhraseId");
        if (!parse_int(fields[1], rec.sentence_id)) fail_line(line_no, "non-integer SentenceId");
        if (!parse_int(fields[3], sentiment)) fail_line(line_no, "non-integer Sentiment");
        if (sentiment < 0 || sentiment > 4) fail_line(line_no, "sentiment outside 0..4");
        if (!seen_ids.insert(rec.phrase_id).second) fail_line(line_no, "duplicate PhraseId");
        rec.phrase = fields[2];
        rec.sentiment = static_cast<int>(sentiment);
        records.push_back(std::move(rec));
    }
    if (line_no == 0) throw ParseError("parse error: empty input, missing header");
    return records;
}

std::vector<RawRecord> parse_tsv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open data file: " + path);
    return parse_tsv(in);
}

std::vector<std::string> tokenize(const std::string& phrase) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    for (char c : phrase) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else if (!is_stripped_punct(c)) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    flush();
    return tokens;
}

Vocabulary build_vocabulary(const std::vector<RawRecord>& records) {
    Vocabulary vocab;
    for (const auto& rec : records) {
        for (auto& token : tokenize(rec.phrase)) {
            auto [it, inserted] = vocab.word_to_index.try_emplace(
                token, static_cast<std::uint32_t>(vocab.index_to_word.size()));
            if (inserted) vocab.index_to_word.push_back(it->first);
        }
    }
    if (vocab.index_to_word.empty())
        throw ParseError("empty vocabulary: no tokens survive normalization");
    return vocab;
}

SparseVector featurize(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                       FeatureMode mode) {
    std::map<std::uint32_t, double> counts;
    for (const auto& token : tokens) {
        std::int64_t idx = vocab.lookup(token);
        if (idx >= 0) counts[static_cast<std::uint32_t>(idx)] += 1.0;
    }
    SparseVector v;
    v.entries.reserve(counts.size());
    for (auto [index, count] : counts)
        v.entries.push_back({index, mode == FeatureMode::Binary ? 1.0 : count});
    return v;
}

int binarize_label(int sentiment) {
    if (sentiment < 0 || sentiment > 4)
        throw ParseError("sentiment outside 0..4: " + std::to_string(sentiment));
    return sentiment >= 3 ? +1 : -1;
}

Instance make_instance(const RawRecord& record, const Vocabulary& vocab, FeatureMode mode) {
    Instance inst;
    inst.features = featurize(tokenize(record.phrase), vocab, mode);
    inst.sentiment = record.sentiment;
    inst.binary_label = binarize_label(record.sentiment);
    return inst;
}

std::vector<Instance> make_instances(const std::vector<RawRecord>& records,
                                     const Vocabulary& vocab, FeatureMode mode) {
    std::vector<Instance> out;
    out.reserve(records.size());
    for (const auto& rec : records) out.push_back(make_instance(rec, vocab, mode));
    return out;
}

CorpusStats corpus_stats(const std::vector<Instance>& instances, const Vocabulary& vocab) {
    if (instances.empty()) throw ParseError("corpus_stats: no instances");
    CorpusStats stats;
    stats.n_instances = instances.size();
    stats.n_distinct_words = vocab.size();
    double token_total = 0.0;
    double incidence_total = 0.0;
    for (const auto& inst : instances) {
        for (const auto& e : inst.features.entries) token_total += e.value;
        incidence_total += static_cast<double>(inst.features.nnz());
    }
    stats.avg_words_per_phrase = token_total / static_cast<double>(stats.n_instances);
    stats.avg_phrases_per_word =
        incidence_total / static_cast<double>(stats.n_distinct_words);
    return stats;
}

int synth_sentiment_from_balance(long pos_minus_neg) {
    if (pos_minus_neg >= 2) return 4;
    if (pos_minus_neg == 1) return 3;
    if (pos_minus_neg == 0) return 2;
    if (pos_minus_neg == -1) return 1;
    return 0;
}

std::vector<RawRecord> synth_corpus(std::uint64_t seed, std::size_t n, const SynthSpec& spec) {
    if (n < 1 || spec.n_pos < 1 || spec.n_neg < 1 || spec.n_neutral < 1 ||
        spec.len_min > spec.len_max || spec.len_min < 1)
        throw ParseError("synth_corpus: invalid spec");

    Rng rng(seed);
    std::size_t total = spec.n_pos + spec.n_neg + spec.n_neutral;
    std::vector<RawRecord> records;
    records.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t len = spec.len_min + rng.bounded(spec.len_max - spec.len_min + 1);
        std::string phrase;
        long balance = 0;
        for (std::size_t j = 0; j < len; ++j) {
            std::size_t word = rng.bounded(total);
            if (j > 0) phrase.push_back(' ');
            if (word < spec.n_pos) {
                phrase += "pos" + std::to_string(word);
                ++balance;
            } else if (word < spec.n_pos + spec.n_neg) {
                phrase += "neg" + std::to_string(word - spec.n_pos);
                --balance;
            } else {
                phrase += "neut" + std::to_string(word - spec.n_pos - spec.n_neg);
            }
        }
        RawRecord rec;
        rec.phrase_id = static_cast<std::int64_t>(i + 1);
        rec.sentence_id = static_cast<std::int64_t>(i + 1);
        rec.phrase = std::move(phrase);
        rec.sentiment = synth_sentiment_from_balance(balance);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_tsv(std::ostream& out, const std::vector<RawRecord>& records) {
    out << "PhraseId\tSentenceId\tPhrase\tSentiment\n";
    for (const auto& rec : records)
        out << rec.phrase_id << '\t' << rec.sentence_id << '\t' << rec.phrase << '\t'
            << rec.sentiment << '\n';
}

}  // namespace psvm
