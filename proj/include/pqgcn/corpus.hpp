#ifndef PQGCN_CORPUS_HPP
#define PQGCN_CORPUS_HPP

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pqgcn/common.hpp"

namespace pqgcn::corpus {

struct Question {
    int id = 0;
    std::string raw_text;
    std::string clean_text;           // lowercase [a-z0-9 ], single-spaced
    std::vector<std::string> tokens;  // whitespace split of clean_text
    std::optional<int> label;
};

struct LabelVocab {
    std::vector<std::string> names;              // index -> name, first-appearance order
    std::unordered_map<std::string, int> index;  // name -> index

    int add_or_get(const std::string& name);
    int size() const { return static_cast<int>(names.size()); }
};

struct DatasetSplit {
    std::vector<int> train_ids;  // ascending
    std::vector<int> test_ids;   // ascending, disjoint from train_ids
    uint64_t seed = 0;
};

struct Corpus {
    std::vector<Question> questions;
    LabelVocab labels;
};

enum class CorpusFormat { Tsv, Trec };
enum class TrecLabels { Coarse, Fine };

// Cleaning pipeline, applied in order: lowercase; contraction expansion via
// the shipped lookup table (n't -> not, 's -> is on interrogative heads,
// 're -> are, 'll -> will, 've -> have, 'm -> am, 'd -> would, plus irregular
// whole-word forms such as won't/can't); removal of every character outside
// [a-z0-9 ]; whitespace collapse and trim. Idempotent.
std::string clean_text(std::string_view raw);

Question make_question(int id, std::string raw_text, std::optional<int> label);

// TSV rows are `label<TAB>question`; TREC rows start with a `COARSE:fine`
// token followed by the question text. Labels enter the vocab in
// first-appearance order. Malformed rows raise config_error naming the line.
Corpus load_corpus(const std::string& path, CorpusFormat format,
                   TrecLabels trec_labels = TrecLabels::Coarse);

// Appends a second file (e.g. a predefined test set) to an existing corpus,
// sharing its label vocabulary and continuing its id sequence.
void load_corpus_into(Corpus& c, const std::string& path, CorpusFormat format,
                      TrecLabels trec_labels = TrecLabels::Coarse);

// Deterministic shuffle with `seed`; the first floor(n*(1-test_fraction))
// questions become the train set. Warns if a class ends up absent from train.
DatasetSplit split_corpus(const std::vector<Question>& questions,
                          double test_fraction, uint64_t seed);

bool is_train(const DatasetSplit& split, int id);

// `id<TAB>{train|test}` rows in id order.
void write_split_tsv(const DatasetSplit& split, const std::string& path);

}  // namespace pqgcn::corpus

#endif
