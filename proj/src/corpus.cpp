#include "pqgcn/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace pqgcn::corpus {

int LabelVocab::add_or_get(const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(names.size());
    names.push_back(name);
    index.emplace(name, id);
    return id;
}

namespace {

// Irregular contractions the suffix rules below would mangle.
const std::unordered_map<std::string, std::string>& special_contractions() {
    static const std::unordered_map<std::string, std::string> table = {
        {"won't", "will not"},  {"can't", "cannot"},  {"shan't", "shall not"},
        {"ain't", "is not"},    {"let's", "let us"},
    };
    return table;
}

bool is_interrogative_head(std::string_view stem) {
    static const std::set<std::string, std::less<>> heads = {
        "what", "which", "when", "where", "who", "whom", "whose", "why", "how"};
    return heads.count(stem) > 0;
}

// Expands one whitespace token; may produce multiple words.
std::string expand_token(const std::string& tok) {
    // Work on the [a-z0-9'] core; surrounding punctuation is dropped here,
    // exactly as the punctuation stage would drop it anyway.
    auto keep = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
    };
    size_t b = 0, e = tok.size();
    while (b < e && !keep(tok[b])) ++b;
    while (e > b && !keep(tok[e - 1])) --e;
    std::string lead = tok.substr(0, b);
    std::string core = tok.substr(b, e - b);
    std::string tail = tok.substr(e);

    if (auto it = special_contractions().find(core); it != special_contractions().end()) {
        return lead + it->second + tail;
    }
    struct Suffix {
        const char* suffix;
        const char* replacement;
    };
    static const Suffix suffixes[] = {
        {"n't", " not"}, {"'re", " are"}, {"'ll", " will"}, {"'ve", " have"},
        {"'m", " am"},   {"'d", " would"},
    };
    for (const auto& s : suffixes) {
        std::string_view sv(s.suffix);
        if (core.size() > sv.size() && ends_with(core, sv)) {
            return lead + core.substr(0, core.size() - sv.size()) + s.replacement + tail;
        }
    }
    if (core.size() > 2 && ends_with(core, "'s") &&
        is_interrogative_head(std::string_view(core).substr(0, core.size() - 2))) {
        return lead + core.substr(0, core.size() - 2) + " is" + tail;
    }
    return tok;
}

}  // namespace

std::string clean_text(std::string_view raw) {
    // Normalize the U+2019 right single quote so contraction suffixes match.
    std::string s;
    s.reserve(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        if (i + 2 < raw.size() && static_cast<unsigned char>(raw[i]) == 0xE2 &&
            static_cast<unsigned char>(raw[i + 1]) == 0x80 &&
            static_cast<unsigned char>(raw[i + 2]) == 0x99) {
            s += '\'';
            i += 2;
        } else {
            s += raw[i];
        }
    }
    s = to_lower(s);

    std::string expanded;
    for (const auto& tok : split_ws(s)) {
        if (!expanded.empty()) expanded += ' ';
        expanded += expand_token(tok);
    }

    std::string filtered;
    filtered.reserve(expanded.size());
    for (char c : expanded) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == ' ') filtered += c;
    }

    return join(split_ws(filtered), " ");
}

Question make_question(int id, std::string raw_text, std::optional<int> label) {
    Question q;
    q.id = id;
    q.raw_text = std::move(raw_text);
    q.clean_text = clean_text(q.raw_text);
    q.tokens = split_ws(q.clean_text);
    q.label = label;
    return q;
}

namespace {

void load_lines(Corpus& c, const std::string& path, CorpusFormat format,
                TrecLabels trec_labels) {
    std::string content = read_text_file(path);
    std::istringstream in(content);
    std::string line;
    int line_no = 0;
    size_t before = c.questions.size();
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::string label_name, text;
        if (format == CorpusFormat::Tsv) {
            size_t tab = line.find('\t');
            if (tab == std::string::npos || tab == 0) {
                throw config_error("corpus: " + path + ":" + std::to_string(line_no) +
                                   ": expected `label<TAB>question`");
            }
            label_name = line.substr(0, tab);
            text = line.substr(tab + 1);
        } else {
            size_t ws = line.find_first_of(" \t");
            std::string head = line.substr(0, ws);
            size_t colon = head.find(':');
            if (colon == std::string::npos || colon == 0) {
                throw config_error("corpus: " + path + ":" + std::to_string(line_no) +
                                   ": expected `COARSE:fine question`");
            }
            label_name = (trec_labels == TrecLabels::Coarse) ? head.substr(0, colon) : head;
            text = (ws == std::string::npos) ? std::string() : line.substr(ws + 1);
        }
        int label = c.labels.add_or_get(label_name);
        c.questions.push_back(
            make_question(static_cast<int>(c.questions.size()), std::move(text), label));
    }
    if (c.questions.size() == before) {
        throw config_error("corpus: " + path + ": no questions found");
    }
}

}  // namespace

Corpus load_corpus(const std::string& path, CorpusFormat format, TrecLabels trec_labels) {
    Corpus c;
    load_lines(c, path, format, trec_labels);
    return c;
}

void load_corpus_into(Corpus& c, const std::string& path, CorpusFormat format,
                      TrecLabels trec_labels) {
    load_lines(c, path, format, trec_labels);
}

DatasetSplit split_corpus(const std::vector<Question>& questions, double test_fraction,
                          uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw config_error("corpus: test fraction must be in (0,1), got " +
                           format_double(test_fraction));
    }
    if (questions.size() < 2) {
        throw config_error("corpus: need at least 2 questions to split");
    }
    std::vector<int> ids(questions.size());
    for (size_t i = 0; i < ids.size(); ++i) ids[i] = questions[i].id;
    Rng rng(seed);
    rng.shuffle(ids);

    size_t n = ids.size();
    // 1e-9 guards against 10*0.7 == 6.999... style FP noise
    size_t n_train = static_cast<size_t>(
        std::floor(static_cast<double>(n) * (1.0 - test_fraction) + 1e-9));

    DatasetSplit split;
    split.seed = seed;
    split.train_ids.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
    split.test_ids.assign(ids.begin() + static_cast<long>(n_train), ids.end());
    std::sort(split.train_ids.begin(), split.train_ids.end());
    std::sort(split.test_ids.begin(), split.test_ids.end());

    std::set<int> train_set(split.train_ids.begin(), split.train_ids.end());
    std::set<int> classes_seen, classes_in_train;
    for (const auto& q : questions) {
        if (!q.label) continue;
        classes_seen.insert(*q.label);
        if (train_set.count(q.id)) classes_in_train.insert(*q.label);
    }
    for (int cls : classes_seen) {
        if (!classes_in_train.count(cls)) {
            warn("corpus: class " + std::to_string(cls) + " has no training questions");
        }
    }
    return split;
}

bool is_train(const DatasetSplit& split, int id) {
    return std::binary_search(split.train_ids.begin(), split.train_ids.end(), id);
}

void write_split_tsv(const DatasetSplit& split, const std::string& path) {
    std::vector<std::pair<int, bool>> rows;
    for (int id : split.train_ids) rows.emplace_back(id, true);
    for (int id : split.test_ids) rows.emplace_back(id, false);
    std::sort(rows.begin(), rows.end());
    std::string out;
    for (const auto& [id, train] : rows) {
        out += std::to_string(id);
        out += '\t';
        out += train ? "train" : "test";
        out += '\n';
    }
    write_text_file(path, out);
}

}  // namespace pqgcn::corpus
