#ifndef PQGCN_TESTS_HELPERS_HPP
#define PQGCN_TESTS_HELPERS_HPP

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqgcn/common.hpp"
#include "pqgcn/corpus.hpp"
#include "pqgcn/stats.hpp"

namespace testutil {

class TempDir {
public:
    explicit TempDir(const std::string& prefix) {
        auto base = std::filesystem::temp_directory_path();
        for (int k = 0;; ++k) {
            auto candidate = base / (prefix + "-" + std::to_string(::getpid()) + "-" +
                                     std::to_string(k));
            std::error_code ec;
            if (std::filesystem::create_directories(candidate, ec)) {
                path_ = candidate;
                break;
            }
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string path() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Brute-force PPMI oracle: enumerate windows explicitly, then count each key
// and each pair by scanning every window, independently of the counting code.
// ---------------------------------------------------------------------------

struct OracleEdge {
    std::string a, b;  // a < b lexicographically not required; pair unordered
    double w = 0;
};

inline std::vector<std::vector<std::string>> oracle_windows(
    const std::vector<std::vector<std::string>>& sequences, int window) {
    std::vector<std::vector<std::string>> windows;
    for (const auto& seq : sequences) {
        if (seq.empty()) continue;
        if (window == pqgcn::stats::kWholeSequenceWindow ||
            seq.size() <= static_cast<size_t>(window)) {
            windows.push_back(seq);
        } else {
            for (size_t b = 0; b + static_cast<size_t>(window) <= seq.size(); ++b) {
                windows.emplace_back(seq.begin() + static_cast<long>(b),
                                     seq.begin() + static_cast<long>(b) + window);
            }
        }
    }
    return windows;
}

inline bool window_contains(const std::vector<std::string>& w, const std::string& key) {
    for (const auto& t : w) {
        if (t == key) return true;
    }
    return false;
}

// every key in first-appearance order
inline std::vector<std::string> oracle_vocab(
    const std::vector<std::vector<std::string>>& sequences) {
    std::vector<std::string> vocab;
    std::set<std::string> seen;
    for (const auto& seq : sequences) {
        for (const auto& t : seq) {
            if (seen.insert(t).second) vocab.push_back(t);
        }
    }
    return vocab;
}

inline std::vector<OracleEdge> oracle_ppmi(
    const std::vector<std::vector<std::string>>& sequences, int window) {
    auto windows = oracle_windows(sequences, window);
    auto vocab = oracle_vocab(sequences);
    double total = static_cast<double>(windows.size());
    std::vector<OracleEdge> out;
    for (size_t a = 0; a < vocab.size(); ++a) {
        for (size_t b = a + 1; b < vocab.size(); ++b) {
            int64_t na = 0, nb = 0, nab = 0;
            for (const auto& w : windows) {
                bool ha = window_contains(w, vocab[a]);
                bool hb = window_contains(w, vocab[b]);
                na += ha;
                nb += hb;
                nab += ha && hb;
            }
            if (nab == 0) continue;
            double value = std::log(static_cast<double>(nab) * total /
                                    (static_cast<double>(na) * static_cast<double>(nb)));
            if (value > 0.0) out.push_back({vocab[a], vocab[b], value});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

// Three separable classes with class-specific adjective/noun vocabularies;
// every question contains an adjective-noun pair so the phrase views are
// always non-empty under the default patterns.
inline pqgcn::corpus::Corpus synthetic_corpus(int per_class, uint64_t seed) {
    using pqgcn::corpus::Corpus;
    struct ClassWords {
        const char* label;
        std::vector<const char*> adjectives;
        std::vector<const char*> nouns;
    };
    static const std::vector<ClassWords> classes = {
        {"BIO",
         {"biological", "chemical", "natural", "human"},
         {"cell", "enzyme", "organism", "protein", "membrane", "tissue"}},
        {"MATH",
         {"mathematical", "quadratic", "general", "particular"},
         {"equation", "matrix", "theorem", "polynomial", "function", "number"}},
        {"HIST",
         {"historical", "ancient", "political", "cultural"},
         {"revolution", "empire", "treaty", "dynasty", "parliament", "monarchy"}},
    };
    static const std::vector<const char*> templates = {
        "what is the %A %N of the %M",
        "discuss the %A %N in the %M",
        "explain how the %A %N affects the %M",
        "describe the %M of the %A %N",
        "why is the %A %N important for the %M",
    };

    Corpus c;
    pqgcn::Rng rng(seed);
    for (size_t cls = 0; cls < classes.size(); ++cls) {
        c.labels.add_or_get(classes[cls].label);
    }
    int id = 0;
    for (int k = 0; k < per_class; ++k) {
        for (size_t cls = 0; cls < classes.size(); ++cls) {
            const auto& words = classes[cls];
            std::string text = templates[rng.below(templates.size())];
            auto substitute = [&](const std::string& token, const char* value) {
                size_t pos = text.find(token);
                if (pos != std::string::npos) text.replace(pos, token.size(), value);
            };
            substitute("%A", words.adjectives[rng.below(words.adjectives.size())]);
            substitute("%N", words.nouns[rng.below(words.nouns.size())]);
            substitute("%M", words.nouns[rng.below(words.nouns.size())]);
            c.questions.push_back(
                pqgcn::corpus::make_question(id++, text, static_cast<int>(cls)));
        }
    }
    return c;
}

inline std::string corpus_to_tsv(const pqgcn::corpus::Corpus& c) {
    std::string out;
    for (const auto& q : c.questions) {
        out += c.labels.names[static_cast<size_t>(*q.label)];
        out += '\t';
        out += q.raw_text;
        out += '\n';
    }
    return out;
}

// Six questions over a ten-word vocabulary; every view stays at or under ten
// nodes. Used by the gradient-check and dense-oracle tests.
inline void write_toy_fixtures(const TempDir& dir) {
    using pqgcn::write_text_file;
    write_text_file(dir.file("corpus.tsv"),
                    "A\twhat is the main cell\n"
                    "B\tthe main cell is good\n"
                    "A\tsolve the good equation\n"
                    "B\twhat is the good war\n"
                    "A\tthe king is good\n"
                    "B\tsolve the main equation king\n");
    write_text_file(dir.file("words.vec"),
                    "main 0.4 0.1 -0.2\n"
                    "cell 0.9 0.05 0.3\n"
                    "good -0.3 0.8 0.1\n"
                    "equation 0.2 -0.6 0.7\n"
                    "king 0.5 0.5 -0.5\n");
    write_text_file(dir.file("phrases.vec"),
                    "the main cell\t0.8 0.1 0.4\n"
                    "solve\t-0.2 0.3 0.9\n");
    write_text_file(dir.file("entities.txt"), "cell\nwar\nking\nmain cell\n");
    write_text_file(dir.file("entities.vec"),
                    "cell 0.9 0.1 0.1 0.2\n"
                    "war 0.1 0.9 -0.2 0.1\n"
                    "king 0.7 0.3 0.2 0.1\n"
                    "main cell\t0.85 0.15 0.05 0.25\n");
}

inline nlohmann::json toy_config_json(const TempDir& dir) {
    nlohmann::json j;
    j["corpus"] = {{"train_path", dir.file("corpus.tsv")},
                   {"format", "tsv"},
                   {"test_fraction", 0.34},
                   {"split_seed", 11}};
    j["views"] = {{"enabled", {"word", "word_pos", "phrase", "phrase_pos", "entity"}},
                  {"word_window", 5}};
    j["nlp"] = {{"lexicon_path", dir.file("entities.txt")}};
    j["embeddings"] = {{"word_vectors", dir.file("words.vec")},
                       {"phrase_vectors", dir.file("phrases.vec")},
                       {"entity_vectors", dir.file("entities.vec")}};
    j["model"] = {{"hidden_dim", 8}, {"dropout", 0.0}, {"seed", 3},
                  {"validation_fraction", 0.0}, {"threshold", 0.3}};
    j["output_dir"] = dir.file("out");
    return j;
}

}  // namespace testutil

#endif
