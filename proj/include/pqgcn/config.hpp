#ifndef PQGCN_CONFIG_HPP
#define PQGCN_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqgcn/corpus.hpp"
#include "pqgcn/graphs.hpp"
#include "pqgcn/model.hpp"

namespace pqgcn::cfg {

// Whole-run configuration read from a JSON file; every key can be overridden
// on the command line with --section.key=value.
struct RunConfig {
    // corpus
    std::string train_path;
    std::optional<std::string> test_path;  // predefined test set; otherwise seeded split
    corpus::CorpusFormat format = corpus::CorpusFormat::Tsv;
    corpus::TrecLabels trec_labels = corpus::TrecLabels::Coarse;
    double test_fraction = 0.3;
    uint64_t split_seed = 42;

    // views
    std::vector<graphs::ViewKind> enabled_views;  // empty = defaults (see resolved_views)
    int word_window = 5;

    // nlp
    std::string tagger = "heuristic";  // or "pretagged"
    std::optional<std::string> pretagged_path;
    std::optional<std::string> pattern_file;
    std::optional<std::string> lexicon_path;

    // embeddings
    std::optional<std::string> word_vectors;
    std::optional<std::string> phrase_vectors;
    std::optional<std::string> entity_vectors;

    model::ModelConfig model_config;

    std::string output_dir = "out";

    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;  // canonical snapshot, stored in bundle manifests

    // word/word_pos/phrase/phrase_pos, plus entity when a lexicon and entity
    // vectors are both configured
    std::vector<graphs::ViewKind> resolved_views() const;

    void validate() const;  // config_error when referenced files are missing
};

nlohmann::json load_config_file(const std::string& path);

// `--section.key=value` override; the value is parsed as JSON when possible,
// as a plain string otherwise.
void apply_override(nlohmann::json& config, const std::string& dotted_key,
                    const std::string& value);

extern const char* kConfigSchemaHelp;

}  // namespace pqgcn::cfg

#endif
