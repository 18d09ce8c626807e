#include "pqgcn/config.hpp"

#include <filesystem>

namespace pqgcn::cfg {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> opt_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    std::string v = j.at(key).get<std::string>();
    if (v.empty()) return std::nullopt;
    return v;
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    if (j.contains("corpus")) {
        const auto& jc = j.at("corpus");
        if (jc.contains("train_path")) c.train_path = jc.at("train_path").get<std::string>();
        c.test_path = opt_string(jc, "test_path");
        if (jc.contains("format")) {
            std::string f = jc.at("format").get<std::string>();
            if (f == "tsv") c.format = corpus::CorpusFormat::Tsv;
            else if (f == "trec") c.format = corpus::CorpusFormat::Trec;
            else throw config_error("config: corpus.format must be tsv or trec, got '" + f + "'");
        }
        if (jc.contains("trec_labels")) {
            std::string t = jc.at("trec_labels").get<std::string>();
            if (t == "coarse") c.trec_labels = corpus::TrecLabels::Coarse;
            else if (t == "fine") c.trec_labels = corpus::TrecLabels::Fine;
            else throw config_error("config: corpus.trec_labels must be coarse or fine");
        }
        if (jc.contains("test_fraction")) c.test_fraction = jc.at("test_fraction").get<double>();
        if (jc.contains("split_seed")) c.split_seed = jc.at("split_seed").get<uint64_t>();
    }
    if (j.contains("views")) {
        const auto& jv = j.at("views");
        if (jv.contains("enabled")) {
            for (const auto& name : jv.at("enabled")) {
                auto v = graphs::view_from_name(name.get<std::string>());
                if (!v) {
                    throw config_error("config: unknown view '" + name.get<std::string>() + "'");
                }
                c.enabled_views.push_back(*v);
            }
        }
        if (jv.contains("word_window")) c.word_window = jv.at("word_window").get<int>();
    }
    if (j.contains("nlp")) {
        const auto& jn = j.at("nlp");
        if (jn.contains("tagger")) c.tagger = jn.at("tagger").get<std::string>();
        c.pretagged_path = opt_string(jn, "pretagged_path");
        c.pattern_file = opt_string(jn, "pattern_file");
        c.lexicon_path = opt_string(jn, "lexicon_path");
    }
    if (j.contains("embeddings")) {
        const auto& je = j.at("embeddings");
        c.word_vectors = opt_string(je, "word_vectors");
        c.phrase_vectors = opt_string(je, "phrase_vectors");
        c.entity_vectors = opt_string(je, "entity_vectors");
    }
    if (j.contains("model")) c.model_config = model::ModelConfig::from_json(j.at("model"));
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    return c;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["corpus"] = {{"train_path", train_path},
                   {"test_path", test_path ? nlohmann::json(*test_path) : nlohmann::json()},
                   {"format", format == corpus::CorpusFormat::Tsv ? "tsv" : "trec"},
                   {"trec_labels",
                    trec_labels == corpus::TrecLabels::Coarse ? "coarse" : "fine"},
                   {"test_fraction", test_fraction},
                   {"split_seed", split_seed}};
    nlohmann::json views = nlohmann::json::array();
    for (auto v : resolved_views()) views.push_back(graphs::view_name(v));
    j["views"] = {{"enabled", views}, {"word_window", word_window}};
    j["nlp"] = {{"tagger", tagger},
                {"pretagged_path",
                 pretagged_path ? nlohmann::json(*pretagged_path) : nlohmann::json()},
                {"pattern_file", pattern_file ? nlohmann::json(*pattern_file) : nlohmann::json()},
                {"lexicon_path", lexicon_path ? nlohmann::json(*lexicon_path) : nlohmann::json()}};
    j["embeddings"] = {
        {"word_vectors", word_vectors ? nlohmann::json(*word_vectors) : nlohmann::json()},
        {"phrase_vectors", phrase_vectors ? nlohmann::json(*phrase_vectors) : nlohmann::json()},
        {"entity_vectors", entity_vectors ? nlohmann::json(*entity_vectors) : nlohmann::json()}};
    j["model"] = model_config.to_json();
    j["output_dir"] = output_dir;
    return j;
}

std::vector<graphs::ViewKind> RunConfig::resolved_views() const {
    if (!enabled_views.empty()) {
        std::vector<graphs::ViewKind> out;
        for (graphs::ViewKind v : graphs::kAllViews) {
            if (std::find(enabled_views.begin(), enabled_views.end(), v) !=
                enabled_views.end()) {
                out.push_back(v);
            }
        }
        return out;
    }
    std::vector<graphs::ViewKind> out = {graphs::ViewKind::Word, graphs::ViewKind::WordPos,
                                         graphs::ViewKind::Phrase, graphs::ViewKind::PhrasePos};
    if (lexicon_path && entity_vectors) out.push_back(graphs::ViewKind::Entity);
    return out;
}

void RunConfig::validate() const {
    if (train_path.empty()) throw config_error("config: corpus.train_path is required");
    auto require = [](const std::string& what, const std::string& path) {
        if (!fs::exists(path)) {
            throw config_error("config: " + what + " does not exist: " + path);
        }
    };
    require("corpus.train_path", train_path);
    if (test_path) require("corpus.test_path", *test_path);
    if (pretagged_path) require("nlp.pretagged_path", *pretagged_path);
    if (pattern_file) require("nlp.pattern_file", *pattern_file);
    if (lexicon_path) require("nlp.lexicon_path", *lexicon_path);
    if (word_vectors) require("embeddings.word_vectors", *word_vectors);
    if (phrase_vectors) require("embeddings.phrase_vectors", *phrase_vectors);
    if (entity_vectors) require("embeddings.entity_vectors", *entity_vectors);
    if (tagger != "heuristic" && tagger != "pretagged") {
        throw config_error("config: nlp.tagger must be heuristic or pretagged");
    }
    if (tagger == "pretagged" && !pretagged_path) {
        throw config_error("config: nlp.tagger=pretagged needs nlp.pretagged_path");
    }
    if (word_window < 1) throw config_error("config: views.word_window must be >= 1");
    for (graphs::ViewKind v : resolved_views()) {
        if (v == graphs::ViewKind::Entity && (!lexicon_path || !entity_vectors)) {
            throw config_error(
                "config: the entity view needs nlp.lexicon_path and embeddings.entity_vectors");
        }
    }
}

nlohmann::json load_config_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("config: " + path + ": " + e.what());
    }
    if (!j.is_object()) throw config_error("config: " + path + ": expected a JSON object");
    return j;
}

void apply_override(nlohmann::json& config, const std::string& dotted_key,
                    const std::string& value) {
    if (dotted_key.empty()) throw config_error("config: empty override key");
    nlohmann::json* node = &config;
    auto parts = split_char(dotted_key, '.');
    for (size_t k = 0; k + 1 < parts.size(); ++k) {
        node = &((*node)[parts[k]]);
        if (!node->is_object() && !node->is_null()) {
            throw config_error("config: override key '" + dotted_key +
                               "' crosses a non-object value");
        }
    }
    nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value;  // plain string
    (*node)[parts.back()] = parsed;
}

const char* kConfigSchemaHelp = R"(Config file schema (JSON; every key optional unless noted):
{
  "corpus": {
    "train_path": "path",          REQUIRED; `label<TAB>question` rows (tsv)
                                   or `COARSE:fine question` rows (trec)
    "test_path": "path" | null,    predefined test set; otherwise a seeded split
    "format": "tsv" | "trec",
    "trec_labels": "coarse" | "fine",
    "test_fraction": 0.3,          used when test_path is null
    "split_seed": 42
  },
  "views": {
    "enabled": ["word","word_pos","phrase","phrase_pos","entity"],
                                   default: the four text views, plus entity
                                   when a lexicon and entity vectors are set
    "word_window": 5               sliding co-occurrence window (word view)
  },
  "nlp": {
    "tagger": "heuristic" | "pretagged",
    "pretagged_path": "path",      `token/TAG` lines (pretagged tagger)
    "pattern_file": "path",        `kind<TAB>regex` lines over tag codes
                                   (ADJ=J ADP=I ADV=R AUX=A CONJ=C DET=D NOUN=N
                                    NUM=M PART=T PRON=O PROPN=Q VERB=V X=X)
    "lexicon_path": "path"         one entity surface form per line
  },
  "embeddings": {
    "word_vectors": "path",        `key v1 ... vd` rows, optional `count dim`
    "phrase_vectors": "path",      header, TAB before vector for spaced keys,
    "entity_vectors": "path"       .gz accepted
  },
  "model": {
    "enabled_views": [...],        default: every view in the bundle
    "hidden_dim": 200, "threshold": 0.5, "dropout": 0.5,
    "lr": 0.001, "weight_decay": 0.0005,
    "max_epochs": 1000, "patience": 100, "seed": 1,
    "validation_fraction": 0.1, "view_depth": 1, "final_hidden_dim": 0
  },
  "output_dir": "out"              PQGCN_OUTPUT_DIR env var overrides
}
Every key is overridable with --section.key=value (values parsed as JSON when
possible, e.g. --model.hidden_dim=64 --views.enabled='["word"]').)";

}  // namespace pqgcn::cfg
