#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pqgcn/pipeline.hpp"

namespace py = pybind11;
using namespace pqgcn;

namespace {

corpus::CorpusFormat format_from(const std::string& name) {
    if (name == "tsv") return corpus::CorpusFormat::Tsv;
    if (name == "trec") return corpus::CorpusFormat::Trec;
    throw config_error("format must be tsv or trec, got '" + name + "'");
}

cfg::RunConfig config_from(const py::dict& d) {
    nlohmann::json j = nlohmann::json::parse(
        py::module_::import("json").attr("dumps")(d).cast<std::string>());
    return cfg::RunConfig::from_json(j);
}

py::dict metrics_dict(const eval::MetricsReport& m) {
    py::dict out;
    out["n"] = m.n;
    out["num_classes"] = m.num_classes;
    out["accuracy"] = m.accuracy;
    out["macro_precision"] = m.macro_precision;
    out["macro_recall"] = m.macro_recall;
    out["macro_f1"] = m.macro_f1;
    out["precision"] = m.precision;
    out["recall"] = m.recall;
    out["f1"] = m.f1;
    out["confusion"] = m.confusion;
    return out;
}

}  // namespace

PYBIND11_MODULE(_pqgcn, m) {
    m.doc() = "Multi-view graph-convolutional question classification";

    m.def("clean_text", [](const std::string& raw) { return corpus::clean_text(raw); },
          py::arg("raw"));

    m.def(
        "load_corpus",
        [](const std::string& path, const std::string& format, const std::string& trec_labels) {
            corpus::Corpus c = corpus::load_corpus(
                path, format_from(format),
                trec_labels == "fine" ? corpus::TrecLabels::Fine : corpus::TrecLabels::Coarse);
            py::list questions;
            for (const auto& q : c.questions) {
                py::dict d;
                d["id"] = q.id;
                d["raw_text"] = q.raw_text;
                d["clean_text"] = q.clean_text;
                d["tokens"] = q.tokens;
                if (q.label) d["label"] = c.labels.names[static_cast<size_t>(*q.label)];
                else d["label"] = py::none();
                questions.append(d);
            }
            return py::make_tuple(questions, c.labels.names);
        },
        py::arg("path"), py::arg("format") = "tsv", py::arg("trec_labels") = "coarse");

    m.def(
        "tag_tokens",
        [](const std::vector<std::string>& tokens) {
            static const nlp::HeuristicTagger tagger;
            std::vector<std::string> out;
            for (const auto& t : nlp::tag_tokens(tokens, tagger)) {
                out.emplace_back(nlp::tag_name(t.tag));
            }
            return out;
        },
        py::arg("tokens"));

    m.def(
        "extract_phrases",
        [](const std::string& text,
           const std::optional<std::vector<std::pair<std::string, std::string>>>& patterns) {
            nlp::PatternSet set;
            if (patterns) {
                for (const auto& [kind, regex] : *patterns) {
                    if (kind != "noun_phrase" && kind != "verb_phrase") {
                        throw config_error("phrase kind must be noun_phrase or verb_phrase");
                    }
                    set.entries.push_back({kind == "noun_phrase" ? nlp::PhraseKind::NounPhrase
                                                                 : nlp::PhraseKind::VerbPhrase,
                                           nlp::TagRegex::compile(regex)});
                }
            } else {
                set = nlp::PatternSet::defaults();
            }
            static const nlp::HeuristicTagger tagger;
            auto tokens = split_ws(corpus::clean_text(text));
            py::list out;
            for (const auto& match : nlp::extract_phrases(nlp::tag_tokens(tokens, tagger), set)) {
                py::dict d;
                d["text"] = match.text;
                d["phrase_tag"] = match.phrase_tag;
                d["start"] = match.start;
                d["end"] = match.end;
                d["kind"] = nlp::phrase_kind_name(match.kind);
                out.append(d);
            }
            return out;
        },
        py::arg("text"), py::arg("patterns") = py::none());

    m.def(
        "match_entities",
        [](const std::string& text, const std::vector<std::string>& surfaces) {
            nlp::EntityLexicon lexicon;
            for (const auto& s : surfaces) lexicon.add(s);
            py::list out;
            for (const auto& match :
                 nlp::match_entities(corpus::clean_text(text), lexicon)) {
                out.append(py::make_tuple(match.surface, match.start, match.end));
            }
            return out;
        },
        py::arg("text"), py::arg("surfaces"));

    m.def(
        "ppmi_edges",
        [](const std::vector<std::vector<std::string>>& sequences, const py::object& window) {
            int w = stats::kWholeSequenceWindow;
            if (!window.is_none() && !py::isinstance<py::str>(window)) {
                w = window.cast<int>();
            }
            stats::CooccurrenceCounts counts = stats::count_cooccurrence(sequences, w);
            py::list out;
            for (const auto& e : stats::ppmi(counts)) {
                out.append(py::make_tuple(counts.keys[static_cast<size_t>(e.i)],
                                          counts.keys[static_cast<size_t>(e.j)], e.weight));
            }
            return out;
        },
        py::arg("sequences"), py::arg("window") = py::none(),
        "window: sliding width as int, or None/'whole' for one window per sequence");

    m.def(
        "cosine",
        [](const std::vector<double>& u, const std::vector<double>& v) {
            return stats::cosine(u, v);
        },
        py::arg("u"), py::arg("v"));

    m.def(
        "macro_prf",
        [](const std::vector<int>& gold, const std::vector<int>& pred, int num_classes) {
            return metrics_dict(eval::macro_prf(gold, pred, num_classes));
        },
        py::arg("gold"), py::arg("pred"), py::arg("num_classes"));

    m.def(
        "prepare",
        [](const py::dict& config, const std::string& bundle_dir) {
            pipeline::PrepareSummary s = pipeline::prepare(config_from(config), bundle_dir);
            py::dict out;
            out["bundle_dir"] = s.bundle_dir;
            out["config_hash"] = s.config_hash;
            out["num_questions"] = s.num_questions;
            out["train_size"] = s.train_size;
            out["test_size"] = s.test_size;
            py::list views;
            for (const auto& v : s.views) {
                py::dict d;
                d["name"] = v.name;
                d["nodes"] = v.nodes;
                d["edges"] = v.edges;
                d["pretrained_dim"] = v.pretrained_dim;
                views.append(d);
            }
            out["views"] = views;
            return out;
        },
        py::arg("config"), py::arg("bundle_dir"));

    m.def(
        "train",
        [](const py::dict& config, const std::string& bundle_dir, const std::string& out_dir) {
            pipeline::TrainSummary s = pipeline::train(config_from(config), bundle_dir, out_dir);
            py::dict out;
            out["checkpoint_dir"] = s.checkpoint_dir;
            out["report_path"] = s.report_path;
            out["epochs"] = s.report.epochs.size();
            out["best_epoch"] = s.report.best_epoch;
            out["train_accuracy"] = s.report.train_accuracy;
            if (s.report.has_test_metrics) {
                out["test_metrics"] = metrics_dict(s.report.test_metrics);
            }
            return out;
        },
        py::arg("config"), py::arg("bundle_dir"), py::arg("out_dir"));

    m.def(
        "evaluate",
        [](const std::string& checkpoint_dir, const std::string& bundle_dir,
           const std::string& out_dir) {
            return metrics_dict(pipeline::evaluate(checkpoint_dir, bundle_dir, out_dir).metrics);
        },
        py::arg("checkpoint_dir"), py::arg("bundle_dir"), py::arg("out_dir"));

    m.def("predict_to_file", &pipeline::write_predictions, py::arg("checkpoint_dir"),
          py::arg("bundle_dir"), py::arg("out_path"));

    m.def(
        "gradcheck",
        [](const py::dict& config, const std::string& bundle_dir) {
            return pipeline::gradcheck(config_from(config), bundle_dir);
        },
        py::arg("config"), py::arg("bundle_dir"));

    py::register_exception<config_error>(m, "ConfigError");
}
