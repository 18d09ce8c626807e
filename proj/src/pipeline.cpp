#include "pqgcn/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <memory>

namespace pqgcn::pipeline {

namespace fs = std::filesystem;

PrepareSummary prepare(const cfg::RunConfig& config, const std::string& bundle_dir) {
    config.validate();

    corpus::Corpus c = corpus::load_corpus(config.train_path, config.format, config.trec_labels);
    corpus::DatasetSplit split;
    if (config.test_path) {
        size_t train_count = c.questions.size();
        corpus::load_corpus_into(c, *config.test_path, config.format, config.trec_labels);
        for (size_t k = 0; k < c.questions.size(); ++k) {
            (k < train_count ? split.train_ids : split.test_ids).push_back(c.questions[k].id);
        }
        split.seed = 0;
    } else {
        split = corpus::split_corpus(c.questions, config.test_fraction, config.split_seed);
    }

    std::unique_ptr<nlp::Tagger> tagger;
    if (config.tagger == "pretagged") {
        tagger = std::make_unique<nlp::PretaggedTagger>(*config.pretagged_path);
    } else {
        tagger = std::make_unique<nlp::HeuristicTagger>();
    }

    nlp::PatternSet patterns =
        config.pattern_file ? nlp::PatternSet::load(*config.pattern_file)
                            : nlp::PatternSet::defaults();

    std::unique_ptr<nlp::EntityLexicon> lexicon;
    if (config.lexicon_path) {
        lexicon = std::make_unique<nlp::EntityLexicon>(
            nlp::EntityLexicon::load(*config.lexicon_path));
    }
    std::unique_ptr<emb::EmbeddingTable> word_vecs, phrase_vecs, entity_vecs;
    if (config.word_vectors) {
        word_vecs = std::make_unique<emb::EmbeddingTable>(
            emb::load_vectors(*config.word_vectors, emb::TableKind::Word));
    }
    if (config.phrase_vectors) {
        phrase_vecs = std::make_unique<emb::EmbeddingTable>(
            emb::load_vectors(*config.phrase_vectors, emb::TableKind::Phrase));
    }
    if (config.entity_vectors) {
        entity_vecs = std::make_unique<emb::EmbeddingTable>(
            emb::load_vectors(*config.entity_vectors, emb::TableKind::Entity));
    }

    graphs::BuildOptions options;
    options.enabled = config.resolved_views();
    options.word_window = config.word_window;
    options.tagger = tagger.get();
    options.patterns = &patterns;
    options.lexicon = lexicon.get();
    options.word_vectors = word_vecs.get();
    options.phrase_vectors = phrase_vecs.get();
    options.entity_vectors = entity_vecs.get();

    graphs::GraphBundle bundle = graphs::build_bundle(c, split, options, config.to_json());
    graphs::save_bundle(bundle, bundle_dir);

    PrepareSummary summary;
    summary.bundle_dir = bundle_dir;
    summary.config_hash = bundle.config_hash;
    summary.num_questions = bundle.num_questions();
    summary.train_size = split.train_ids.size();
    summary.test_size = split.test_ids.size();
    for (const auto& g : bundle.views) {
        summary.views.push_back({graphs::view_name(g.view), g.vocab.size(), g.edges.size(),
                                 g.pretrained ? g.pretrained->cols() : 0});
    }
    return summary;
}

namespace {

model::ModelConfig model_config_for(const cfg::RunConfig& config,
                                    const graphs::GraphBundle& bundle) {
    model::ModelConfig mc = config.model_config;
    if (mc.enabled_views.empty()) {
        for (const auto& g : bundle.views) mc.enabled_views.push_back(g.view);
    }
    mc.validate();
    return mc;
}

}  // namespace

TrainSummary train(const cfg::RunConfig& config, const std::string& bundle_dir,
                   const std::string& out_dir) {
    graphs::GraphBundle bundle = graphs::load_bundle(bundle_dir);
    model::ModelConfig mc = model_config_for(config, bundle);

    model::TrainResult result = model::train(bundle, mc);

    fs::create_directories(out_dir);
    TrainSummary summary;
    summary.checkpoint_dir = out_dir + "/checkpoint";
    summary.report_path = out_dir + "/train_report.tsv";
    model::save_checkpoint(summary.checkpoint_dir, result.params, mc, bundle.config_hash);
    write_text_file(summary.report_path, model::train_report_tsv(result.report));
    summary.report = std::move(result.report);
    return summary;
}

EvalSummary evaluate(const std::string& checkpoint_dir, const std::string& bundle_dir,
                     const std::string& out_dir) {
    graphs::GraphBundle bundle = graphs::load_bundle(bundle_dir);
    model::Checkpoint ck = model::load_checkpoint(checkpoint_dir, bundle);
    model::ResolvedSplit rows = model::resolve_split(bundle, ck.config);
    if (rows.test_rows.empty()) {
        throw config_error("eval: the bundle has no labeled test questions");
    }
    nn::Tensor logits = model::forward_logits(bundle, ck.config, ck.params);
    std::vector<int> gold, pred;
    for (int r : rows.test_rows) {
        gold.push_back(rows.labels[static_cast<size_t>(r)]);
        int best = 0;
        for (int j = 1; j < logits.cols(); ++j) {
            if (logits.at(r, j) > logits.at(r, best)) best = j;
        }
        pred.push_back(best);
    }
    EvalSummary summary;
    summary.metrics = eval::macro_prf(gold, pred, static_cast<int>(bundle.label_names.size()));
    fs::create_directories(out_dir);
    summary.tsv_path = out_dir + "/metrics.tsv";
    summary.markdown_path = out_dir + "/metrics.md";
    eval::write_report(summary.metrics, summary.tsv_path, eval::ReportFormat::Tsv);
    eval::write_report(summary.metrics, summary.markdown_path, eval::ReportFormat::Markdown,
                       &bundle.label_names);
    return summary;
}

void write_predictions(const std::string& checkpoint_dir, const std::string& bundle_dir,
                       const std::string& out_path) {
    graphs::GraphBundle bundle = graphs::load_bundle(bundle_dir);
    model::Checkpoint ck = model::load_checkpoint(checkpoint_dir, bundle);
    std::vector<model::Prediction> preds = model::predict(ck.params, bundle, ck.config);

    std::string out = "id\tlabel";
    for (size_t c = 0; c < bundle.label_names.size(); ++c) {
        out += "\tp_" + std::to_string(c);
    }
    out += '\n';
    for (const auto& p : preds) {
        out += std::to_string(p.question_id);
        out += '\t';
        out += bundle.label_names[static_cast<size_t>(p.label)];
        for (double v : p.probabilities) {
            out += '\t';
            out += format_double(v);
        }
        out += '\n';
    }
    write_text_file(out_path, out);
}

double gradcheck(const cfg::RunConfig& config, const std::string& bundle_dir) {
    graphs::GraphBundle bundle = graphs::load_bundle(bundle_dir);
    model::ModelConfig mc = model_config_for(config, bundle);
    model::ResolvedSplit split = model::resolve_split(bundle, mc);
    model::PreparedInputs inputs = model::prepare_inputs(bundle, mc);
    model::PQGCNParams params = model::PQGCNParams::init(bundle, mc);

    // capture the threshold mask at the base point, then keep it frozen
    std::vector<uint8_t> mask;
    {
        nn::Tape tape;
        model::ForwardResult f = model::forward(tape, inputs, mc, params, {});
        mask = *f.mask;
    }
    auto loss_fn = [&](bool with_grad) {
        nn::Tape tape;
        model::ForwardOptions opts;
        opts.frozen_mask = &mask;
        model::ForwardResult f = model::forward(tape, inputs, mc, params, opts);
        nn::ValueId loss = model::training_objective(tape, f, params, mc, split);
        double value = tape.scalar(loss);
        if (with_grad) tape.backward(loss);
        return value;
    };
    return nn::gradient_check(loss_fn, params.pointers());
}

std::vector<model::AblationRow> ablate(const cfg::RunConfig& config,
                                       const std::string& bundle_dir,
                                       const std::vector<std::string>& subset_specs,
                                       int jobs, const std::string& out_path) {
    graphs::GraphBundle bundle = graphs::load_bundle(bundle_dir);
    model::ModelConfig mc = model_config_for(config, bundle);

    std::vector<std::vector<graphs::ViewKind>> subsets;
    for (const auto& spec : subset_specs) {
        std::vector<graphs::ViewKind> subset;
        if (spec == "all") {
            for (const auto& g : bundle.views) subset.push_back(g.view);
        } else {
            for (const auto& name : split_char(spec, ',')) {
                auto v = graphs::view_from_name(name);
                if (!v) throw config_error("ablate: unknown view '" + name + "'");
                subset.push_back(*v);
            }
        }
        subsets.push_back(std::move(subset));
    }
    std::vector<model::AblationRow> rows = model::ablate(bundle, mc, subsets, jobs);
    if (!out_path.empty()) write_text_file(out_path, model::ablation_tsv(rows));
    return rows;
}

}  // namespace pqgcn::pipeline
