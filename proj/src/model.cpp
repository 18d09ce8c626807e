#include "pqgcn/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace pqgcn::model {

void ModelConfig::validate() const {
    if (enabled_views.empty()) throw config_error("model: at least one view must be enabled");
    if (hidden_dim < 1) throw config_error("model: hidden_dim must be >= 1");
    if (threshold < 0.0 || threshold > 1.0) {
        throw config_error("model: threshold must be in [0,1], got " + format_double(threshold));
    }
    if (dropout < 0.0 || dropout >= 1.0) {
        throw config_error("model: dropout must be in [0,1), got " + format_double(dropout));
    }
    if (lr <= 0.0) throw config_error("model: lr must be positive");
    if (weight_decay < 0.0) throw config_error("model: weight_decay must be >= 0");
    if (max_epochs < 1) throw config_error("model: max_epochs must be >= 1");
    if (patience < 0) throw config_error("model: patience must be >= 0");
    if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
        throw config_error("model: validation_fraction must be in [0,1)");
    }
    if (view_depth != 1 && view_depth != 2) {
        throw config_error("model: view_depth must be 1 or 2");
    }
    if (final_hidden_dim < 0) throw config_error("model: final_hidden_dim must be >= 0");
}

nlohmann::json ModelConfig::to_json() const {
    nlohmann::json views = nlohmann::json::array();
    for (auto v : enabled_views) views.push_back(graphs::view_name(v));
    return {{"enabled_views", views},
            {"hidden_dim", hidden_dim},
            {"threshold", threshold},
            {"dropout", dropout},
            {"lr", lr},
            {"weight_decay", weight_decay},
            {"max_epochs", max_epochs},
            {"patience", patience},
            {"seed", seed},
            {"validation_fraction", validation_fraction},
            {"view_depth", view_depth},
            {"final_hidden_dim", final_hidden_dim}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
    ModelConfig c;
    if (j.contains("enabled_views")) {
        c.enabled_views.clear();
        for (const auto& name : j.at("enabled_views")) {
            auto v = graphs::view_from_name(name.get<std::string>());
            if (!v) throw config_error("model: unknown view '" + name.get<std::string>() + "'");
            c.enabled_views.push_back(*v);
        }
    }
    if (j.contains("hidden_dim")) c.hidden_dim = j.at("hidden_dim").get<int>();
    if (j.contains("threshold")) c.threshold = j.at("threshold").get<double>();
    if (j.contains("dropout")) c.dropout = j.at("dropout").get<double>();
    if (j.contains("lr")) c.lr = j.at("lr").get<double>();
    if (j.contains("weight_decay")) c.weight_decay = j.at("weight_decay").get<double>();
    if (j.contains("max_epochs")) c.max_epochs = j.at("max_epochs").get<int>();
    if (j.contains("patience")) c.patience = j.at("patience").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
    if (j.contains("validation_fraction")) {
        c.validation_fraction = j.at("validation_fraction").get<double>();
    }
    if (j.contains("view_depth")) c.view_depth = j.at("view_depth").get<int>();
    if (j.contains("final_hidden_dim")) c.final_hidden_dim = j.at("final_hidden_dim").get<int>();
    return c;
}

namespace {

std::vector<graphs::ViewKind> canonical_views(const std::vector<graphs::ViewKind>& views) {
    std::vector<graphs::ViewKind> out;
    for (graphs::ViewKind v : graphs::kAllViews) {
        if (std::find(views.begin(), views.end(), v) != views.end()) out.push_back(v);
    }
    return out;
}

int num_classes_of(const graphs::GraphBundle& bundle) {
    return static_cast<int>(bundle.label_names.size());
}

}  // namespace

nn::Parameter* PQGCNParams::find(const std::string& name) {
    for (auto& p : all) {
        if (p->name == name) return p.get();
    }
    return nullptr;
}

const nn::Parameter* PQGCNParams::find(const std::string& name) const {
    for (const auto& p : all) {
        if (p->name == name) return p.get();
    }
    return nullptr;
}

std::vector<nn::Parameter*> PQGCNParams::pointers() {
    std::vector<nn::Parameter*> out;
    for (auto& p : all) out.push_back(p.get());
    return out;
}

std::vector<const nn::Parameter*> PQGCNParams::const_pointers() const {
    std::vector<const nn::Parameter*> out;
    for (const auto& p : all) out.push_back(p.get());
    return out;
}

std::vector<nn::Tensor> PQGCNParams::snapshot_values() const {
    std::vector<nn::Tensor> out;
    for (const auto& p : all) out.push_back(p->value);
    return out;
}

void PQGCNParams::restore_values(const std::vector<nn::Tensor>& values) {
    for (size_t k = 0; k < all.size(); ++k) all[k]->value = values[k];
}

PQGCNParams PQGCNParams::init(const graphs::GraphBundle& bundle, const ModelConfig& config) {
    config.validate();
    PQGCNParams params;
    Rng rng(config.seed);
    std::vector<graphs::ViewKind> views = canonical_views(config.enabled_views);
    for (graphs::ViewKind v : views) {
        const graphs::ViewGraph* g = bundle.find_view(v);
        if (!g) {
            throw config_error(std::string("model: bundle does not contain view '") +
                               graphs::view_name(v) + "'");
        }
        int rows = static_cast<int>(g->vocab.size()) +
                   (g->pretrained ? g->pretrained->cols() : 0);
        params.all.push_back(std::make_unique<nn::Parameter>(
            std::string("w1_") + graphs::view_name(v),
            nn::glorot(rows, config.hidden_dim, rng)));
        if (config.view_depth == 2) {
            params.all.push_back(std::make_unique<nn::Parameter>(
                std::string("w2_") + graphs::view_name(v),
                nn::glorot(config.hidden_dim, config.hidden_dim, rng)));
        }
    }
    int q_dim = config.hidden_dim * static_cast<int>(views.size());
    int c = num_classes_of(bundle);
    if (c < 1) throw config_error("model: bundle has no label vocabulary");
    if (config.final_hidden_dim > 0) {
        params.all.push_back(std::make_unique<nn::Parameter>(
            "w_hidden", nn::glorot(q_dim, config.final_hidden_dim, rng)));
        params.all.push_back(std::make_unique<nn::Parameter>(
            "w_out", nn::glorot(config.final_hidden_dim, c, rng)));
    } else {
        params.all.push_back(
            std::make_unique<nn::Parameter>("w_out", nn::glorot(q_dim, c, rng)));
    }
    return params;
}

PreparedInputs prepare_inputs(const graphs::GraphBundle& bundle, const ModelConfig& config) {
    PreparedInputs inputs;
    for (graphs::ViewKind v : canonical_views(config.enabled_views)) {
        const graphs::ViewGraph* g = bundle.find_view(v);
        const graphs::IncidenceMatrix* inc = bundle.find_incidence(v);
        if (!g || !inc) {
            throw config_error(std::string("model: bundle does not contain view '") +
                               graphs::view_name(v) + "'");
        }
        inputs.views.push_back(g);
        inputs.adjacency.push_back(graphs::normalize_adjacency(*g));
        inputs.incidence.push_back(inc);
    }
    return inputs;
}

namespace {

// Thresholded cosine graph with forced self-loops, symmetrically normalized:
// A = mask .* S with unit diagonal, OUT = D^-1/2 A D^-1/2. The mask is a
// constant of the forward pass; gradients flow through the retained S values,
// including their effect on the degrees.
nn::ValueId masked_normalized_similarity(nn::Tape& t, nn::ValueId s_id,
                                         std::shared_ptr<std::vector<uint8_t>> mask) {
    const nn::Tensor& s = t.value(s_id);
    int n = s.rows();
    auto r = std::make_shared<std::vector<double>>(static_cast<size_t>(n));
    nn::Tensor out(n, n);
    for (int i = 0; i < n; ++i) {
        double degree = 1.0;  // forced unit self-loop
        for (int j = 0; j < n; ++j) {
            if (j == i || !(*mask)[static_cast<size_t>(i) * n + j]) continue;
            degree += s.at(i, j);
        }
        (*r)[static_cast<size_t>(i)] = 1.0 / std::sqrt(degree);
    }
    for (int i = 0; i < n; ++i) {
        double ri = (*r)[static_cast<size_t>(i)];
        out.at(i, i) = ri * ri;
        for (int j = 0; j < n; ++j) {
            if (j == i || !(*mask)[static_cast<size_t>(i) * n + j]) continue;
            out.at(i, j) = s.at(i, j) * ri * (*r)[static_cast<size_t>(j)];
        }
    }
    return t.push("question_graph", std::move(out), [s_id, mask, r](nn::Tape& tp,
                                                                    nn::ValueId self) {
        const nn::Tensor& g = tp.grad(self);
        const nn::Tensor& s = tp.value(s_id);
        nn::Tensor& gs = tp.grad(s_id);
        int n = s.rows();
        for (int k = 0; k < n; ++k) {
            double rk = (*r)[static_cast<size_t>(k)];
            // u_k = dL/dr_k over both occurrences of r_k in OUT
            double u = 2.0 * g.at(k, k) * rk;  // diagonal: OUT_kk = r_k^2
            for (int j = 0; j < n; ++j) {
                if (j == k || !(*mask)[static_cast<size_t>(k) * n + j]) continue;
                double a = s.at(k, j);
                double rj = (*r)[static_cast<size_t>(j)];
                u += a * rj * (g.at(k, j) + g.at(j, k));
            }
            double dd = -0.5 * u * rk * rk * rk;  // dL/dd_k
            for (int l = 0; l < n; ++l) {
                if (l == k || !(*mask)[static_cast<size_t>(k) * n + l]) continue;
                double direct = g.at(k, l) * rk * (*r)[static_cast<size_t>(l)];
                gs.at(k, l) += direct + dd;
            }
        }
    });
}

}  // namespace

ForwardResult forward(nn::Tape& tape, const PreparedInputs& inputs, const ModelConfig& config,
                      PQGCNParams& params, const ForwardOptions& opts) {
    if (inputs.views.empty()) throw config_error("model: no views prepared");
    std::vector<nn::ValueId> pooled;
    for (size_t k = 0; k < inputs.views.size(); ++k) {
        const graphs::ViewGraph* g = inputs.views[k];
        nn::Parameter* w1 = params.find(std::string("w1_") + graphs::view_name(g->view));
        if (!w1) throw std::runtime_error("model: missing parameter for view");
        nn::ValueId w1_id = tape.leaf(*w1);
        int nv = static_cast<int>(g->vocab.size());

        // X = [I || E]; the identity half is realized implicitly as a slice of W
        nn::ValueId xw;
        if (g->pretrained) {
            nn::ValueId top = nn::slice_rows(tape, w1_id, 0, nv);
            nn::ValueId bottom =
                nn::slice_rows(tape, w1_id, nv, nv + g->pretrained->cols());
            nn::ValueId e = tape.constant(*g->pretrained, "pretrained");
            xw = nn::add(tape, top, nn::matmul(tape, e, bottom));
        } else {
            xw = w1_id;
        }
        nn::ValueId h = nn::relu(tape, nn::spmm(tape, &inputs.adjacency[k], xw));
        if (config.view_depth == 2) {
            nn::Parameter* w2 = params.find(std::string("w2_") + graphs::view_name(g->view));
            nn::ValueId w2_id = tape.leaf(*w2);
            h = nn::relu(tape, nn::spmm(tape, &inputs.adjacency[k], nn::matmul(tape, h, w2_id)));
        }
        pooled.push_back(nn::spmm(tape, inputs.incidence[k], h));
    }

    ForwardResult result;
    result.question_embeddings = nn::concat_cols(tape, pooled);
    result.dropped = nn::dropout(tape, result.question_embeddings, config.dropout,
                                 opts.training, opts.dropout_rng);
    result.similarity = nn::cosine_similarity_matrix(tape, result.dropped);

    const nn::Tensor& s = tape.value(result.similarity);
    int n = s.rows();
    auto mask = std::make_shared<std::vector<uint8_t>>();
    if (opts.frozen_mask) {
        if (opts.frozen_mask->size() != static_cast<size_t>(n) * static_cast<size_t>(n)) {
            throw std::runtime_error("model: frozen mask size mismatch");
        }
        *mask = *opts.frozen_mask;
    } else {
        mask->assign(static_cast<size_t>(n) * static_cast<size_t>(n), 0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                (*mask)[static_cast<size_t>(i) * n + j] =
                    (i == j) || (s.at(i, j) >= config.threshold);
            }
        }
    }
    result.mask = mask;
    result.adjacency = masked_normalized_similarity(tape, result.similarity, mask);

    nn::Parameter* w_out = params.find("w_out");
    if (config.final_hidden_dim > 0) {
        nn::Parameter* w_hidden = params.find("w_hidden");
        nn::ValueId hq = nn::relu(
            tape, nn::matmul(tape, result.adjacency,
                             nn::matmul(tape, result.dropped, tape.leaf(*w_hidden))));
        result.logits =
            nn::matmul(tape, result.adjacency, nn::matmul(tape, hq, tape.leaf(*w_out)));
    } else {
        result.logits = nn::matmul(
            tape, result.adjacency, nn::matmul(tape, result.dropped, tape.leaf(*w_out)));
    }
    return result;
}

nn::Tensor forward_logits(const graphs::GraphBundle& bundle, const ModelConfig& config,
                          PQGCNParams& params) {
    PreparedInputs inputs = prepare_inputs(bundle, config);
    nn::Tape tape;
    ForwardResult r = forward(tape, inputs, config, params, {});
    return tape.value(r.logits);
}

ResolvedSplit resolve_split(const graphs::GraphBundle& bundle, const ModelConfig& config) {
    ResolvedSplit out;
    int n = bundle.num_questions();
    std::unordered_map<int, int> row_of;
    for (int r = 0; r < n; ++r) row_of.emplace(bundle.question_ids[static_cast<size_t>(r)], r);
    out.labels.assign(static_cast<size_t>(n), -1);
    for (int r = 0; r < n; ++r) {
        if (bundle.labels[static_cast<size_t>(r)]) {
            out.labels[static_cast<size_t>(r)] = *bundle.labels[static_cast<size_t>(r)];
        }
    }
    out.ce_mask.assign(static_cast<size_t>(n), 0);
    for (int id : bundle.split.train_ids) {
        auto it = row_of.find(id);
        if (it == row_of.end()) continue;
        if (out.labels[static_cast<size_t>(it->second)] < 0) {
            warn("model: unlabeled train question id " + std::to_string(id) + " ignored");
            continue;
        }
        out.train_rows.push_back(it->second);
    }
    for (int id : bundle.split.test_ids) {
        auto it = row_of.find(id);
        if (it != row_of.end() && out.labels[static_cast<size_t>(it->second)] >= 0) {
            out.test_rows.push_back(it->second);
        }
    }
    if (out.train_rows.empty()) throw config_error("model: train split has no labeled questions");

    // class coverage warning
    int c = num_classes_of(bundle);
    std::vector<uint8_t> seen(static_cast<size_t>(c), 0);
    for (int r : out.train_rows) seen[static_cast<size_t>(out.labels[static_cast<size_t>(r)])] = 1;
    for (int k = 0; k < c; ++k) {
        if (!seen[static_cast<size_t>(k)]) {
            warn("model: class '" + bundle.label_names[static_cast<size_t>(k)] +
                 "' absent from the train split");
        }
    }

    std::vector<int> shuffled = out.train_rows;
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    rng.shuffle(shuffled);
    size_t n_val = static_cast<size_t>(std::floor(
        static_cast<double>(shuffled.size()) * config.validation_fraction + 1e-9));
    out.val_rows.assign(shuffled.begin(), shuffled.begin() + static_cast<long>(n_val));
    std::sort(out.val_rows.begin(), out.val_rows.end());
    for (int r : out.train_rows) out.ce_mask[static_cast<size_t>(r)] = 1;
    for (int r : out.val_rows) out.ce_mask[static_cast<size_t>(r)] = 0;

    bool have_ce = false;
    for (uint8_t m : out.ce_mask) have_ce |= (m != 0);
    if (!have_ce) {
        // validation carve-out swallowed every labeled train row
        throw config_error("model: validation_fraction leaves no training rows");
    }
    return out;
}

nn::ValueId training_objective(nn::Tape& tape, const ForwardResult& f, PQGCNParams& params,
                               const ModelConfig& config, const ResolvedSplit& split) {
    nn::ValueId loss =
        nn::masked_softmax_cross_entropy(tape, f.logits, split.labels, split.ce_mask);
    if (config.weight_decay > 0) {
        nn::ValueId penalty = -1;
        for (auto& p : params.all) {
            if (p->name.rfind("w1_", 0) != 0) continue;
            nn::ValueId ss = nn::sum_squares(tape, tape.leaf(*p));
            penalty = penalty < 0 ? ss : nn::add(tape, penalty, ss);
        }
        if (penalty >= 0) {
            loss = nn::add(tape, loss, nn::scale(tape, penalty, config.weight_decay));
        }
    }
    return loss;
}

namespace {

double masked_ce_value(const nn::Tensor& logits, const std::vector<int>& labels,
                       const std::vector<int>& rows) {
    double loss = 0;
    for (int r : rows) {
        double mx = logits.at(r, 0);
        for (int j = 1; j < logits.cols(); ++j) mx = std::max(mx, logits.at(r, j));
        double denom = 0;
        for (int j = 0; j < logits.cols(); ++j) denom += std::exp(logits.at(r, j) - mx);
        loss -= logits.at(r, labels[static_cast<size_t>(r)]) - mx - std::log(denom);
    }
    return loss / static_cast<double>(rows.size());
}

int argmax_row(const nn::Tensor& t, int r) {
    int best = 0;
    for (int j = 1; j < t.cols(); ++j) {
        if (t.at(r, j) > t.at(r, best)) best = j;
    }
    return best;
}

}  // namespace

TrainResult train(const graphs::GraphBundle& bundle, const ModelConfig& config) {
    config.validate();
    auto started = std::chrono::steady_clock::now();

    ResolvedSplit rows = resolve_split(bundle, config);
    PreparedInputs inputs = prepare_inputs(bundle, config);
    PQGCNParams params = PQGCNParams::init(bundle, config);

    nn::Adam adam({config.lr}, params.pointers());
    Rng dropout_rng(config.seed ^ 0x7f4a7c159e3779b9ull);

    TrainReport report;
    bool has_val = !rows.val_rows.empty();
    double best_val = 0;
    std::vector<nn::Tensor> best_values;
    int c = num_classes_of(bundle);

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        adam.zero_grads();
        double train_loss = 0;
        try {
            nn::Tape tape;
            ForwardOptions opts;
            opts.training = true;
            opts.dropout_rng = &dropout_rng;
            ForwardResult f = forward(tape, inputs, config, params, opts);
            nn::ValueId loss = training_objective(tape, f, params, config, rows);
            train_loss = tape.scalar(loss);
            tape.backward(loss);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("model: epoch " + std::to_string(epoch) + ": " + e.what());
        }
        adam.step();

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = train_loss;
        stats.val_loss = std::numeric_limits<double>::quiet_NaN();
        stats.val_macro_f1 = std::numeric_limits<double>::quiet_NaN();
        if (has_val) {
            nn::Tape tape;
            ForwardResult f = forward(tape, inputs, config, params, {});
            const nn::Tensor& logits = tape.value(f.logits);
            stats.val_loss = masked_ce_value(logits, rows.labels, rows.val_rows);
            std::vector<int> gold, pred;
            for (int r : rows.val_rows) {
                gold.push_back(rows.labels[static_cast<size_t>(r)]);
                pred.push_back(argmax_row(logits, r));
            }
            stats.val_macro_f1 = eval::macro_prf(gold, pred, c).macro_f1;
        }
        report.epochs.push_back(stats);

        if (has_val) {
            if (report.best_epoch == 0 || stats.val_loss < best_val) {
                best_val = stats.val_loss;
                report.best_epoch = epoch;
                best_values = params.snapshot_values();
            }
            if (epoch - report.best_epoch >= config.patience) break;
        }
    }
    if (has_val) {
        params.restore_values(best_values);
    } else {
        report.best_epoch = static_cast<int>(report.epochs.size());
    }

    // final metrics with the selected parameters
    {
        nn::Tape tape;
        ForwardResult f = forward(tape, inputs, config, params, {});
        const nn::Tensor& logits = tape.value(f.logits);
        int64_t correct = 0;
        for (int r : rows.train_rows) {
            if (argmax_row(logits, r) == rows.labels[static_cast<size_t>(r)]) ++correct;
        }
        report.train_accuracy =
            static_cast<double>(correct) / static_cast<double>(rows.train_rows.size());
        if (!rows.test_rows.empty()) {
            std::vector<int> gold, pred;
            for (int r : rows.test_rows) {
                gold.push_back(rows.labels[static_cast<size_t>(r)]);
                pred.push_back(argmax_row(logits, r));
            }
            report.test_metrics = eval::macro_prf(gold, pred, c);
            report.has_test_metrics = true;
        }
    }

    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return {std::move(params), std::move(report)};
}

std::vector<Prediction> predict(PQGCNParams& params, const graphs::GraphBundle& bundle,
                                const ModelConfig& config) {
    nn::Tensor logits = forward_logits(bundle, config, params);
    nn::Tensor probs = nn::softmax_rows(logits);
    std::vector<Prediction> out;
    out.reserve(static_cast<size_t>(bundle.num_questions()));
    for (int r = 0; r < bundle.num_questions(); ++r) {
        Prediction p;
        p.question_id = bundle.question_ids[static_cast<size_t>(r)];
        p.label = argmax_row(logits, r);
        p.probabilities.resize(static_cast<size_t>(probs.cols()));
        for (int j = 0; j < probs.cols(); ++j) p.probabilities[static_cast<size_t>(j)] = probs.at(r, j);
        out.push_back(std::move(p));
    }
    return out;
}

std::string train_report_tsv(const TrainReport& report) {
    std::string out = "epoch\ttrain_loss\tval_loss\tval_macro_f1\n";
    for (const auto& e : report.epochs) {
        out += std::to_string(e.epoch);
        out += '\t';
        out += format_double(e.train_loss);
        out += '\t';
        out += std::isnan(e.val_loss) ? "-" : format_double(e.val_loss);
        out += '\t';
        out += std::isnan(e.val_macro_f1) ? "-" : format_double(e.val_macro_f1);
        out += '\n';
    }
    out += "# best_epoch\t" + std::to_string(report.best_epoch) + "\n";
    out += "# train_accuracy\t" + format_double(report.train_accuracy) + "\n";
    return out;
}

void save_checkpoint(const std::string& dir, const PQGCNParams& params,
                     const ModelConfig& config, const std::string& bundle_config_hash) {
    nlohmann::json extra;
    extra["model_config"] = config.to_json();
    extra["bundle_config_hash"] = bundle_config_hash;
    nn::save_parameters(dir, params.const_pointers(), extra);
}

Checkpoint load_checkpoint(const std::string& dir, const graphs::GraphBundle& bundle) {
    nn::LoadedParameters loaded = nn::load_parameters(dir);
    Checkpoint ck;
    ck.config = ModelConfig::from_json(loaded.manifest.at("model_config"));
    ck.bundle_config_hash = loaded.manifest.at("bundle_config_hash").get<std::string>();
    if (ck.bundle_config_hash != bundle.config_hash) {
        throw config_error("model: checkpoint was trained on a different bundle (config hash " +
                           ck.bundle_config_hash + " vs " + bundle.config_hash + ")");
    }
    ck.params = PQGCNParams::init(bundle, ck.config);
    for (const auto& [name, tensor] : loaded.tensors) {
        nn::Parameter* p = ck.params.find(name);
        if (!p) throw std::runtime_error("model: checkpoint has unexpected parameter '" + name + "'");
        if (!p->value.same_shape(tensor)) {
            throw std::runtime_error("model: checkpoint parameter '" + name + "' has shape " +
                                     tensor.shape_str() + ", expected " + p->value.shape_str());
        }
        p->value = tensor;
    }
    return ck;
}

std::vector<AblationRow> ablate(const graphs::GraphBundle& bundle, const ModelConfig& config,
                                const std::vector<std::vector<graphs::ViewKind>>& subsets,
                                int jobs) {
    if (subsets.empty()) throw config_error("model: no ablation subsets given");
    for (const auto& s : subsets) {
        if (s.empty()) throw config_error("model: empty ablation subset");
    }
    std::vector<AblationRow> rows(subsets.size());
    std::exception_ptr failure;
    std::mutex mutex;
    size_t cursor = 0;
    auto worker = [&]() {
        while (true) {
            size_t k;
            {
                std::lock_guard<std::mutex> lock(mutex);
                if (cursor >= subsets.size() || failure) return;
                k = cursor++;
            }
            try {
                ModelConfig sub = config;
                sub.enabled_views = canonical_views(subsets[k]);
                TrainResult result = train(bundle, sub);
                if (!result.report.has_test_metrics) {
                    throw std::runtime_error("model: ablation subset has no labeled test rows");
                }
                rows[k] = {sub.enabled_views, result.report.test_metrics,
                           result.report.best_epoch};
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(subsets.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int k = 0; k < n_threads; ++k) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::string ablation_tsv(const std::vector<AblationRow>& rows) {
    std::string out = "views\tmacro_f1\tmacro_precision\tmacro_recall\taccuracy\tbest_epoch\n";
    for (const auto& row : rows) {
        std::vector<std::string> names;
        for (auto v : row.subset) names.emplace_back(graphs::view_name(v));
        out += join(names, "+");
        out += '\t';
        out += format_double(row.test_metrics.macro_f1);
        out += '\t';
        out += format_double(row.test_metrics.macro_precision);
        out += '\t';
        out += format_double(row.test_metrics.macro_recall);
        out += '\t';
        out += format_double(row.test_metrics.accuracy);
        out += '\t';
        out += std::to_string(row.best_epoch);
        out += '\n';
    }
    return out;
}

}  // namespace pqgcn::model
