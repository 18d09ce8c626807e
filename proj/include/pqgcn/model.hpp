#ifndef PQGCN_MODEL_HPP
#define PQGCN_MODEL_HPP

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqgcn/eval.hpp"
#include "pqgcn/graphs.hpp"
#include "pqgcn/optim.hpp"

namespace pqgcn::model {

struct ModelConfig {
    std::vector<graphs::ViewKind> enabled_views;  // canonicalized; at least one
    int hidden_dim = 200;
    double threshold = 0.5;  // cosine threshold tau of the question graph
    double dropout = 0.5;
    double lr = 1e-3;
    double weight_decay = 5e-4;  // applied to first-layer weights
    int max_epochs = 1000;
    int patience = 100;
    uint64_t seed = 1;
    double validation_fraction = 0.1;  // carved out of train for early stopping
    int view_depth = 1;                // 1 or 2 GCN layers per view
    int final_hidden_dim = 0;          // 0 = single output GCN layer

    void validate() const;
    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& j);
};

struct PQGCNParams {
    std::vector<std::unique_ptr<nn::Parameter>> all;

    nn::Parameter* find(const std::string& name);
    const nn::Parameter* find(const std::string& name) const;
    std::vector<nn::Parameter*> pointers();
    std::vector<const nn::Parameter*> const_pointers() const;
    std::vector<nn::Tensor> snapshot_values() const;
    void restore_values(const std::vector<nn::Tensor>& values);

    // Glorot init, seeded; creation order is the canonical view order so a
    // given (bundle, config) pair always yields the same parameter stream.
    static PQGCNParams init(const graphs::GraphBundle& bundle, const ModelConfig& config);
};

// Per-view normalized adjacencies and incidence pointers, computed once per
// run. Must outlive any tape built over it.
struct PreparedInputs {
    std::vector<const graphs::ViewGraph*> views;
    std::vector<nn::SparseMatrix> adjacency;
    std::vector<const graphs::IncidenceMatrix*> incidence;
};

PreparedInputs prepare_inputs(const graphs::GraphBundle& bundle, const ModelConfig& config);

struct ForwardOptions {
    bool training = false;
    Rng* dropout_rng = nullptr;  // required when training and dropout > 0
    // reuse a previously captured threshold mask (gradient checking)
    const std::vector<uint8_t>* frozen_mask = nullptr;
};

struct ForwardResult {
    nn::ValueId question_embeddings = -1;  // Q, pooled per-view encodings
    nn::ValueId dropped = -1;              // Q' (equals Q id in eval mode)
    nn::ValueId similarity = -1;           // S, cosine matrix over Q'
    nn::ValueId adjacency = -1;            // normalized thresholded question graph
    nn::ValueId logits = -1;
    std::shared_ptr<std::vector<uint8_t>> mask;  // threshold mask used (n*n)
};

ForwardResult forward(nn::Tape& tape, const PreparedInputs& inputs,
                      const ModelConfig& config, PQGCNParams& params,
                      const ForwardOptions& opts);

// eval-mode logits; pure function of (bundle, config, params)
nn::Tensor forward_logits(const graphs::GraphBundle& bundle, const ModelConfig& config,
                          PQGCNParams& params);

// Split rows resolved against the bundle: labels per row (-1 = unlabeled),
// the cross-entropy mask (labeled train rows minus the validation carve-out),
// and the row lists themselves.
struct ResolvedSplit {
    std::vector<int> labels;
    std::vector<uint8_t> ce_mask;
    std::vector<int> val_rows;
    std::vector<int> train_rows;  // all labeled train rows
    std::vector<int> test_rows;   // labeled test rows
};

ResolvedSplit resolve_split(const graphs::GraphBundle& bundle, const ModelConfig& config);

// masked CE over ce_mask plus weight decay on the first-layer weights
nn::ValueId training_objective(nn::Tape& tape, const ForwardResult& f, PQGCNParams& params,
                               const ModelConfig& config, const ResolvedSplit& split);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0;
    double val_loss = 0;     // NaN when no validation carve-out
    double val_macro_f1 = 0; // NaN when no validation carve-out
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    int best_epoch = 0;              // 1-based; last epoch when no validation set
    double wall_clock_seconds = 0;   // never serialized into artifacts
    bool has_test_metrics = false;
    eval::MetricsReport test_metrics;
    double train_accuracy = 0;       // over labeled train-split rows, final params
};

struct TrainResult {
    PQGCNParams params;
    TrainReport report;
};

TrainResult train(const graphs::GraphBundle& bundle, const ModelConfig& config);

struct Prediction {
    int question_id = 0;
    int label = 0;  // argmax, ties broken by lowest class index
    std::vector<double> probabilities;
};

std::vector<Prediction> predict(PQGCNParams& params, const graphs::GraphBundle& bundle,
                                const ModelConfig& config);

std::string train_report_tsv(const TrainReport& report);

void save_checkpoint(const std::string& dir, const PQGCNParams& params,
                     const ModelConfig& config, const std::string& bundle_config_hash);

struct Checkpoint {
    PQGCNParams params;
    ModelConfig config;
    std::string bundle_config_hash;
};

// Validates the stored hash against the bundle (vocabulary drift check).
Checkpoint load_checkpoint(const std::string& dir, const graphs::GraphBundle& bundle);

struct AblationRow {
    std::vector<graphs::ViewKind> subset;
    eval::MetricsReport test_metrics;
    int best_epoch = 0;
};

// Independent train+eval per subset, shared seed; `jobs` subsets in flight.
std::vector<AblationRow> ablate(const graphs::GraphBundle& bundle, const ModelConfig& config,
                                const std::vector<std::vector<graphs::ViewKind>>& subsets,
                                int jobs = 1);

std::string ablation_tsv(const std::vector<AblationRow>& rows);

}  // namespace pqgcn::model

#endif
