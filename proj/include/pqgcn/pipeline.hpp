#ifndef PQGCN_PIPELINE_HPP
#define PQGCN_PIPELINE_HPP

#include <string>
#include <vector>

#include "pqgcn/config.hpp"
#include "pqgcn/eval.hpp"
#include "pqgcn/model.hpp"

namespace pqgcn::pipeline {

struct ViewSummary {
    std::string name;
    size_t nodes = 0;
    size_t edges = 0;
    int pretrained_dim = 0;
};

struct PrepareSummary {
    std::string bundle_dir;
    std::string config_hash;
    int num_questions = 0;
    size_t train_size = 0, test_size = 0;
    std::vector<ViewSummary> views;
};

// corpus -> nlp -> stats -> graphs; writes the bundle directory
PrepareSummary prepare(const cfg::RunConfig& config, const std::string& bundle_dir);

struct TrainSummary {
    std::string checkpoint_dir;
    std::string report_path;
    model::TrainReport report;
};

// model config defaults its enabled views to the bundle's views when unset
TrainSummary train(const cfg::RunConfig& config, const std::string& bundle_dir,
                   const std::string& out_dir);

struct EvalSummary {
    eval::MetricsReport metrics;
    std::string tsv_path, markdown_path;
};

EvalSummary evaluate(const std::string& checkpoint_dir, const std::string& bundle_dir,
                     const std::string& out_dir);

// `id<TAB>label<TAB>p_0..p_{C-1}` rows for every question
void write_predictions(const std::string& checkpoint_dir, const std::string& bundle_dir,
                       const std::string& out_path);

// max relative gradient error of the full training objective on the bundle,
// dropout off and the threshold mask frozen at the base point
double gradcheck(const cfg::RunConfig& config, const std::string& bundle_dir);

std::vector<model::AblationRow> ablate(const cfg::RunConfig& config,
                                       const std::string& bundle_dir,
                                       const std::vector<std::string>& subset_specs,
                                       int jobs, const std::string& out_path);

}  // namespace pqgcn::pipeline

#endif
