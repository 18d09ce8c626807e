// pqgcn -- multi-view graph-convolutional question classifier.
//
// Subcommands: prepare, train, eval, predict, gradcheck, ablate.
// Exit codes: 0 success, 1 validation failure (bad config/arguments,
// checkpoint-bundle mismatch, gradcheck over threshold), 2 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pqgcn/pipeline.hpp"

namespace {

using namespace pqgcn;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> extras;
};

cfg::RunConfig resolve_config(const CommonArgs& args) {
    nlohmann::json j = args.config_path.empty() ? nlohmann::json::object()
                                                : cfg::load_config_file(args.config_path);
    for (const auto& extra : args.extras) {
        if (extra.rfind("--", 0) != 0) {
            throw config_error("unknown argument '" + extra + "' (overrides are --key=value)");
        }
        size_t eq = extra.find('=');
        if (eq == std::string::npos) {
            throw config_error("override '" + extra + "' is missing '=value'");
        }
        cfg::apply_override(j, extra.substr(2, eq - 2), extra.substr(eq + 1));
    }
    cfg::RunConfig config = cfg::RunConfig::from_json(j);
    if (const char* env = std::getenv("PQGCN_OUTPUT_DIR"); env && *env) {
        config.output_dir = env;
    }
    return config;
}

void log_view_counts(const pipeline::PrepareSummary& summary) {
    for (const auto& v : summary.views) {
        info("view " + v.name + ": " + std::to_string(v.nodes) + " nodes, " +
             std::to_string(v.edges) + " edges" +
             (v.pretrained_dim ? ", pretrained dim " + std::to_string(v.pretrained_dim) : ""));
    }
    info("bundle " + summary.bundle_dir + ": " + std::to_string(summary.num_questions) +
         " questions (" + std::to_string(summary.train_size) + " train / " +
         std::to_string(summary.test_size) + " test), config hash " + summary.config_hash);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pqgcn: question classification with multi-view graph convolutions"};
    app.require_subcommand(1);
    app.footer(std::string("Config schema:\n") + cfg::kConfigSchemaHelp);

    CommonArgs prepare_args, train_args, gradcheck_args, ablate_args;
    std::string bundle_dir, out_dir, checkpoint_dir, out_path;
    std::vector<std::string> subset_specs;
    int jobs = 1;

    auto* cmd_prepare = app.add_subcommand("prepare", "build the graph bundle from a corpus");
    cmd_prepare->add_option("--config", prepare_args.config_path, "JSON config file")
        ->required();
    cmd_prepare->add_option("--out", out_dir, "bundle output directory (default: <output_dir>/bundle)");
    cmd_prepare->allow_extras();

    auto* cmd_train = app.add_subcommand("train", "train on a prepared bundle");
    cmd_train->add_option("--config", train_args.config_path, "JSON config file")->required();
    cmd_train->add_option("--bundle", bundle_dir, "bundle directory")->required();
    cmd_train->add_option("--out", out_dir, "output directory (default: <output_dir>)");
    cmd_train->allow_extras();

    auto* cmd_eval = app.add_subcommand("eval", "evaluate a checkpoint on the bundle's test split");
    cmd_eval->add_option("--checkpoint", checkpoint_dir, "checkpoint directory")->required();
    cmd_eval->add_option("--bundle", bundle_dir, "bundle directory")->required();
    cmd_eval->add_option("--out", out_dir, "output directory (default: checkpoint parent)");

    auto* cmd_predict = app.add_subcommand("predict", "write per-question label probabilities");
    cmd_predict->add_option("--checkpoint", checkpoint_dir, "checkpoint directory")->required();
    cmd_predict->add_option("--bundle", bundle_dir, "bundle directory")->required();
    cmd_predict->add_option("--out", out_path, "output TSV path")->required();

    auto* cmd_gradcheck =
        app.add_subcommand("gradcheck", "finite-difference check of the training gradients");
    cmd_gradcheck->add_option("--config", gradcheck_args.config_path, "JSON config file")
        ->required();
    cmd_gradcheck->add_option("--bundle", bundle_dir, "bundle directory")->required();
    cmd_gradcheck->allow_extras();

    auto* cmd_ablate = app.add_subcommand("ablate", "train and evaluate view subsets");
    cmd_ablate->add_option("--config", ablate_args.config_path, "JSON config file")->required();
    cmd_ablate->add_option("--bundle", bundle_dir, "bundle directory")->required();
    cmd_ablate
        ->add_option("--subset", subset_specs,
                     "comma-joined view names (repeatable), or 'all'")
        ->required();
    cmd_ablate->add_option("--jobs", jobs, "subsets trained concurrently (default 1)");
    cmd_ablate->add_option("--out", out_path, "ablation TSV path (default: <output_dir>/ablation.tsv)");
    cmd_ablate->allow_extras();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (cmd_prepare->parsed()) {
            prepare_args.extras = cmd_prepare->remaining();
            cfg::RunConfig config = resolve_config(prepare_args);
            std::string dir = out_dir.empty() ? config.output_dir + "/bundle" : out_dir;
            log_view_counts(pipeline::prepare(config, dir));
        } else if (cmd_train->parsed()) {
            train_args.extras = cmd_train->remaining();
            cfg::RunConfig config = resolve_config(train_args);
            std::string dir = out_dir.empty() ? config.output_dir : out_dir;
            pipeline::TrainSummary summary = pipeline::train(config, bundle_dir, dir);
            info("trained " + std::to_string(summary.report.epochs.size()) + " epochs (best " +
                 std::to_string(summary.report.best_epoch) + ") in " +
                 format_double(summary.report.wall_clock_seconds) + "s; train accuracy " +
                 format_double(summary.report.train_accuracy));
            if (summary.report.has_test_metrics) {
                info("test macro F1 " + format_double(summary.report.test_metrics.macro_f1));
            }
            info("checkpoint: " + summary.checkpoint_dir);
            info("report: " + summary.report_path);
        } else if (cmd_eval->parsed()) {
            std::string dir = out_dir;
            if (dir.empty()) {
                dir = std::filesystem::path(checkpoint_dir).parent_path().string();
                if (dir.empty()) dir = ".";
            }
            pipeline::EvalSummary summary = pipeline::evaluate(checkpoint_dir, bundle_dir, dir);
            info("test macro F1 " + format_double(summary.metrics.macro_f1) + ", precision " +
                 format_double(summary.metrics.macro_precision) + ", recall " +
                 format_double(summary.metrics.macro_recall) + ", accuracy " +
                 format_double(summary.metrics.accuracy));
            info("reports: " + summary.tsv_path + ", " + summary.markdown_path);
        } else if (cmd_predict->parsed()) {
            pipeline::write_predictions(checkpoint_dir, bundle_dir, out_path);
            info("predictions: " + out_path);
        } else if (cmd_gradcheck->parsed()) {
            gradcheck_args.extras = cmd_gradcheck->remaining();
            cfg::RunConfig config = resolve_config(gradcheck_args);
            double max_rel = pipeline::gradcheck(config, bundle_dir);
            std::cout << format_double(max_rel) << "\n";
            if (!(max_rel < 1e-4)) {
                warn("gradcheck failed: max relative error " + format_double(max_rel) +
                     " >= 1e-4");
                return 1;
            }
        } else if (cmd_ablate->parsed()) {
            ablate_args.extras = cmd_ablate->remaining();
            cfg::RunConfig config = resolve_config(ablate_args);
            std::string path = out_path.empty() ? config.output_dir + "/ablation.tsv" : out_path;
            auto rows = pipeline::ablate(config, bundle_dir, subset_specs, jobs, path);
            for (const auto& row : rows) {
                std::vector<std::string> names;
                for (auto v : row.subset) names.emplace_back(graphs::view_name(v));
                info(join(names, "+") + ": macro F1 " +
                     format_double(row.test_metrics.macro_f1));
            }
            info("ablation table: " + path);
        }
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
