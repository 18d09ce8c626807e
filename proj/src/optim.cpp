#include "pqgcn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace pqgcn::nn {

namespace fs = std::filesystem;

Adam::Adam(AdamConfig cfg, std::vector<Parameter*> params)
    : cfg_(cfg), params_(std::move(params)) {
    for (const Parameter* p : params_) {
        m_.emplace_back(p->value.rows(), p->value.cols());
        v_.emplace_back(p->value.rows(), p->value.cols());
    }
}

void Adam::step() {
    ++step_;
    double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (size_t p = 0; p < params_.size(); ++p) {
        Tensor& value = params_[p]->value;
        const Tensor& grad = params_[p]->grad;
        for (size_t k = 0; k < value.size(); ++k) {
            double g = grad.data()[k];
            double& m = m_[p].data()[k];
            double& v = v_[p].data()[k];
            m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
            v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
            double m_hat = m / bc1;
            double v_hat = v / bc2;
            value.data()[k] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
        }
    }
}

void Adam::zero_grads() {
    for (Parameter* p : params_) p->zero_grad();
}

double gradient_check(const std::function<double(bool)>& forward,
                      const std::vector<Parameter*>& params, double epsilon,
                      int coords_per_param, uint64_t seed) {
    for (Parameter* p : params) p->zero_grad();
    double base = forward(true);
    if (!std::isfinite(base)) {
        throw std::runtime_error("nn: gradient check forward produced a non-finite loss");
    }
    std::vector<Tensor> analytic;
    for (Parameter* p : params) analytic.push_back(p->grad);

    Rng rng(seed);
    double max_rel = 0;
    for (size_t pi = 0; pi < params.size(); ++pi) {
        Parameter* p = params[pi];
        size_t total = p->value.size();
        std::vector<size_t> coords(total);
        for (size_t k = 0; k < total; ++k) coords[k] = k;
        if (total > static_cast<size_t>(coords_per_param)) {
            rng.shuffle(coords);
            coords.resize(static_cast<size_t>(coords_per_param));
        }
        for (size_t k : coords) {
            double original = p->value.data()[k];
            p->value.data()[k] = original + epsilon;
            double up = forward(false);
            p->value.data()[k] = original - epsilon;
            double down = forward(false);
            p->value.data()[k] = original;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw std::runtime_error("nn: gradient check perturbation gave non-finite loss");
            }
            double numeric = (up - down) / (2.0 * epsilon);
            double a = analytic[pi].data()[k];
            double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

void save_parameters(const std::string& dir, const std::vector<const Parameter*>& params,
                     const nlohmann::json& extra_manifest) {
    fs::create_directories(dir);
    nlohmann::json manifest = extra_manifest;
    manifest["format_version"] = 1;
    nlohmann::json plist = nlohmann::json::array();
    for (const Parameter* p : params) {
        plist.push_back({{"name", p->name},
                         {"rows", p->value.rows()},
                         {"cols", p->value.cols()},
                         {"file", p->name + ".tsv"}});
        std::string out;
        for (int r = 0; r < p->value.rows(); ++r) {
            for (int c = 0; c < p->value.cols(); ++c) {
                if (c) out += '\t';
                out += format_double(p->value.at(r, c));
            }
            out += '\n';
        }
        write_text_file(dir + "/" + p->name + ".tsv", out);
    }
    manifest["parameters"] = plist;
    write_text_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

LoadedParameters load_parameters(const std::string& dir) {
    std::string manifest_path = dir + "/manifest.json";
    if (!fs::exists(manifest_path)) {
        throw std::runtime_error("nn: checkpoint member missing: " + manifest_path);
    }
    LoadedParameters out;
    out.manifest = nlohmann::json::parse(read_text_file(manifest_path));
    for (const auto& entry : out.manifest.at("parameters")) {
        std::string file = dir + "/" + entry.at("file").get<std::string>();
        if (!fs::exists(file)) {
            throw std::runtime_error("nn: checkpoint member missing: " + file);
        }
        int rows = entry.at("rows").get<int>();
        int cols = entry.at("cols").get<int>();
        Tensor t(rows, cols);
        std::istringstream in(read_text_file(file));
        std::string line;
        for (int r = 0; r < rows; ++r) {
            if (!std::getline(in, line)) {
                throw std::runtime_error("nn: " + file + ": expected " + std::to_string(rows) +
                                         " rows");
            }
            auto fields = split_char(line, '\t');
            if (static_cast<int>(fields.size()) != cols) {
                throw std::runtime_error("nn: " + file + ":" + std::to_string(r + 1) +
                                         ": expected " + std::to_string(cols) + " columns");
            }
            for (int c = 0; c < cols; ++c) {
                t.at(r, c) = parse_double(fields[static_cast<size_t>(c)],
                                          file + ":" + std::to_string(r + 1));
            }
        }
        out.tensors.emplace_back(entry.at("name").get<std::string>(), std::move(t));
    }
    return out;
}

}  // namespace pqgcn::nn
