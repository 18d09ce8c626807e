#ifndef PQGCN_OPTIM_HPP
#define PQGCN_OPTIM_HPP

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqgcn/autodiff.hpp"

namespace pqgcn::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam {
public:
    Adam(AdamConfig cfg, std::vector<Parameter*> params);

    // consumes Parameter::grad; standard bias-corrected update
    void step();
    void zero_grads();
    int64_t step_count() const { return step_; }

private:
    AdamConfig cfg_;
    std::vector<Parameter*> params_;
    std::vector<Tensor> m_, v_;
    int64_t step_ = 0;
};

// Central finite differences on a seeded sample of coordinates (up to
// `coords_per_param` each). `forward` must be deterministic; called with
// with_grad=true it must also populate every Parameter::grad (one tape
// backward), with false it only returns the loss. Returns the max relative
// error |a-n| / max(1e-8, |a|+|n|).
double gradient_check(const std::function<double(bool with_grad)>& forward,
                      const std::vector<Parameter*>& params, double epsilon = 1e-5,
                      int coords_per_param = 50, uint64_t seed = 0);

// Checkpoint directory: manifest.json plus one `<name>.tsv` per parameter.
void save_parameters(const std::string& dir, const std::vector<const Parameter*>& params,
                     const nlohmann::json& extra_manifest);
struct LoadedParameters {
    std::vector<std::pair<std::string, Tensor>> tensors;  // manifest order
    nlohmann::json manifest;
};
LoadedParameters load_parameters(const std::string& dir);

}  // namespace pqgcn::nn

#endif
