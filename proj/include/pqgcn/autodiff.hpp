#ifndef PQGCN_AUTODIFF_HPP
#define PQGCN_AUTODIFF_HPP

#include <functional>
#include <string>
#include <vector>

#include "pqgcn/tensor.hpp"

namespace pqgcn::nn {

struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;  // same shape, zeroed at step start

    Parameter(std::string n, Tensor v)
        : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}
    void zero_grad() { grad.fill(0.0); }
};

using ValueId = int;

// Fixed-tape reverse mode over a closed op set. Each forward op pushes one
// node; backward walks the tape once, in reverse, and is consumable once.
// Every pushed value is checked for non-finite entries so a diverging run
// aborts at the op that produced the bad value.
class Tape {
public:
    // invoked with the id of the node whose output gradient is ready
    using BackwardFn = std::function<void(Tape&, ValueId)>;

    ValueId constant(Tensor value, const char* op_name = "constant");
    ValueId leaf(Parameter& param);
    ValueId push(const char* op_name, Tensor value, BackwardFn backward);

    const Tensor& value(ValueId id) const { return nodes_[static_cast<size_t>(id)].value; }
    // gradient accumulator, lazily zero-initialized to the value's shape
    Tensor& grad(ValueId id);
    bool has_grad(ValueId id) const;
    // false for constants: their gradients are never read, so expensive
    // backward products into them can be skipped
    bool wants_grad(ValueId id) const;

    // loss must be 1x1; flows gradients into every reachable Parameter::grad
    void backward(ValueId loss);
    bool consumed() const { return consumed_; }
    double scalar(ValueId id) const;

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool grad_set = false;
        BackwardFn back;
        const char* op_name;
    };
    std::vector<Node> nodes_;
    bool consumed_ = false;
};

// --- op set -----------------------------------------------------------------
// The SparseMatrix passed to spmm is captured by pointer: it must outlive the
// tape (adjacency and incidence matrices live in the graph bundle).

ValueId spmm(Tape& t, const SparseMatrix* a, ValueId x);
ValueId matmul(Tape& t, ValueId a, ValueId b);
ValueId matmul_nt(Tape& t, ValueId a, ValueId b);  // a * b^T
ValueId add(Tape& t, ValueId a, ValueId b);
ValueId scale(Tape& t, ValueId a, double s);
ValueId concat_cols(Tape& t, const std::vector<ValueId>& xs);
ValueId relu(Tape& t, ValueId x);
// Training mode draws a fresh Bernoulli(1-p) mask from rng and rescales kept
// entries by 1/(1-p); the mask is a constant of the forward pass. Eval mode
// is the identity.
ValueId dropout(Tape& t, ValueId x, double p, bool training, Rng* rng);
ValueId row_l2_normalize(Tape& t, ValueId x);  // zero-norm rows stay zero
ValueId slice_rows(Tape& t, ValueId x, int r0, int r1);
ValueId sum_squares(Tape& t, ValueId x);  // 1x1
// S[i,j] = cosine(row i, row j); zero-norm rows give 0.
ValueId cosine_similarity_matrix(Tape& t, ValueId q);
// mean over masked rows of -log softmax(logits)[label], row-max stabilized
ValueId masked_softmax_cross_entropy(Tape& t, ValueId logits,
                                     const std::vector<int>& labels,
                                     const std::vector<uint8_t>& mask);

Tensor softmax_rows(const Tensor& logits);

}  // namespace pqgcn::nn

#endif
