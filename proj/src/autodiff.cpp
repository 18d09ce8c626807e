#include "pqgcn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace pqgcn::nn {

ValueId Tape::constant(Tensor value, const char* op_name) {
    return push(op_name, std::move(value), nullptr);
}

ValueId Tape::leaf(Parameter& param) {
    Parameter* p = &param;
    return push("leaf", param.value, [p](Tape& t, ValueId self) {
        const Tensor& g = t.grad(self);
        for (size_t k = 0; k < g.size(); ++k) p->grad.data()[k] += g.data()[k];
    });
}

ValueId Tape::push(const char* op_name, Tensor value, BackwardFn backward) {
    if (!value.all_finite()) {
        throw std::runtime_error(std::string("nn: op '") + op_name +
                                 "' produced non-finite values");
    }
    nodes_.push_back({std::move(value), Tensor(), false, std::move(backward), op_name});
    return static_cast<ValueId>(nodes_.size()) - 1;
}

Tensor& Tape::grad(ValueId id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.grad_set) {
        n.grad = Tensor(n.value.rows(), n.value.cols());
        n.grad_set = true;
    }
    return n.grad;
}

bool Tape::has_grad(ValueId id) const { return nodes_[static_cast<size_t>(id)].grad_set; }

bool Tape::wants_grad(ValueId id) const {
    return nodes_[static_cast<size_t>(id)].back != nullptr;
}

double Tape::scalar(ValueId id) const {
    const Tensor& v = value(id);
    if (v.rows() != 1 || v.cols() != 1) {
        throw std::runtime_error("nn: expected a 1x1 tensor, got " + v.shape_str());
    }
    return v.at(0, 0);
}

void Tape::backward(ValueId loss) {
    if (consumed_) throw std::runtime_error("nn: tape already consumed by a backward pass");
    consumed_ = true;
    const Tensor& lv = value(loss);
    if (lv.rows() != 1 || lv.cols() != 1) {
        throw std::runtime_error("nn: backward needs a scalar loss, got " + lv.shape_str());
    }
    grad(loss).at(0, 0) = 1.0;
    for (ValueId id = loss; id >= 0; --id) {
        Node& n = nodes_[static_cast<size_t>(id)];
        if (!n.grad_set || !n.back) continue;
        n.back(*this, id);
    }
}

// ---------------------------------------------------------------------------
// ops
// ---------------------------------------------------------------------------

namespace {

void accumulate(Tensor& into, const Tensor& g) {
    for (size_t k = 0; k < into.size(); ++k) into.data()[k] += g.data()[k];
}

}  // namespace

ValueId spmm(Tape& t, const SparseMatrix* a, ValueId x) {
    Tensor y = a->multiply(t.value(x));
    return t.push("spmm", std::move(y), [a, x](Tape& tp, ValueId self) {
        if (tp.wants_grad(x)) accumulate(tp.grad(x), a->multiply_transposed(tp.grad(self)));
    });
}

ValueId matmul(Tape& t, ValueId a, ValueId b) {
    Tensor y = matmul(t.value(a), t.value(b));
    return t.push("matmul", std::move(y), [a, b](Tape& tp, ValueId self) {
        const Tensor& g = tp.grad(self);
        if (tp.wants_grad(a)) accumulate(tp.grad(a), matmul_nt(g, tp.value(b)));
        if (tp.wants_grad(b)) accumulate(tp.grad(b), matmul_tn(tp.value(a), g));
    });
}

ValueId matmul_nt(Tape& t, ValueId a, ValueId b) {
    Tensor y = matmul_nt(t.value(a), t.value(b));
    return t.push("matmul_nt", std::move(y), [a, b](Tape& tp, ValueId self) {
        const Tensor& g = tp.grad(self);
        if (tp.wants_grad(a)) accumulate(tp.grad(a), matmul(g, tp.value(b)));
        if (tp.wants_grad(b)) accumulate(tp.grad(b), matmul_tn(g, tp.value(a)));
    });
}

ValueId add(Tape& t, ValueId a, ValueId b) {
    Tensor y = add(t.value(a), t.value(b));
    return t.push("add", std::move(y), [a, b](Tape& tp, ValueId self) {
        const Tensor& g = tp.grad(self);
        accumulate(tp.grad(a), g);
        accumulate(tp.grad(b), g);
    });
}

ValueId scale(Tape& t, ValueId a, double s) {
    Tensor y = scale(t.value(a), s);
    return t.push("scale", std::move(y), [a, s](Tape& tp, ValueId self) {
        accumulate(tp.grad(a), scale(tp.grad(self), s));
    });
}

ValueId concat_cols(Tape& t, const std::vector<ValueId>& xs) {
    if (xs.empty()) throw std::runtime_error("nn: concat_cols of nothing");
    int rows = t.value(xs[0]).rows();
    int cols = 0;
    for (ValueId x : xs) {
        if (t.value(x).rows() != rows) {
            throw std::runtime_error("nn: concat_cols row mismatch (" +
                                     t.value(xs[0]).shape_str() + " vs " +
                                     t.value(x).shape_str() + ")");
        }
        cols += t.value(x).cols();
    }
    Tensor y(rows, cols);
    int offset = 0;
    for (ValueId x : xs) {
        const Tensor& v = t.value(x);
        for (int r = 0; r < rows; ++r) {
            std::copy(v.data() + static_cast<size_t>(r) * v.cols(),
                      v.data() + static_cast<size_t>(r + 1) * v.cols(),
                      y.data() + static_cast<size_t>(r) * cols + offset);
        }
        offset += v.cols();
    }
    std::vector<ValueId> deps = xs;
    return t.push("concat_cols", std::move(y), [deps](Tape& tp, ValueId self) {
        const Tensor& g = tp.grad(self);
        int offset = 0;
        for (ValueId x : deps) {
            Tensor& gx = tp.grad(x);
            for (int r = 0; r < gx.rows(); ++r) {
                for (int c = 0; c < gx.cols(); ++c) {
                    gx.at(r, c) += g.at(r, offset + c);
                }
            }
            offset += gx.cols();
        }
    });
}

ValueId relu(Tape& t, ValueId x) {
    const Tensor& v = t.value(x);
    Tensor y(v.rows(), v.cols());
    for (size_t k = 0; k < v.size(); ++k) y.data()[k] = v.data()[k] > 0 ? v.data()[k] : 0.0;
    return t.push("relu", std::move(y), [x](Tape& tp, ValueId self) {
        const Tensor& g = tp.grad(self);
        const Tensor& v = tp.value(x);
        Tensor& gx = tp.grad(x);
        for (size_t k = 0; k < v.size(); ++k) {
            if (v.data()[k] > 0) gx.data()[k] += g.data()[k];
        }
    });
}

ValueId dropout(Tape& t, ValueId x, double p, bool training, Rng* rng) {
    if (p < 0.0 || p >= 1.0) {
        throw std::runtime_error("nn: dropout probability must be in [0,1), got " +
                                 format_double(p));
    }
    if (!training || p == 0.0) return x;  // identity in eval mode
    if (!rng) throw std::runtime_error("nn: training-mode dropout needs an rng");
    const Tensor& v = t.value(x);
    auto mask = std::make_shared<std::vector<uint8_t>>(v.size());
    double keep_scale = 1.0 / (1.0 - p);
    Tensor y(v.rows(), v.cols());
    for (size_t k = 0; k < v.size(); ++k) {
        bool keep = rng->next_double() >= p;
        (*mask)[k] = keep;
        y.data()[k] = keep ? v.data()[k] * keep_scale : 0.0;
    }
    return t.push("dropout", std::move(y), [x, mask, keep_scale](Tape& tp, ValueId self) {
        const Tensor& g = tp.grad(self);
        Tensor& gx = tp.grad(x);
        for (size_t k = 0; k < gx.size(); ++k) {
            if ((*mask)[k]) gx.data()[k] += g.data()[k] * keep_scale;
        }
    });
}

ValueId row_l2_normalize(Tape& t, ValueId x) {
    const Tensor& v = t.value(x);
    auto norms = std::make_shared<std::vector<double>>(static_cast<size_t>(v.rows()));
    Tensor y(v.rows(), v.cols());
    for (int r = 0; r < v.rows(); ++r) {
        double s = 0;
        for (int c = 0; c < v.cols(); ++c) s += v.at(r, c) * v.at(r, c);
        double norm = std::sqrt(s);
        (*norms)[static_cast<size_t>(r)] = norm;
        if (norm < 1e-12) continue;  // zero-norm rows stay zero
        for (int c = 0; c < v.cols(); ++c) y.at(r, c) = v.at(r, c) / norm;
    }
    return t.push("row_l2_normalize", std::move(y), [x, norms](Tape& tp, ValueId self) {
        const Tensor& g = tp.grad(self);
        const Tensor& y = tp.value(self);
        Tensor& gx = tp.grad(x);
        for (int r = 0; r < g.rows(); ++r) {
            double norm = (*norms)[static_cast<size_t>(r)];
            if (norm < 1e-12) continue;
            double dot = 0;
            for (int c = 0; c < g.cols(); ++c) dot += g.at(r, c) * y.at(r, c);
            for (int c = 0; c < g.cols(); ++c) {
                gx.at(r, c) += (g.at(r, c) - dot * y.at(r, c)) / norm;
            }
        }
    });
}

ValueId slice_rows(Tape& t, ValueId x, int r0, int r1) {
    const Tensor& v = t.value(x);
    if (r0 < 0 || r1 < r0 || r1 > v.rows()) {
        throw std::runtime_error("nn: slice_rows [" + std::to_string(r0) + "," +
                                 std::to_string(r1) + ") outside " + v.shape_str());
    }
    Tensor y(r1 - r0, v.cols());
    std::copy(v.data() + static_cast<size_t>(r0) * v.cols(),
              v.data() + static_cast<size_t>(r1) * v.cols(), y.data());
    return t.push("slice_rows", std::move(y), [x, r0](Tape& tp, ValueId self) {
        const Tensor& g = tp.grad(self);
        Tensor& gx = tp.grad(x);
        for (int r = 0; r < g.rows(); ++r) {
            for (int c = 0; c < g.cols(); ++c) gx.at(r0 + r, c) += g.at(r, c);
        }
    });
}

ValueId sum_squares(Tape& t, ValueId x) {
    const Tensor& v = t.value(x);
    double s = 0;
    for (size_t k = 0; k < v.size(); ++k) s += v.data()[k] * v.data()[k];
    Tensor y(1, 1);
    y.at(0, 0) = s;
    return t.push("sum_squares", std::move(y), [x](Tape& tp, ValueId self) {
        double g = tp.grad(self).at(0, 0);
        const Tensor& v = tp.value(x);
        Tensor& gx = tp.grad(x);
        for (size_t k = 0; k < v.size(); ++k) gx.data()[k] += 2.0 * g * v.data()[k];
    });
}

namespace {

// Z * Z^T with the upper triangle computed once and mirrored, so the result
// is symmetric bit for bit and costs half of the generic matmul_nt. Backward
// fuses dZ += (G + G^T) Z into a single product.
ValueId symmetric_gram(Tape& t, ValueId z) {
    const Tensor& v = t.value(z);
    int n = v.rows(), d = v.cols();
    Tensor y(n, n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double* zi = v.data() + static_cast<size_t>(i) * d;
        for (int j = i; j < n; ++j) {
            const double* zj = v.data() + static_cast<size_t>(j) * d;
            // four fixed-order accumulators: deterministic and vectorizable
            double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
            int k = 0;
            for (; k + 4 <= d; k += 4) {
                a0 += zi[k] * zj[k];
                a1 += zi[k + 1] * zj[k + 1];
                a2 += zi[k + 2] * zj[k + 2];
                a3 += zi[k + 3] * zj[k + 3];
            }
            double acc = (a0 + a1) + (a2 + a3);
            for (; k < d; ++k) acc += zi[k] * zj[k];
            y.at(i, j) = acc;
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) y.at(i, j) = y.at(j, i);
    }
    return t.push("symmetric_gram", std::move(y), [z](Tape& tp, ValueId self) {
        if (!tp.wants_grad(z)) return;
        const Tensor& g = tp.grad(self);
        Tensor sym(g.rows(), g.cols());
        for (int i = 0; i < g.rows(); ++i) {
            for (int j = 0; j < g.cols(); ++j) sym.at(i, j) = g.at(i, j) + g.at(j, i);
        }
        accumulate(tp.grad(z), matmul(sym, tp.value(z)));
    });
}

}  // namespace

ValueId cosine_similarity_matrix(Tape& t, ValueId q) {
    return symmetric_gram(t, row_l2_normalize(t, q));
}

ValueId masked_softmax_cross_entropy(Tape& t, ValueId logits_id,
                                     const std::vector<int>& labels,
                                     const std::vector<uint8_t>& mask) {
    const Tensor& logits = t.value(logits_id);
    int n = logits.rows(), c = logits.cols();
    if (static_cast<int>(labels.size()) != n || static_cast<int>(mask.size()) != n) {
        throw std::runtime_error("nn: cross-entropy labels/mask length mismatch");
    }
    auto rows = std::make_shared<std::vector<int>>();
    for (int r = 0; r < n; ++r) {
        if (!mask[static_cast<size_t>(r)]) continue;
        if (labels[static_cast<size_t>(r)] < 0 || labels[static_cast<size_t>(r)] >= c) {
            throw std::runtime_error("nn: masked row " + std::to_string(r) +
                                     " has label outside [0," + std::to_string(c) + ")");
        }
        rows->push_back(r);
    }
    if (rows->empty()) throw std::runtime_error("nn: cross-entropy mask selects no rows");

    auto probs = std::make_shared<Tensor>(static_cast<int>(rows->size()), c);
    double loss = 0;
    for (size_t k = 0; k < rows->size(); ++k) {
        int r = (*rows)[k];
        double mx = logits.at(r, 0);
        for (int j = 1; j < c; ++j) mx = std::max(mx, logits.at(r, j));
        double denom = 0;
        for (int j = 0; j < c; ++j) denom += std::exp(logits.at(r, j) - mx);
        double log_denom = std::log(denom);
        for (int j = 0; j < c; ++j) {
            probs->at(static_cast<int>(k), j) = std::exp(logits.at(r, j) - mx) / denom;
        }
        loss -= logits.at(r, labels[static_cast<size_t>(r)]) - mx - log_denom;
    }
    loss /= static_cast<double>(rows->size());

    Tensor y(1, 1);
    y.at(0, 0) = loss;
    std::vector<int> lbl = labels;
    return t.push("masked_ce", std::move(y),
                  [logits_id, rows, probs, lbl](Tape& tp, ValueId self) {
                      double g = tp.grad(self).at(0, 0) / static_cast<double>(rows->size());
                      Tensor& gx = tp.grad(logits_id);
                      for (size_t k = 0; k < rows->size(); ++k) {
                          int r = (*rows)[k];
                          for (int j = 0; j < gx.cols(); ++j) {
                              double onehot = (j == lbl[static_cast<size_t>(r)]) ? 1.0 : 0.0;
                              gx.at(r, j) += g * (probs->at(static_cast<int>(k), j) - onehot);
                          }
                      }
                  });
}

Tensor softmax_rows(const Tensor& logits) {
    Tensor out(logits.rows(), logits.cols());
    for (int r = 0; r < logits.rows(); ++r) {
        double mx = logits.at(r, 0);
        for (int j = 1; j < logits.cols(); ++j) mx = std::max(mx, logits.at(r, j));
        double denom = 0;
        for (int j = 0; j < logits.cols(); ++j) denom += std::exp(logits.at(r, j) - mx);
        for (int j = 0; j < logits.cols(); ++j) {
            out.at(r, j) = std::exp(logits.at(r, j) - mx) / denom;
        }
    }
    return out;
}

}  // namespace pqgcn::nn
