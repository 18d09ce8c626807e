#include "pqgcn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace pqgcn::nn {

Tensor::Tensor(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::runtime_error("nn: negative tensor shape");
    data_.assign(static_cast<size_t>(rows) * static_cast<size_t>(cols), 0.0);
}

Tensor Tensor::from(int rows, int cols, std::initializer_list<double> values) {
    Tensor t(rows, cols);
    if (values.size() != t.size()) {
        throw std::runtime_error("nn: tensor literal size mismatch");
    }
    std::copy(values.begin(), values.end(), t.data_.begin());
    return t;
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::string Tensor::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    for (const auto& t : triplets) {
        if (t.i < 0 || t.i >= rows || t.j < 0 || t.j >= cols) {
            throw std::runtime_error("nn: sparse triplet (" + std::to_string(t.i) + "," +
                                     std::to_string(t.j) + ") outside " + std::to_string(rows) +
                                     "x" + std::to_string(cols));
        }
        if (!std::isfinite(t.v)) {
            throw std::runtime_error("nn: non-finite sparse value");
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    for (const auto& t : triplets) {
        if (!m.entries_.empty() && m.entries_.back().i == t.i && m.entries_.back().j == t.j) {
            m.entries_.back().v += t.v;
        } else {
            m.entries_.push_back(t);
        }
    }
    m.entries_.erase(std::remove_if(m.entries_.begin(), m.entries_.end(),
                                    [](const Triplet& t) { return t.v == 0.0; }),
                     m.entries_.end());

    m.row_start_.assign(static_cast<size_t>(rows) + 1, 0);
    for (const auto& t : m.entries_) m.row_start_[static_cast<size_t>(t.i) + 1]++;
    for (size_t r = 0; r < static_cast<size_t>(rows); ++r) m.row_start_[r + 1] += m.row_start_[r];

    m.transposed_ = m.entries_;
    for (auto& t : m.transposed_) std::swap(t.i, t.j);
    std::sort(m.transposed_.begin(), m.transposed_.end(), [](const Triplet& a, const Triplet& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    m.col_start_.assign(static_cast<size_t>(cols) + 1, 0);
    for (const auto& t : m.transposed_) m.col_start_[static_cast<size_t>(t.i) + 1]++;
    for (size_t c = 0; c < static_cast<size_t>(cols); ++c) m.col_start_[c + 1] += m.col_start_[c];
    return m;
}

Tensor SparseMatrix::to_dense() const {
    Tensor t(rows_, cols_);
    for (const auto& e : entries_) t.at(e.i, e.j) += e.v;
    return t;
}

namespace {

void check_inner(int a_cols, int x_rows, const char* op) {
    if (a_cols != x_rows) {
        throw std::runtime_error(std::string("nn: ") + op + " inner dimension mismatch (" +
                                 std::to_string(a_cols) + " vs " + std::to_string(x_rows) + ")");
    }
}

void sparse_rows_times_dense(const std::vector<Triplet>& entries,
                             const std::vector<size_t>& starts, int out_rows,
                             const Tensor& x, Tensor& y) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < out_rows; ++r) {
        double* out_row = y.data() + static_cast<size_t>(r) * x.cols();
        for (size_t k = starts[static_cast<size_t>(r)]; k < starts[static_cast<size_t>(r) + 1];
             ++k) {
            double v = entries[k].v;
            const double* in_row = x.data() + static_cast<size_t>(entries[k].j) * x.cols();
            for (int c = 0; c < x.cols(); ++c) out_row[c] += v * in_row[c];
        }
    }
}

}  // namespace

Tensor SparseMatrix::multiply(const Tensor& x) const {
    check_inner(cols_, x.rows(), "spmm");
    Tensor y(rows_, x.cols());
    sparse_rows_times_dense(entries_, row_start_, rows_, x, y);
    return y;
}

Tensor SparseMatrix::multiply_transposed(const Tensor& x) const {
    check_inner(rows_, x.rows(), "spmm_t");
    Tensor y(cols_, x.cols());
    sparse_rows_times_dense(transposed_, col_start_, cols_, x, y);
    return y;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    check_inner(a.cols(), b.rows(), "matmul");
    Tensor y(a.rows(), b.cols());
    int n = a.rows(), k_dim = a.cols(), m = b.cols();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double* out = y.data() + static_cast<size_t>(i) * m;
        const double* arow = a.data() + static_cast<size_t>(i) * k_dim;
        for (int k = 0; k < k_dim; ++k) {
            double av = arow[k];
            if (av == 0.0) continue;
            const double* brow = b.data() + static_cast<size_t>(k) * m;
            for (int j = 0; j < m; ++j) out[j] += av * brow[j];
        }
    }
    return y;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.cols()) {
        throw std::runtime_error("nn: matmul_nt inner dimension mismatch (" +
                                 a.shape_str() + " vs " + b.shape_str() + ")");
    }
    Tensor y(a.rows(), b.rows());
    int n = a.rows(), m = b.rows(), k_dim = a.cols();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double* out = y.data() + static_cast<size_t>(i) * m;
        const double* arow = a.data() + static_cast<size_t>(i) * k_dim;
        for (int j = 0; j < m; ++j) {
            const double* brow = b.data() + static_cast<size_t>(j) * k_dim;
            double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
            int k = 0;
            for (; k + 4 <= k_dim; k += 4) {
                a0 += arow[k] * brow[k];
                a1 += arow[k + 1] * brow[k + 1];
                a2 += arow[k + 2] * brow[k + 2];
                a3 += arow[k + 3] * brow[k + 3];
            }
            double acc = (a0 + a1) + (a2 + a3);
            for (; k < k_dim; ++k) acc += arow[k] * brow[k];
            out[j] = acc;
        }
    }
    return y;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
    check_inner(a.rows(), b.rows(), "matmul_tn");
    Tensor y(a.cols(), b.cols());
    int n = a.cols(), m = b.cols(), k_dim = a.rows();
    // parallel over output rows; k loop stays sequential for determinism
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double* out = y.data() + static_cast<size_t>(i) * m;
        for (int k = 0; k < k_dim; ++k) {
            double av = a.at(k, i);
            if (av == 0.0) continue;
            const double* brow = b.data() + static_cast<size_t>(k) * m;
            for (int j = 0; j < m; ++j) out[j] += av * brow[j];
        }
    }
    return y;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw std::runtime_error("nn: add shape mismatch (" + a.shape_str() + " vs " +
                                 b.shape_str() + ")");
    }
    Tensor y(a.rows(), a.cols());
    for (size_t k = 0; k < a.size(); ++k) y.data()[k] = a.data()[k] + b.data()[k];
    return y;
}

Tensor scale(const Tensor& a, double s) {
    Tensor y(a.rows(), a.cols());
    for (size_t k = 0; k < a.size(); ++k) y.data()[k] = a.data()[k] * s;
    return y;
}

Tensor glorot(int rows, int cols, Rng& rng) {
    Tensor t(rows, cols);
    double bound = std::sqrt(6.0 / (rows + cols));
    for (size_t k = 0; k < t.size(); ++k) t.data()[k] = rng.uniform(-bound, bound);
    return t;
}

}  // namespace pqgcn::nn
