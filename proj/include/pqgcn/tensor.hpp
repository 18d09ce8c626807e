#ifndef PQGCN_TENSOR_HPP
#define PQGCN_TENSOR_HPP

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "pqgcn/common.hpp"

namespace pqgcn::nn {

// Dense row-major matrix of doubles.
class Tensor {
public:
    Tensor() = default;
    Tensor(int rows, int cols);  // zero-filled

    static Tensor from(int rows, int cols, std::initializer_list<double> values);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<const double> row(int r) const {
        return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
    }

    void fill(double v);
    bool same_shape(const Tensor& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const;
    std::string shape_str() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

struct Triplet {
    int i = 0, j = 0;
    double v = 0;
};

// Triplet-form sparse matrix; entries sorted by (i, j) and deduplicated
// (duplicates are summed at construction, exact zeros dropped). A transposed
// index is kept so both A*X and A^T*X run row-parallel.
class SparseMatrix {
public:
    SparseMatrix() = default;

    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t nnz() const { return entries_.size(); }
    const std::vector<Triplet>& triplets() const { return entries_; }

    Tensor to_dense() const;
    Tensor multiply(const Tensor& x) const;             // A * X
    Tensor multiply_transposed(const Tensor& x) const;  // A^T * X

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Triplet> entries_;      // sorted by (i, j)
    std::vector<size_t> row_start_;     // rows_+1 offsets into entries_
    std::vector<Triplet> transposed_;   // sorted by (j, i), stored as (j, i, v)
    std::vector<size_t> col_start_;     // cols_+1 offsets into transposed_
};

// Dense kernels. Row-parallel, so results are bit-identical regardless of
// thread count.
Tensor matmul(const Tensor& a, const Tensor& b);     // A * B
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // A * B^T
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // A^T * B
Tensor add(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

// Glorot-style uniform init in +-sqrt(6/(fan_in+fan_out)).
Tensor glorot(int rows, int cols, Rng& rng);

}  // namespace pqgcn::nn

#endif
