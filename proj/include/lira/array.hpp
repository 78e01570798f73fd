#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

namespace lira::ad {

/// Dense row-major array of doubles with rank 0 (scalar), 1 (vector) or 2 (matrix).
class Array {
public:
    Array() : rank_(0), rows_(1), cols_(1), data_(1, 0.0) {}

    static Array scalar(double v);
    static Array vec(int n, double fill = 0.0);
    static Array mat(int rows, int cols, double fill = 0.0);
    static Array from(const std::vector<double>& v);               // rank 1
    static Array from(const std::vector<double>& v, int rows, int cols);

    int rank() const { return rank_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int size() const { return static_cast<int>(data_.size()); }
    bool is_scalar() const { return data_.size() == 1 && rank_ == 0; }
    bool same_shape(const Array& o) const {
        return rank_ == o.rank_ && rows_ == o.rows_ && cols_ == o.cols_;
    }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double& operator[](int i) { return data_[static_cast<size_t>(i)]; }
    double operator[](int i) const { return data_[static_cast<size_t>(i)]; }
    double& at(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double at(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    Array reshaped(int rank, int rows, int cols) const;
    Array zeros_like() const;
    bool all_finite() const;
    double sum() const;
    std::string shape_str() const;

private:
    Array(int rank, int rows, int cols)
        : rank_(rank), rows_(rows), cols_(cols),
          data_(static_cast<size_t>(rows) * cols, 0.0) {}

    int rank_;
    int rows_;
    int cols_;
    std::vector<double> data_;
};

/// out = a * b for rank-2 operands, Eigen-backed.
Array matmul_value(const Array& a, const Array& b);
/// a += g * b^T accumulation used by matmul backward (dA = G B^T).
void matmul_acc_abt(Array& acc, const Array& g, const Array& b);
/// a += b^T * g accumulation used by matmul backward (dB = A^T G).
void matmul_acc_atb(Array& acc, const Array& a, const Array& g);

} // namespace lira::ad
