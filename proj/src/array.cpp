#include "lira/array.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>

namespace lira::ad {

namespace {
using EigenMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<EigenMat>;
using CMapMat = Eigen::Map<const EigenMat>;
} // namespace

Array Array::scalar(double v) {
    Array a(0, 1, 1);
    a.data_[0] = v;
    return a;
}

Array Array::vec(int n, double fill) {
    Array a(1, n, 1);
    for (auto& x : a.data_) x = fill;
    return a;
}

Array Array::mat(int rows, int cols, double fill) {
    Array a(2, rows, cols);
    for (auto& x : a.data_) x = fill;
    return a;
}

Array Array::from(const std::vector<double>& v) {
    Array a(1, static_cast<int>(v.size()), 1);
    a.data_ = v;
    return a;
}

Array Array::from(const std::vector<double>& v, int rows, int cols) {
    if (static_cast<int>(v.size()) != rows * cols)
        throw std::invalid_argument("Array::from: size mismatch");
    Array a(2, rows, cols);
    a.data_ = v;
    return a;
}

Array Array::reshaped(int rank, int rows, int cols) const {
    if (rows * cols != size())
        throw std::invalid_argument("Array::reshaped: size mismatch");
    Array a(rank, rows, cols);
    a.data_ = data_;
    return a;
}

Array Array::zeros_like() const {
    Array a(rank_, rows_, cols_);
    return a;
}

bool Array::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

double Array::sum() const {
    double s = 0.0;
    for (double x : data_) s += x;
    return s;
}

std::string Array::shape_str() const {
    std::ostringstream os;
    if (rank_ == 0) os << "[]";
    else if (rank_ == 1) os << "[" << rows_ << "]";
    else os << "[" << rows_ << "x" << cols_ << "]";
    return os.str();
}

Array matmul_value(const Array& a, const Array& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows())
        throw std::invalid_argument("matmul: shape mismatch " + a.shape_str() + " * " + b.shape_str());
    Array out = Array::mat(a.rows(), b.cols());
    MapMat(out.data(), out.rows(), out.cols()) =
        CMapMat(a.data(), a.rows(), a.cols()) * CMapMat(b.data(), b.rows(), b.cols());
    return out;
}

void matmul_acc_abt(Array& acc, const Array& g, const Array& b) {
    MapMat(acc.data(), acc.rows(), acc.cols()) +=
        CMapMat(g.data(), g.rows(), g.cols()) * CMapMat(b.data(), b.rows(), b.cols()).transpose();
}

void matmul_acc_atb(Array& acc, const Array& a, const Array& g) {
    MapMat(acc.data(), acc.rows(), acc.cols()) +=
        CMapMat(a.data(), a.rows(), a.cols()).transpose() * CMapMat(g.data(), g.rows(), g.cols());
}

} // namespace lira::ad
