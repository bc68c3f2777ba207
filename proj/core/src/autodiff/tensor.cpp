#include "gridflow/autodiff/tensor.hpp"

#include <Eigen/Core>

#include "gridflow/common/error.hpp"

namespace gridflow::ad {

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols) {
        throw ShapeError("tensor of shape " + std::to_string(rows) + "x" + std::to_string(cols) + " given " +
                         std::to_string(values_.size()) + " values");
    }
}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::initializer_list<double> values)
    : Tensor(rows, cols, std::vector<double>(values)) {}

std::string Tensor::shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<RowMajor const>;
using Map = Eigen::Map<RowMajor>;

ConstMap view(Tensor const& t) {
    return {t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}

}  // namespace

void gemm_accumulate(Tensor const& a, bool transpose_a, Tensor const& b, bool transpose_b, Tensor& out) {
    Map o(out.data(), static_cast<Eigen::Index>(out.rows()), static_cast<Eigen::Index>(out.cols()));
    auto const av = view(a);
    auto const bv = view(b);
    if (!transpose_a && !transpose_b) {
        o.noalias() += av * bv;
    } else if (transpose_a && !transpose_b) {
        o.noalias() += av.transpose() * bv;
    } else if (!transpose_a && transpose_b) {
        o.noalias() += av * bv.transpose();
    } else {
        o.noalias() += av.transpose() * bv.transpose();
    }
}

}  // namespace gridflow::ad
