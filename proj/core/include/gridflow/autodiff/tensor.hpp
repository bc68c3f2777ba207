#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace gridflow::ad {

// Dense row-major matrix of doubles. Every tensor in the engine is rank 2;
// vectors are 1 x n or n x 1 and scalars 1 x 1.
class Tensor {
  public:
    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
    Tensor(std::size_t rows, std::size_t cols, std::vector<double> values);
    Tensor(std::size_t rows, std::size_t cols, std::initializer_list<double> values);

    static Tensor scalar(double value) { return Tensor(1, 1, value); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }
    std::array<std::size_t, 2> shape() const { return {rows_, cols_}; }
    bool empty() const { return values_.empty(); }
    bool same_shape(Tensor const& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }

    double* data() { return values_.data(); }
    double const* data() const { return values_.data(); }
    std::span<double> values() { return values_; }
    std::span<double const> values() const { return values_; }

    // Fortran-style "r x c" for error messages.
    std::string shape_string() const;

    bool operator==(Tensor const&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

// out += a * b (a: m x k, b: k x n, out: m x n); transpose flags apply to a and b.
void gemm_accumulate(Tensor const& a, bool transpose_a, Tensor const& b, bool transpose_b, Tensor& out);

}  // namespace gridflow::ad
