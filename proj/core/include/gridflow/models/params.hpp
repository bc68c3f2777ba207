#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gridflow/autodiff/tensor.hpp"
#include "gridflow/common/rng.hpp"

namespace gridflow::models {

// Ordered, named parameter tensors. The order is the tape slot order and the
// checkpoint serialization order.
class ParamSet {
  public:
    std::size_t add(std::string name, ad::Tensor value);

    std::size_t size() const { return values_.size(); }
    std::size_t scalar_count() const;
    std::size_t index(std::string_view name) const;  // throws ShapeError if absent

    std::string const& name(std::size_t k) const { return names_[k]; }
    ad::Tensor const& operator[](std::size_t k) const { return values_[k]; }
    ad::Tensor& operator[](std::size_t k) { return values_[k]; }
    std::vector<ad::Tensor> const& values() const { return values_; }
    std::vector<ad::Tensor>& values() { return values_; }
    std::vector<std::string> const& names() const { return names_; }

    bool operator==(ParamSet const&) const = default;

  private:
    std::vector<std::string> names_;
    std::vector<ad::Tensor> values_;
};

// Uniform in +-sqrt(6 / (rows + cols)).
ad::Tensor glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace gridflow::models
