#include "gridflow/models/params.hpp"

#include <algorithm>
#include <cmath>

#include "gridflow/common/error.hpp"

namespace gridflow::models {

std::size_t ParamSet::add(std::string name, ad::Tensor value) {
    names_.push_back(std::move(name));
    values_.push_back(std::move(value));
    return values_.size() - 1;
}

std::size_t ParamSet::scalar_count() const {
    std::size_t n = 0;
    for (auto const& v : values_) {
        n += v.size();
    }
    return n;
}

std::size_t ParamSet::index(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        throw ShapeError("no parameter named '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - names_.begin());
}

ad::Tensor glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    double const limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    ad::Tensor t(rows, cols);
    for (std::size_t k = 0; k < t.size(); ++k) {
        t[k] = rng.uniform(-limit, limit);
    }
    return t;
}

}  // namespace gridflow::models
