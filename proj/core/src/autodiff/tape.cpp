#include "gridflow/autodiff/tape.hpp"

#include <algorithm>
#include <cmath>

#include "gridflow/common/error.hpp"

namespace gridflow::ad {

char const* to_string(Op op) {
    switch (op) {
        case Op::Constant: return "constant";
        case Op::Parameter: return "parameter";
        case Op::MatMul: return "matmul";
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Mul: return "mul";
        case Op::Scale: return "scale";
        case Op::AddScalar: return "add_scalar";
        case Op::Sigmoid: return "sigmoid";
        case Op::Tanh: return "tanh";
        case Op::Relu: return "relu";
        case Op::Cos: return "cos";
        case Op::Sin: return "sin";
        case Op::ScatterSum: return "scatter_sum";
        case Op::GatherRows: return "gather_rows";
        case Op::ConcatCols: return "concat_cols";
        case Op::SliceCols: return "slice_cols";
        case Op::Reshape: return "reshape";
        case Op::MseReduce: return "mse_reduce";
        case Op::Dropout: return "dropout";
        case Op::Custom: return "custom";
    }
    return "?";
}

namespace {

[[noreturn]] void shape_mismatch(Op op, Tensor const& a, Tensor const& b) {
    throw ShapeError(std::string(to_string(op)) + ": incompatible shapes " + a.shape_string() + " and " +
                     b.shape_string());
}

template <class F>
Tensor map(Tensor const& a, F f) {
    Tensor out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) {
        out[k] = f(a[k]);
    }
    return out;
}

bool broadcasts(Tensor const& a, Tensor const& b) { return b.rows() == 1 && b.cols() == a.cols() && a.rows() != 1; }

}  // namespace

Var Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

bool Tape::requires_grad(std::initializer_list<Var> inputs) const {
    return std::any_of(inputs.begin(), inputs.end(), [&](Var v) { return nodes_[v.id].requires_grad; });
}

Var Tape::constant(Tensor value) {
    Node n;
    n.op = Op::Constant;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::parameter(Tensor value, std::size_t slot) {
    Node n;
    n.op = Op::Parameter;
    n.requires_grad = true;
    n.value = std::move(value);
    n.slot = slot;
    slots_ = std::max(slots_, slot + 1);
    return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
    Tensor const& av = value(a);
    Tensor const& bv = value(b);
    if (av.cols() != bv.rows()) {
        shape_mismatch(Op::MatMul, av, bv);
    }
    Node n;
    n.op = Op::MatMul;
    n.inputs = {a.id, b.id};
    n.requires_grad = requires_grad({a, b});
    n.value = Tensor(av.rows(), bv.cols());
    gemm_accumulate(av, false, bv, false, n.value);
    return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
    Tensor const& av = value(a);
    Tensor const& bv = value(b);
    Node n;
    n.op = Op::Add;
    n.inputs = {a.id, b.id};
    n.requires_grad = requires_grad({a, b});
    n.value = av;
    if (av.same_shape(bv)) {
        for (std::size_t k = 0; k < av.size(); ++k) {
            n.value[k] += bv[k];
        }
    } else if (broadcasts(av, bv)) {
        for (std::size_t r = 0; r < av.rows(); ++r) {
            for (std::size_t c = 0; c < av.cols(); ++c) {
                n.value(r, c) += bv[c];
            }
        }
    } else {
        shape_mismatch(Op::Add, av, bv);
    }
    return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
    Tensor const& av = value(a);
    Tensor const& bv = value(b);
    Node n;
    n.op = Op::Sub;
    n.inputs = {a.id, b.id};
    n.requires_grad = requires_grad({a, b});
    n.value = av;
    if (av.same_shape(bv)) {
        for (std::size_t k = 0; k < av.size(); ++k) {
            n.value[k] -= bv[k];
        }
    } else if (broadcasts(av, bv)) {
        for (std::size_t r = 0; r < av.rows(); ++r) {
            for (std::size_t c = 0; c < av.cols(); ++c) {
                n.value(r, c) -= bv[c];
            }
        }
    } else {
        shape_mismatch(Op::Sub, av, bv);
    }
    return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
    Tensor const& av = value(a);
    Tensor const& bv = value(b);
    if (!av.same_shape(bv)) {
        shape_mismatch(Op::Mul, av, bv);
    }
    Node n;
    n.op = Op::Mul;
    n.inputs = {a.id, b.id};
    n.requires_grad = requires_grad({a, b});
    n.value = Tensor(av.rows(), av.cols());
    for (std::size_t k = 0; k < av.size(); ++k) {
        n.value[k] = av[k] * bv[k];
    }
    return push(std::move(n));
}

Var Tape::scale(Var a, double factor) {
    Node n;
    n.op = Op::Scale;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.scalar = factor;
    n.value = map(value(a), [factor](double x) { return factor * x; });
    return push(std::move(n));
}

Var Tape::add_scalar(Var a, double offset) {
    Node n;
    n.op = Op::AddScalar;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.scalar = offset;
    n.value = map(value(a), [offset](double x) { return x + offset; });
    return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
    Node n;
    n.op = Op::Sigmoid;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.value = map(value(a), [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    return push(std::move(n));
}

Var Tape::tanh(Var a) {
    Node n;
    n.op = Op::Tanh;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.value = map(value(a), [](double x) { return std::tanh(x); });
    return push(std::move(n));
}

Var Tape::relu(Var a) {
    Node n;
    n.op = Op::Relu;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.value = map(value(a), [](double x) { return x > 0.0 ? x : 0.0; });
    return push(std::move(n));
}

Var Tape::cos(Var a) {
    Node n;
    n.op = Op::Cos;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.value = map(value(a), [](double x) { return std::cos(x); });
    return push(std::move(n));
}

Var Tape::sin(Var a) {
    Node n;
    n.op = Op::Sin;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.value = map(value(a), [](double x) { return std::sin(x); });
    return push(std::move(n));
}

Var Tape::scatter_sum(Var a, std::span<IndexPair const> pairs, std::size_t out_rows, std::span<double const> weights) {
    Tensor const& av = value(a);
    if (!weights.empty() && weights.size() != pairs.size()) {
        throw ShapeError("scatter_sum: " + std::to_string(weights.size()) + " weights for " +
                         std::to_string(pairs.size()) + " pairs");
    }
    Node n;
    n.op = Op::ScatterSum;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.value = Tensor(out_rows, av.cols());
    n.index.reserve(2 * pairs.size());
    std::size_t const cols = av.cols();
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        auto const [src, dst] = pairs[e];
        if (src >= av.rows() || dst >= out_rows) {
            throw ShapeError("scatter_sum: pair (" + std::to_string(src) + ", " + std::to_string(dst) +
                             ") out of range for " + av.shape_string() + " -> " + std::to_string(out_rows) + " rows");
        }
        double const w = weights.empty() ? 1.0 : weights[e];
        double const* from = av.data() + src * cols;
        double* to = n.value.data() + dst * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            to[c] += w * from[c];
        }
        n.index.push_back(src);
        n.index.push_back(dst);
    }
    n.weights.assign(weights.begin(), weights.end());
    return push(std::move(n));
}

Var Tape::gather_rows(Var a, std::span<std::uint32_t const> index) {
    Tensor const& av = value(a);
    Node n;
    n.op = Op::GatherRows;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.value = Tensor(index.size(), av.cols());
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] >= av.rows()) {
            throw ShapeError("gather_rows: row " + std::to_string(index[k]) + " out of range for " +
                             av.shape_string());
        }
        std::copy_n(av.data() + index[k] * av.cols(), av.cols(), n.value.data() + k * av.cols());
    }
    n.index.assign(index.begin(), index.end());
    return push(std::move(n));
}

Var Tape::concat_cols(std::span<Var const> parts) {
    if (parts.empty()) {
        throw ShapeError("concat_cols: no inputs");
    }
    std::size_t const rows = value(parts[0]).rows();
    std::size_t cols = 0;
    Node n;
    n.op = Op::ConcatCols;
    for (Var p : parts) {
        if (value(p).rows() != rows) {
            shape_mismatch(Op::ConcatCols, value(parts[0]), value(p));
        }
        cols += value(p).cols();
        n.inputs.push_back(p.id);
        n.requires_grad = n.requires_grad || nodes_[p.id].requires_grad;
    }
    n.value = Tensor(rows, cols);
    std::size_t offset = 0;
    for (Var p : parts) {
        Tensor const& pv = value(p);
        for (std::size_t r = 0; r < rows; ++r) {
            std::copy_n(pv.data() + r * pv.cols(), pv.cols(), n.value.data() + r * cols + offset);
        }
        offset += pv.cols();
    }
    return push(std::move(n));
}

Var Tape::slice_cols(Var a, std::size_t begin, std::size_t end) {
    Tensor const& av = value(a);
    if (begin > end || end > av.cols()) {
        throw ShapeError("slice_cols: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + av.shape_string());
    }
    Node n;
    n.op = Op::SliceCols;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.slot = begin;
    n.value = Tensor(av.rows(), end - begin);
    for (std::size_t r = 0; r < av.rows(); ++r) {
        std::copy_n(av.data() + r * av.cols() + begin, end - begin, n.value.data() + r * (end - begin));
    }
    return push(std::move(n));
}

Var Tape::reshape(Var a, std::size_t rows, std::size_t cols) {
    Tensor const& av = value(a);
    if (rows * cols != av.size()) {
        throw ShapeError("reshape: cannot view " + av.shape_string() + " as " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    Node n;
    n.op = Op::Reshape;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.value = Tensor(rows, cols, std::vector<double>(av.values().begin(), av.values().end()));
    return push(std::move(n));
}

Var Tape::mse_reduce(Var a, Tensor const& target, std::span<double const> row_weights) {
    Tensor const& av = value(a);
    if (!av.same_shape(target)) {
        shape_mismatch(Op::MseReduce, av, target);
    }
    if (av.rows() == 0) {
        throw ShapeError("mse_reduce: empty input");
    }
    if (!row_weights.empty() && row_weights.size() != av.rows()) {
        throw ShapeError("mse_reduce: " + std::to_string(row_weights.size()) + " row weights for " +
                         av.shape_string());
    }
    Node n;
    n.op = Op::MseReduce;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.saved = target;
    if (row_weights.empty()) {
        n.weights.assign(av.rows(), 1.0 / static_cast<double>(av.rows()));
    } else {
        n.weights.assign(row_weights.begin(), row_weights.end());
    }
    double total = 0.0;
    for (std::size_t r = 0; r < av.rows(); ++r) {
        double row = 0.0;
        for (std::size_t c = 0; c < av.cols(); ++c) {
            double const d = av(r, c) - target(r, c);
            row += d * d;
        }
        total += n.weights[r] * row;
    }
    n.value = Tensor::scalar(total);
    return push(std::move(n));
}

Var Tape::dropout(Var a, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) {
        throw ShapeError("dropout: rate must lie in [0, 1)");
    }
    if (rate == 0.0) {
        return a;
    }
    Tensor const& av = value(a);
    double const keep_scale = 1.0 / (1.0 - rate);
    Node n;
    n.op = Op::Dropout;
    n.inputs = {a.id};
    n.requires_grad = requires_grad({a});
    n.saved = Tensor(av.rows(), av.cols());
    n.value = Tensor(av.rows(), av.cols());
    for (std::size_t k = 0; k < av.size(); ++k) {
        double const m = rng.uniform() < rate ? 0.0 : keep_scale;
        n.saved[k] = m;
        n.value[k] = m * av[k];
    }
    return push(std::move(n));
}

Var Tape::custom(std::span<Var const> inputs, Tensor value, CustomBackward backward) {
    Node n;
    n.op = Op::Custom;
    for (Var v : inputs) {
        n.inputs.push_back(v.id);
        n.requires_grad = n.requires_grad || nodes_[v.id].requires_grad;
    }
    n.value = std::move(value);
    n.custom = customs_.size();
    customs_.push_back(std::move(backward));
    return push(std::move(n));
}

GradientMap Tape::backward(Var loss) const {
    if (value(loss).rows() != 1 || value(loss).cols() != 1) {
        throw ShapeError("backward: loss must be 1x1, got " + value(loss).shape_string());
    }
    std::vector<Tensor> adj(nodes_.size());
    auto grad = [&](std::uint32_t id) -> Tensor& {
        if (adj[id].empty() && !nodes_[id].value.empty()) {
            adj[id] = Tensor(nodes_[id].value.rows(), nodes_[id].value.cols());
        }
        return adj[id];
    };
    auto wants = [&](std::uint32_t id) { return nodes_[id].requires_grad; };

    GradientMap out;
    out.grads.resize(slots_);
    adj[loss.id] = Tensor::scalar(1.0);

    for (std::size_t idx = nodes_.size(); idx-- > 0;) {
        Node const& n = nodes_[idx];
        if (!n.requires_grad || adj[idx].empty()) {
            continue;
        }
        Tensor const& dy = adj[idx];
        switch (n.op) {
            case Op::Constant: break;
            case Op::Parameter: {
                Tensor& g = out.grads[n.slot];
                if (g.empty()) {
                    g = dy;
                } else {
                    for (std::size_t k = 0; k < g.size(); ++k) {
                        g[k] += dy[k];
                    }
                }
                break;
            }
            case Op::MatMul: {
                auto const a = n.inputs[0];
                auto const b = n.inputs[1];
                if (wants(a)) gemm_accumulate(dy, false, nodes_[b].value, true, grad(a));
                if (wants(b)) gemm_accumulate(nodes_[a].value, true, dy, false, grad(b));
                break;
            }
            case Op::Add:
            case Op::Sub: {
                double const sign = n.op == Op::Add ? 1.0 : -1.0;
                auto const a = n.inputs[0];
                auto const b = n.inputs[1];
                if (wants(a)) {
                    Tensor& ga = grad(a);
                    for (std::size_t k = 0; k < dy.size(); ++k) ga[k] += dy[k];
                }
                if (wants(b)) {
                    Tensor& gb = grad(b);
                    if (gb.size() == dy.size()) {
                        for (std::size_t k = 0; k < dy.size(); ++k) gb[k] += sign * dy[k];
                    } else {
                        for (std::size_t r = 0; r < dy.rows(); ++r)
                            for (std::size_t c = 0; c < dy.cols(); ++c) gb[c] += sign * dy(r, c);
                    }
                }
                break;
            }
            case Op::Mul: {
                auto const a = n.inputs[0];
                auto const b = n.inputs[1];
                if (wants(a)) {
                    Tensor& ga = grad(a);
                    Tensor const& bv = nodes_[b].value;
                    for (std::size_t k = 0; k < dy.size(); ++k) ga[k] += dy[k] * bv[k];
                }
                if (wants(b)) {
                    Tensor& gb = grad(b);
                    Tensor const& av = nodes_[a].value;
                    for (std::size_t k = 0; k < dy.size(); ++k) gb[k] += dy[k] * av[k];
                }
                break;
            }
            case Op::Scale: {
                Tensor& ga = grad(n.inputs[0]);
                for (std::size_t k = 0; k < dy.size(); ++k) ga[k] += n.scalar * dy[k];
                break;
            }
            case Op::AddScalar:
            case Op::Reshape: {
                Tensor& ga = grad(n.inputs[0]);
                for (std::size_t k = 0; k < dy.size(); ++k) ga[k] += dy[k];
                break;
            }
            case Op::Sigmoid: {
                Tensor& ga = grad(n.inputs[0]);
                for (std::size_t k = 0; k < dy.size(); ++k) {
                    double const y = n.value[k];
                    ga[k] += dy[k] * y * (1.0 - y);
                }
                break;
            }
            case Op::Tanh: {
                Tensor& ga = grad(n.inputs[0]);
                for (std::size_t k = 0; k < dy.size(); ++k) {
                    double const y = n.value[k];
                    ga[k] += dy[k] * (1.0 - y * y);
                }
                break;
            }
            case Op::Relu: {
                Tensor& ga = grad(n.inputs[0]);
                for (std::size_t k = 0; k < dy.size(); ++k) {
                    if (n.value[k] > 0.0) ga[k] += dy[k];
                }
                break;
            }
            case Op::Cos: {
                Tensor& ga = grad(n.inputs[0]);
                Tensor const& x = nodes_[n.inputs[0]].value;
                for (std::size_t k = 0; k < dy.size(); ++k) ga[k] -= dy[k] * std::sin(x[k]);
                break;
            }
            case Op::Sin: {
                Tensor& ga = grad(n.inputs[0]);
                Tensor const& x = nodes_[n.inputs[0]].value;
                for (std::size_t k = 0; k < dy.size(); ++k) ga[k] += dy[k] * std::cos(x[k]);
                break;
            }
            case Op::ScatterSum: {
                Tensor& ga = grad(n.inputs[0]);
                std::size_t const cols = ga.cols();
                std::size_t const pairs = n.index.size() / 2;
                for (std::size_t e = 0; e < pairs; ++e) {
                    double const w = n.weights.empty() ? 1.0 : n.weights[e];
                    double const* from = dy.data() + n.index[2 * e + 1] * cols;
                    double* to = ga.data() + n.index[2 * e] * cols;
                    for (std::size_t c = 0; c < cols; ++c) to[c] += w * from[c];
                }
                break;
            }
            case Op::GatherRows: {
                Tensor& ga = grad(n.inputs[0]);
                std::size_t const cols = ga.cols();
                for (std::size_t k = 0; k < n.index.size(); ++k) {
                    double const* from = dy.data() + k * cols;
                    double* to = ga.data() + n.index[k] * cols;
                    for (std::size_t c = 0; c < cols; ++c) to[c] += from[c];
                }
                break;
            }
            case Op::ConcatCols: {
                std::size_t offset = 0;
                for (auto in : n.inputs) {
                    std::size_t const w = nodes_[in].value.cols();
                    if (wants(in)) {
                        Tensor& g = grad(in);
                        for (std::size_t r = 0; r < dy.rows(); ++r)
                            for (std::size_t c = 0; c < w; ++c) g(r, c) += dy(r, offset + c);
                    }
                    offset += w;
                }
                break;
            }
            case Op::SliceCols: {
                Tensor& ga = grad(n.inputs[0]);
                for (std::size_t r = 0; r < dy.rows(); ++r)
                    for (std::size_t c = 0; c < dy.cols(); ++c) ga(r, n.slot + c) += dy(r, c);
                break;
            }
            case Op::MseReduce: {
                Tensor& ga = grad(n.inputs[0]);
                Tensor const& x = nodes_[n.inputs[0]].value;
                for (std::size_t r = 0; r < x.rows(); ++r) {
                    double const f = 2.0 * dy[0] * n.weights[r];
                    for (std::size_t c = 0; c < x.cols(); ++c) ga(r, c) += f * (x(r, c) - n.saved(r, c));
                }
                break;
            }
            case Op::Dropout: {
                Tensor& ga = grad(n.inputs[0]);
                for (std::size_t k = 0; k < dy.size(); ++k) ga[k] += dy[k] * n.saved[k];
                break;
            }
            case Op::Custom: {
                std::vector<Tensor> input_grads;
                input_grads.reserve(n.inputs.size());
                for (auto in : n.inputs) {
                    input_grads.emplace_back(nodes_[in].value.rows(), nodes_[in].value.cols());
                }
                customs_[n.custom](*this, dy, input_grads);
                for (std::size_t k = 0; k < n.inputs.size(); ++k) {
                    auto const in = n.inputs[k];
                    if (!wants(in)) continue;
                    Tensor& g = grad(in);
                    for (std::size_t q = 0; q < g.size(); ++q) g[q] += input_grads[k][q];
                }
                break;
            }
        }
    }
    return out;
}

}  // namespace gridflow::ad
