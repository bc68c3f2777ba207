#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gridflow/autodiff/tensor.hpp"
#include "gridflow/common/rng.hpp"

namespace gridflow::ad {

// Handle to a value recorded on a Tape.
struct Var {
    std::uint32_t id = 0;
};

// Directed (src -> dst) index pair used by scatter_sum.
struct IndexPair {
    std::uint32_t src;
    std::uint32_t dst;
};

// Gradient of the loss with respect to each parameter slot. Slots that were
// never registered on the tape are left empty.
struct GradientMap {
    std::vector<Tensor> grads;

    Tensor const& operator[](std::size_t slot) const { return grads[slot]; }
    std::size_t size() const { return grads.size(); }
};

enum class Op : std::uint8_t {
    Constant,
    Parameter,
    MatMul,
    Add,
    Sub,
    Mul,
    Scale,
    AddScalar,
    Sigmoid,
    Tanh,
    Relu,
    Cos,
    Sin,
    ScatterSum,
    GatherRows,
    ConcatCols,
    SliceCols,
    Reshape,
    MseReduce,
    Dropout,
    Custom,
};

char const* to_string(Op op);

class Tape;

// Backward rule of a custom primitive: given the output adjoint, add the
// input adjoints into `input_grads` (pre-sized to the input shapes).
using CustomBackward =
    std::function<void(Tape const& tape, Tensor const& out_grad, std::vector<Tensor>& input_grads)>;

// Append-only record of primitive applications. Node ids are assigned in
// creation order, so every input precedes its consumer and backward is a
// single reverse sweep.
//
// Single-threaded; use one tape per worker.
class Tape {
  public:
    Tape() = default;

    Var constant(Tensor value);
    // Registers a trainable tensor under `slot`. The same slot may be
    // registered more than once; gradients of all registrations are summed.
    Var parameter(Tensor value, std::size_t slot);

    Var matmul(Var a, Var b);
    // Same-shape add, or broadcast of a 1 x C row `b` over the rows of `a`.
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);  // Hadamard product
    Var scale(Var a, double factor);
    Var add_scalar(Var a, double offset);
    Var sigmoid(Var a);
    Var tanh(Var a);
    Var relu(Var a);
    Var cos(Var a);
    Var sin(Var a);
    // out[dst] += w * a[src] for each pair (w = 1 when weights is empty);
    // out has `out_rows` rows. Backward gathers along the reversed pairs.
    Var scatter_sum(Var a, std::span<IndexPair const> pairs, std::size_t out_rows,
                    std::span<double const> weights = {});
    // out[k] = a[index[k]]
    Var gather_rows(Var a, std::span<std::uint32_t const> index);
    Var concat_cols(std::span<Var const> parts);
    Var slice_cols(Var a, std::size_t begin, std::size_t end);
    Var reshape(Var a, std::size_t rows, std::size_t cols);
    // sum_r w_r * sum_c (a - target)^2, a 1 x 1 result. Without weights every
    // row has w_r = 1 / rows(a), the plain mean over rows.
    Var mse_reduce(Var a, Tensor const& target, std::span<double const> row_weights = {});
    // Inverted dropout: zeroes entries with probability `rate` and scales the
    // survivors by 1 / (1 - rate). rate == 0 returns `a` unchanged.
    Var dropout(Var a, double rate, Rng& rng);
    Var custom(std::span<Var const> inputs, Tensor value, CustomBackward backward);

    Tensor const& value(Var v) const { return nodes_[v.id].value; }
    Op op(Var v) const { return nodes_[v.id].op; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t parameter_slots() const { return slots_; }

    // Reverse sweep from a 1 x 1 loss; adjoints are accumulated in reverse
    // tape order. Throws ShapeError if `loss` is not a scalar.
    GradientMap backward(Var loss) const;

  private:
    struct Node {
        Op op = Op::Constant;
        bool requires_grad = false;
        std::vector<std::uint32_t> inputs;
        Tensor value;
        Tensor saved;                        // mask or target, depending on op
        std::vector<double> weights;         // scatter_sum edge or mse_reduce row weights
        std::vector<std::uint32_t> index;    // pairs (flattened) or row indices
        double scalar = 0.0;
        std::size_t slot = 0;                // Parameter slot, or SliceCols begin
        std::size_t custom = 0;              // index into customs_
    };

    Var push(Node node);
    bool requires_grad(std::initializer_list<Var> inputs) const;
    Node const& node(Var v) const { return nodes_[v.id]; }

    std::vector<Node> nodes_;
    std::vector<CustomBackward> customs_;
    std::size_t slots_ = 0;
};

}  // namespace gridflow::ad
