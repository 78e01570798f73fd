#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lira/array.hpp"

namespace lira::ad {

struct Node;
using NodePtr = std::shared_ptr<Node>;

/// Graph node. `backward` reads this node's adjoint (`grad`) and accumulates
/// into the parents' adjoints; accumulation order is fixed by construction
/// order, so whole-graph backward passes are bit-deterministic.
struct Node {
    Array value;
    Array grad;
    bool grad_ready = false;     // grad allocated for the current backward pass
    bool requires_grad = false;
    bool is_param = false;
    std::string name;
    std::vector<NodePtr> parents;
    std::function<void(Node&)> backward;
    uint64_t seq = 0;
};

/// Value-semantic handle to a graph node.
class Var {
public:
    Var() = default;
    explicit Var(NodePtr n) : n_(std::move(n)) {}

    bool defined() const { return n_ != nullptr; }
    const Array& value() const { return n_->value; }
    Array& mutable_value() { return n_->value; }
    const Array& grad() const { return n_->grad; }
    bool has_grad() const { return n_ && n_->grad_ready; }
    bool requires_grad() const { return n_ && n_->requires_grad; }
    Node* node() const { return n_.get(); }
    NodePtr ptr() const { return n_; }
    const std::string& name() const { return n_->name; }

private:
    NodePtr n_;
};

Var constant(Array v);
Var constant(double v);
Var parameter(Array v, std::string name);

/// Generic custom-op constructor; `backward` may be empty for constants.
Var make_op(Array value, std::vector<NodePtr> parents, std::function<void(Node&)> backward);

/// Adds `g` into `dst.grad` reducing over broadcast dimensions if `dst` is
/// scalar-shaped; shapes must otherwise match.
void accumulate_grad(Node& dst, const Array& g);

// Elementwise binary ops: equal shapes, or either side scalar.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);

Var add(const Var& a, double b);
Var sub(const Var& a, double b);
Var sub(double a, const Var& b);
Var mul(const Var& a, double b);
Var div(double a, const Var& b);

// Unary ops.
Var neg(const Var& x);
Var exp_op(const Var& x);
Var log_op(const Var& x);
Var sqrt_op(const Var& x);
Var abs_op(const Var& x);                 // subgradient 0 at x == 0
Var pow_op(const Var& x, double p);
Var clamp_op(const Var& x, double lo, double hi);  // zero gradient outside [lo, hi]
Var square(const Var& x);

// Structured ops.
Var matmul(const Var& a, const Var& b);                 // rank-2 x rank-2
Var add_rows(const Var& m, const Var& v);               // m[n,k] + v[k] per row
Var scale_rows(const Var& m, const Var& c);             // m[n,k] * c[n] per row
Var slice_cols(const Var& m, int c0, int c1);
Var reshape(const Var& x, int rank, int rows, int cols);
Var concat_cols(const Var& a, const Var& b);

// Reductions.
Var sum_all(const Var& x);
Var mean_all(const Var& x);
Var row_sum(const Var& m);                              // [n,k] -> [n]
Var row_mean(const Var& m);
Var min_all(const Var& x);   // subgradient to the lowest-index argmin element
Var max_all(const Var& x);   // subgradient to the lowest-index argmax element

// Softmax over each row of a rank-2 array (rank-1 input treated as one row).
Var softmax_rows(const Var& x);

// Graph-surgery ops.
Var detach(const Var& x);       // forward identity, no graph
Var grl(const Var& x);          // forward identity, adjoint negated

/// Reverse pass from a root (seed defaults to ones). Fills `grad` on every
/// reachable node with requires_grad; previously stored grads are reset.
void backward(const Var& root);
void backward(const Var& root, const Array& seed);

} // namespace lira::ad
